#pragma once

#include <string>
#include <vector>

namespace fracspde::verify {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::string suite;
  std::vector<Check> checks;

  bool all_pass() const {
    for (const Check& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Known suites: ml, cq, fem, noise, oracle. Throws std::invalid_argument
/// on an unknown name.
Report run_suite(const std::string& suite);

std::vector<std::string> suite_names();

}  // namespace fracspde::verify
