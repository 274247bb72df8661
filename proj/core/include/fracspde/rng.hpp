#pragma once

#include <cstdint>
#include <random>

namespace fracspde {

/// Deterministic standard-normal stream: mt19937_64 plus an explicit
/// Box-Muller transform. Avoids std::normal_distribution, whose output
/// sequence is implementation-defined.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in (0, 1].
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace fracspde
