#include "fracspde/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace fracspde {

HurstPair::HurstPair(double h1_, double h2_) : h1(h1_), h2(h2_) {
  if (!(h1 > 0.0) || !(h1 <= 0.5))
    throw std::invalid_argument("hurst.h1 must lie in (0, 0.5], got " + std::to_string(h1));
  if (!(h2 > 0.0) || !(h2 <= 0.5))
    throw std::invalid_argument("hurst.h2 must lie in (0, 0.5], got " + std::to_string(h2));
}

NonlinearSource NonlinearSource::zero() { return {Kind::Zero, 0.0}; }
NonlinearSource NonlinearSource::constant(double value) { return {Kind::Constant, value}; }
NonlinearSource NonlinearSource::linear(double slope) { return {Kind::Linear, slope}; }
NonlinearSource NonlinearSource::sine(double scale) { return {Kind::Sine, scale}; }

NonlinearSource NonlinearSource::from_id(const std::string& id, double param) {
  if (id == "zero") return zero();
  if (id == "constant") return constant(param);
  if (id == "linear") return linear(param);
  if (id == "sin") return sine(param);
  throw std::invalid_argument("unknown source id '" + id + "' (expected zero|constant|linear|sin)");
}

double NonlinearSource::operator()(double u) const {
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Constant: return param_;
    case Kind::Linear: return param_ * u;
    case Kind::Sine: return param_ * std::sin(u);
  }
  return 0.0;
}

double NonlinearSource::lipschitz() const {
  switch (kind_) {
    case Kind::Zero:
    case Kind::Constant: return 0.0;
    case Kind::Linear:
    case Kind::Sine: return std::abs(param_);
  }
  return 0.0;
}

std::string NonlinearSource::id() const {
  switch (kind_) {
    case Kind::Zero: return "zero";
    case Kind::Constant: return "constant";
    case Kind::Linear: return "linear";
    case Kind::Sine: return "sin";
  }
  return "zero";
}

ProblemSpec::ProblemSpec(double alpha_, HurstPair hurst_, double beta_, double l_,
                         double T_, NonlinearSource f_)
    : alpha(alpha_), hurst(hurst_), beta(beta_), l(l_), T(T_), f(f_) {
  if (!(alpha > 0.0) || !(alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1], got " + std::to_string(alpha));
  if (!(l > 0.0)) throw std::invalid_argument("l must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
  if (!(regularity_exponent() > 0.0))
    throw std::invalid_argument(
        "problem violates the standing assumption 2*h2 + (h1 - 1)*alpha > 0: got " +
        std::to_string(regularity_exponent()));
}

}  // namespace fracspde
