#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace evoflow {

// Interpolation schedule kappa: [0,1] -> [0,1], continuous, strictly
// increasing, with kappa(0)=0 and kappa(1)=1.
class Schedule {
 public:
  enum class Kind { Linear, Polynomial };

  static Schedule linear() { return Schedule(Kind::Linear, 1.0); }
  static Schedule polynomial(double p) {
    if (p <= 0) throw std::invalid_argument("Schedule: exponent must be positive");
    return Schedule(Kind::Polynomial, p);
  }

  double kappa(double t) const {
    check(t);
    return kind_ == Kind::Linear ? t : std::pow(t, p_);
  }

  double kappa_dot(double t) const {
    check(t);
    return kind_ == Kind::Linear ? 1.0 : p_ * std::pow(t, p_ - 1.0);
  }

  // kappa_dot(t) / (1 - kappa(t)); diverges as t -> 1, so t must be < 1.
  double rate_coeff(double t) const {
    if (t >= 1.0) throw std::invalid_argument("Schedule: rate coefficient diverges at t >= 1");
    return kappa_dot(t) / (1.0 - kappa(t));
  }

  Kind kind() const { return kind_; }
  double exponent() const { return p_; }
  std::string name() const {
    return kind_ == Kind::Linear ? "linear" : "poly" + std::to_string(p_);
  }

 private:
  Schedule(Kind kind, double p) : kind_(kind), p_(p) {}
  static void check(double t) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("Schedule: t outside [0,1]");
  }
  Kind kind_;
  double p_;
};

}  // namespace evoflow
