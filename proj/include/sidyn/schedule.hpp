#pragma once

#include <string>

namespace sidyn {

/// The smoothing-parameter curve mu(t): positive, decreasing, mu -> 0.
///
/// Two closed-form families are supported so that the integrability
/// condition int t*mu(t) dt < inf (condition "h1" below) is decided
/// analytically instead of by quadrature:
///   power_law(c, p)   : mu(t) = c * t^-p      (h1 iff p > 2)
///   exponential(c, r) : mu(t) = c * e^{-r t}  (h1 always)
class MuSchedule {
 public:
  enum class Kind { power_law, exponential };

  static MuSchedule power_law(double c, double p, double t0);
  static MuSchedule exponential(double c, double r, double t0);

  /// Below this value mu is frozen and mu_dot reports 0; unreachable on the
  /// default settings at finite horizons.
  static constexpr double mu_floor = 1e-12;

  Kind kind() const { return kind_; }
  double c() const { return c_; }
  /// p for power_law, r for exponential.
  double decay() const { return decay_; }
  double t0() const { return t0_; }

  double mu(double t) const;
  double mu_dot(double t) const;
  bool floored_at(double t) const;

  struct H1Report {
    bool certified = false;       // int t * mu(t) dt < inf
    bool weak_certified = false;  // int mu(t) / t dt < inf
    std::string reason;
  };
  H1Report check_h1() const;

  /// Closed-form int_a^b t * mu(t) dt (the floor is ignored). b may be +inf;
  /// returns +inf when the tail diverges.
  double integral_t_mu(double a, double b) const;

 private:
  MuSchedule(Kind kind, double c, double decay, double t0);
  Kind kind_;
  double c_;
  double decay_;
  double t0_;
};

}  // namespace sidyn
