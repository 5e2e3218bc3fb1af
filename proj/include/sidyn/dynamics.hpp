#pragma once

#include "sidyn/schedule.hpp"
#include "sidyn/smoothing.hpp"

#include <utility>

namespace sidyn {

/// Forcing term g(t) = a * e^{-b t} * direction (or none). The exponential
/// family keeps both int ||g|| dt and int t*||g|| dt finite in closed form.
class Perturbation {
 public:
  static Perturbation none();
  /// direction is normalized; b must be positive.
  static Perturbation exponential_decay(double a, double b, Vector direction);

  bool is_none() const { return none_; }
  double amplitude() const { return a_; }
  double decay_rate() const { return b_; }
  const Vector& direction() const { return direction_; }

  /// ||g(t)|| = |a| e^{-b t}.
  double norm(double t) const;
  void add_g(double t, Vector& out) const;
  Vector g(double t, int dim) const;

  /// Closed-form int_a^b ||g(t)|| dt; b may be +inf.
  double integral_norm(double from, double to) const;
  /// Closed-form int_a^b t * ||g(t)|| dt; b may be +inf.
  double integral_t_norm(double from, double to) const;

 private:
  Perturbation() = default;
  bool none_ = true;
  double a_ = 0.0;
  double b_ = 1.0;
  Vector direction_;
};

/// The right-hand side data of the damped dynamic
///   x''(t) + (alpha/t) x'(t) + grad_x f~(x(t), mu(t)) = g(t).
struct DynamicSpec {
  double alpha;
  double t0;
  SmoothedFunction objective;
  MuSchedule schedule;
  Perturbation perturbation;

  /// Validates alpha > 0, t0 > 0, schedule.t0() == t0 and perturbation
  /// dimension before constructing.
  static DynamicSpec make(double alpha, double t0, SmoothedFunction objective,
                          MuSchedule schedule,
                          Perturbation perturbation = Perturbation::none());
};

struct PhaseState {
  double t;
  Vector x;
  Vector v;
};

/// dx = v, dv = -(alpha/t) v - grad_x f~(x, mu(t)) + g(t).
void rhs_into(const DynamicSpec& spec, const PhaseState& s, Vector& dx,
              Vector& dv);
std::pair<Vector, Vector> rhs(const DynamicSpec& spec, const PhaseState& s);

/// Lipschitz bound M(t) = max{1 + alpha/t, lip_smooth + lip_nonsmooth/mu(t)}
/// of the first-order field; drives the integrator's stability cap.
double lipschitz_bound(const DynamicSpec& spec, double t);

}  // namespace sidyn
