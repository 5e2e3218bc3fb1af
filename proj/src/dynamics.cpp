#include "sidyn/dynamics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sidyn {

Perturbation Perturbation::none() { return Perturbation(); }

Perturbation Perturbation::exponential_decay(double a, double b,
                                             Vector direction) {
  if (!(b > 0.0))
    throw std::invalid_argument("Perturbation: decay rate must be > 0");
  if (direction.size() < 1)
    throw std::invalid_argument("Perturbation: direction must be non-empty");
  Perturbation p;
  p.none_ = false;
  p.a_ = a;
  p.b_ = b;
  const double nd = direction.norm();
  p.direction_ = nd > 0.0 ? Vector(direction / nd)
                          : Vector(Vector::Zero(direction.size()));
  return p;
}

double Perturbation::norm(double t) const {
  if (none_) return 0.0;
  return std::abs(a_) * std::exp(-b_ * t) * direction_.norm();
}

void Perturbation::add_g(double t, Vector& out) const {
  if (none_) return;
  if (out.size() != direction_.size())
    throw std::invalid_argument("Perturbation: dimension mismatch");
  out += (a_ * std::exp(-b_ * t)) * direction_;
}

Vector Perturbation::g(double t, int dim) const {
  if (none_) return Vector::Zero(dim);
  if (direction_.size() != dim)
    throw std::invalid_argument("Perturbation: dimension mismatch");
  return (a_ * std::exp(-b_ * t)) * direction_;
}

double Perturbation::integral_norm(double from, double to) const {
  if (!(to >= from)) throw std::invalid_argument("integral_norm: need from <= to");
  if (none_ || a_ == 0.0) return 0.0;
  const double amp = std::abs(a_) * direction_.norm();
  auto tail = [&](double t) { return amp * std::exp(-b_ * t) / b_; };
  if (std::isinf(to)) return tail(from);
  return tail(from) - tail(to);
}

double Perturbation::integral_t_norm(double from, double to) const {
  if (!(to >= from))
    throw std::invalid_argument("integral_t_norm: need from <= to");
  if (none_ || a_ == 0.0) return 0.0;
  const double amp = std::abs(a_) * direction_.norm();
  auto tail = [&](double t) {
    return amp * std::exp(-b_ * t) * (t / b_ + 1.0 / (b_ * b_));
  };
  if (std::isinf(to)) return tail(from);
  return tail(from) - tail(to);
}

DynamicSpec DynamicSpec::make(double alpha, double t0,
                              SmoothedFunction objective, MuSchedule schedule,
                              Perturbation perturbation) {
  if (!(alpha > 0.0)) throw std::invalid_argument("DynamicSpec: alpha must be > 0");
  if (!(t0 > 0.0)) throw std::invalid_argument("DynamicSpec: t0 must be > 0");
  if (schedule.t0() != t0)
    throw std::invalid_argument("DynamicSpec: schedule.t0 must equal t0");
  if (!perturbation.is_none() &&
      perturbation.direction().size() != objective.dim())
    throw std::invalid_argument(
        "DynamicSpec: perturbation dimension must match objective");
  return DynamicSpec{alpha, t0, std::move(objective), std::move(schedule),
                     std::move(perturbation)};
}

void rhs_into(const DynamicSpec& spec, const PhaseState& s, Vector& dx,
              Vector& dv) {
  if (!(s.t >= spec.t0)) throw std::invalid_argument("rhs: t must be >= t0");
  if (!s.x.allFinite() || !s.v.allFinite())
    throw std::invalid_argument("rhs: state must be finite");
  dx = s.v;
  const double mu = spec.schedule.mu(s.t);
  spec.objective.grad_x_into(s.x, mu, dv);
  dv = -(spec.alpha / s.t) * s.v - dv;
  spec.perturbation.add_g(s.t, dv);
}

std::pair<Vector, Vector> rhs(const DynamicSpec& spec, const PhaseState& s) {
  Vector dx, dv;
  rhs_into(spec, s, dx, dv);
  return {std::move(dx), std::move(dv)};
}

double lipschitz_bound(const DynamicSpec& spec, double t) {
  if (!(t >= spec.t0))
    throw std::invalid_argument("lipschitz_bound: t must be >= t0");
  const double field_part = 1.0 + spec.alpha / t;
  const double grad_part = spec.objective.grad_lipschitz(spec.schedule.mu(t));
  return std::max(field_part, grad_part);
}

}  // namespace sidyn
