#include "sidyn/schedule.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sidyn {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MuSchedule::MuSchedule(Kind kind, double c, double decay, double t0)
    : kind_(kind), c_(c), decay_(decay), t0_(t0) {
  if (!(c > 0.0)) throw std::invalid_argument("MuSchedule: c must be > 0");
  if (!(decay > 0.0))
    throw std::invalid_argument("MuSchedule: decay parameter must be > 0");
  if (!(t0 > 0.0)) throw std::invalid_argument("MuSchedule: t0 must be > 0");
}

MuSchedule MuSchedule::power_law(double c, double p, double t0) {
  return MuSchedule(Kind::power_law, c, p, t0);
}

MuSchedule MuSchedule::exponential(double c, double r, double t0) {
  return MuSchedule(Kind::exponential, c, r, t0);
}

namespace {
void check_time(double t, double t0) {
  if (!(t >= t0)) throw std::invalid_argument("MuSchedule: t must be >= t0");
}
}  // namespace

double MuSchedule::mu(double t) const {
  check_time(t, t0_);
  const double raw = kind_ == Kind::power_law ? c_ * std::pow(t, -decay_)
                                              : c_ * std::exp(-decay_ * t);
  return std::max(raw, mu_floor);
}

bool MuSchedule::floored_at(double t) const {
  check_time(t, t0_);
  const double raw = kind_ == Kind::power_law ? c_ * std::pow(t, -decay_)
                                              : c_ * std::exp(-decay_ * t);
  return raw < mu_floor;
}

double MuSchedule::mu_dot(double t) const {
  check_time(t, t0_);
  if (floored_at(t)) return 0.0;
  if (kind_ == Kind::power_law) return -decay_ * c_ * std::pow(t, -decay_ - 1.0);
  return -decay_ * c_ * std::exp(-decay_ * t);
}

MuSchedule::H1Report MuSchedule::check_h1() const {
  H1Report rep;
  std::ostringstream os;
  if (kind_ == Kind::power_law) {
    rep.certified = decay_ > 2.0;
    rep.weak_certified = decay_ > 0.0;
    if (rep.certified) {
      os << "int t*mu over [t0,inf) = c*t0^(2-p)/(p-2) = "
         << c_ * std::pow(t0_, 2.0 - decay_) / (decay_ - 2.0)
         << " (p = " << decay_ << " > 2)";
    } else {
      os << "int t*mu over [t0,inf) diverges for p = " << decay_ << " <= 2";
    }
  } else {
    rep.certified = true;
    rep.weak_certified = true;
    os << "int t*mu over [t0,inf) = c*e^{-r t0}(t0/r + 1/r^2) = "
       << integral_t_mu(t0_, kInf) << " (exponential decay)";
  }
  rep.reason = os.str();
  return rep;
}

double MuSchedule::integral_t_mu(double a, double b) const {
  if (!(a >= t0_)) throw std::invalid_argument("integral_t_mu: a must be >= t0");
  if (!(b >= a)) throw std::invalid_argument("integral_t_mu: need a <= b");
  if (a == b) return 0.0;

  if (kind_ == Kind::power_law) {
    const double p = decay_;
    if (std::isinf(b)) {
      if (p <= 2.0) return kInf;
      return c_ * std::pow(a, 2.0 - p) / (p - 2.0);
    }
    if (p == 2.0) return c_ * std::log(b / a);
    return c_ * (std::pow(b, 2.0 - p) - std::pow(a, 2.0 - p)) / (2.0 - p);
  }

  // exponential: antiderivative of t c e^{-rt} is -c e^{-rt} (t/r + 1/r^2)
  const double r = decay_;
  auto tail = [&](double t) { return c_ * std::exp(-r * t) * (t / r + 1.0 / (r * r)); };
  if (std::isinf(b)) return tail(a);
  return tail(a) - tail(b);
}

}  // namespace sidyn
