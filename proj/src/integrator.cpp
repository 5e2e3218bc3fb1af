#include "sidyn/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sidyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dormand-Prince 5(4) tableau.
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                 A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
// b - b* (5th order minus embedded 4th order weights)
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
// Dense-output coefficients.
constexpr double D1 = -12715105075.0 / 11282082432.0;
constexpr double D3 = 87487479700.0 / 32700410799.0;
constexpr double D4 = -10690763975.0 / 1880347072.0;
constexpr double D5 = 701980252875.0 / 199316789632.0;
constexpr double D6 = -1453857185.0 / 822651844.0;
constexpr double D7 = 69997945.0 / 29380423.0;

Vector dense_eval(const Trajectory::DenseSegment& seg, double theta) {
  const double om = 1.0 - theta;
  return seg.r1 +
         theta * (seg.r2 + om * (seg.r3 + theta * (seg.r4 + om * seg.r5)));
}

}  // namespace

void IntegratorConfig::validate(double t0) const {
  if (!(rtol > 0.0) || !(atol > 0.0))
    throw std::invalid_argument("IntegratorConfig: tolerances must be > 0");
  if (!(h_min > 0.0) || !(h_min <= h_init) || !(h_init <= h_max))
    throw std::invalid_argument(
        "IntegratorConfig: need 0 < h_min <= h_init <= h_max");
  if (!(eta_stability > 0.0))
    throw std::invalid_argument("IntegratorConfig: eta_stability must be > 0");
  if (!(t_end > t0))
    throw std::invalid_argument("IntegratorConfig: t_end must be > t0");
  if (!(record_every > 0.0))
    throw std::invalid_argument("IntegratorConfig: record_every must be > 0");
}

PhaseState Trajectory::interpolate(double t) const {
  if (samples.empty())
    throw std::runtime_error("interpolate: empty trajectory");
  // At a recorded time, hand back the stored sample exactly.
  auto it = std::lower_bound(
      samples.begin(), samples.end(), t,
      [](const TrajectorySample& s, double tt) { return s.t < tt; });
  if (it != samples.end() && it->t == t) return {t, it->x, it->v};

  if (t < t_begin() || t > t_final())
    throw std::invalid_argument("interpolate: t outside trajectory range");
  if (segments_.empty())
    throw std::runtime_error("interpolate: dense output was not stored");

  auto seg_it = std::upper_bound(
      segments_.begin(), segments_.end(), t,
      [](double tt, const DenseSegment& s) { return tt < s.t0; });
  if (seg_it != segments_.begin()) --seg_it;
  const DenseSegment& seg = *seg_it;
  const double theta = std::clamp((t - seg.t0) / seg.h, 0.0, 1.0);
  Vector y = dense_eval(seg, theta);
  const int n = static_cast<int>(y.size()) / 2;
  return {t, y.head(n), y.tail(n)};
}

Trajectory integrate(const DynamicSpec& spec, const IntegratorConfig& config,
                     const Vector& x0, const Vector& v0) {
  const int n = spec.objective.dim();
  if (x0.size() != n || v0.size() != n)
    throw std::invalid_argument("integrate: initial state dimension mismatch");
  if (!x0.allFinite() || !v0.allFinite())
    throw std::invalid_argument("integrate: initial state must be finite");
  config.validate(spec.t0);

  const double t0 = spec.t0;
  const double t_end = config.t_end;
  const double alpha = spec.alpha;
  const bool perturbed = !spec.perturbation.is_none();
  const Vector pert_dir =
      perturbed ? spec.perturbation.direction() : Vector();
  const double pert_a = spec.perturbation.amplitude();
  const double pert_b = spec.perturbation.decay_rate();

  Vector y(2 * n);
  y.head(n) = x0;
  y.tail(n) = v0;

  Vector xbuf(n), gbuf(n);
  auto eval = [&](double t, const Vector& yy, Vector& dy) {
    xbuf = yy.head(n);
    spec.objective.grad_x_into(xbuf, spec.schedule.mu(t), gbuf);
    if (perturbed) gbuf -= (pert_a * std::exp(-pert_b * t)) * pert_dir;
    dy.head(n) = yy.tail(n);
    dy.tail(n) = -(alpha / t) * yy.tail(n) - gbuf;
  };

  auto stability_cap = [&](double t) {
    const double lip = spec.objective.grad_lipschitz(spec.schedule.mu(t));
    return lip > 0.0 ? config.eta_stability / std::sqrt(lip) : kInf;
  };

  Trajectory traj;
  auto emit = [&](double t, const Vector& x, const Vector& v, double h_used) {
    TrajectorySample s;
    s.t = t;
    s.x = x;
    s.v = v;
    const double mu = spec.schedule.mu(t);
    s.f_raw = spec.objective.underlying(x);
    s.f_smooth = spec.objective.value(x, mu);
    s.grad_norm = spec.objective.grad_x(x, mu).norm();
    s.step_size = h_used;
    traj.samples.push_back(std::move(s));
  };

  emit(t0, x0, v0, 0.0);

  double t = t0;
  double h =
      std::min({config.h_init, config.h_max, stability_cap(t0), t_end - t0});
  h = std::max(h, config.h_min);
  double h_last_accepted = 0.0;

  Vector k1(2 * n), k2(2 * n), k3(2 * n), k4(2 * n), k5(2 * n), k6(2 * n),
      k7(2 * n), ytmp(2 * n), y5(2 * n), errv(2 * n);
  eval(t, y, k1);

  // PI controller (orders 5/4, safety 0.9, growth clamp [0.2, 5]).
  const double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
  const double fac_min = 0.2, fac_max = 5.0;
  double facold = 1e-4;
  bool last_rejected = false;
  bool floor_logged = false;

  long record_index = 1;  // next record-grid point is t0 + record_index * grid
  const double grid = config.record_every;

  Trajectory::DenseSegment seg;

  while (true) {
    const double remaining = t_end - t;
    if (remaining <= 1e-14 * std::max(1.0, std::abs(t_end))) break;

    const double cap = stability_cap(t);
    if (cap < config.h_min) {
      std::ostringstream os;
      os << "stiffness budget exceeded at t=" << t
         << " (stability cap below h_min)";
      traj.events.push_back({t, os.str()});
      traj.truncated = true;
      break;
    }
    h = std::min({h, config.h_max, cap, remaining});

    // Stage evaluations; k1 carries over from the previous step (FSAL).
    ytmp = y + h * (A21 * k1);
    eval(t + C2 * h, ytmp, k2);
    ytmp = y + h * (A31 * k1 + A32 * k2);
    eval(t + C3 * h, ytmp, k3);
    ytmp = y + h * (A41 * k1 + A42 * k2 + A43 * k3);
    eval(t + C4 * h, ytmp, k4);
    ytmp = y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4);
    eval(t + C5 * h, ytmp, k5);
    ytmp = y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5);
    eval(t + h, ytmp, k6);
    y5 = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    eval(t + h, y5, k7);
    errv = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

    // Componentwise scaled max-norm error estimate.
    double err = 0.0;
    const bool finite = y5.allFinite();
    if (finite) {
      for (int i = 0; i < 2 * n; ++i) {
        const double scale =
            config.atol +
            config.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        err = std::max(err, std::abs(errv[i]) / scale);
      }
      if (!std::isfinite(err)) err = kInf;
    } else {
      err = kInf;
    }

    const double fac11 = std::pow(std::max(err, 1e-30), expo1);

    if (err <= 1.0) {
      ++traj.accepted_steps;
      h_last_accepted = h;
      seg.t0 = t;
      seg.h = h;
      seg.r1 = y;
      seg.r2 = y5 - y;
      seg.r3 = h * k1 - seg.r2;
      seg.r4 = seg.r2 - h * k7 - seg.r3;
      seg.r5 = h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7);

      // Record-grid samples covered by this step, via dense output.
      while (true) {
        const double tr = t0 + static_cast<double>(record_index) * grid;
        if (tr > t + h || tr >= t_end) break;
        Vector yd = dense_eval(seg, std::clamp((tr - t) / h, 0.0, 1.0));
        emit(tr, yd.head(n), yd.tail(n), h);
        ++record_index;
      }

      if (config.store_dense) traj.segments_.push_back(seg);

      t += h;
      y.swap(y5);
      k1.swap(k7);

      if (!floor_logged && spec.schedule.floored_at(t)) {
        std::ostringstream os;
        os << "mu floor " << MuSchedule::mu_floor << " reached at t=" << t;
        traj.events.push_back({t, os.str()});
        floor_logged = true;
      }

      double fac = fac11 / std::pow(facold, beta);
      fac = std::clamp(fac / safe, 1.0 / fac_max, 1.0 / fac_min);
      double hnew = h / fac;
      if (last_rejected) hnew = std::min(hnew, h);
      last_rejected = false;
      facold = std::max(err, 1e-4);
      h = hnew;
    } else {
      ++traj.rejected_steps;
      last_rejected = true;
      const double hnew = h / std::min(1.0 / fac_min, fac11 / safe);
      if (hnew < config.h_min) {
        if (!finite) {
          std::ostringstream os;
          os << "integrate: non-finite state at t=" << t
             << " with step below h_min";
          throw std::runtime_error(os.str());
        }
        std::ostringstream os;
        os << "stiffness budget exceeded at t=" << t << " (h < h_min)";
        traj.events.push_back({t, os.str()});
        traj.truncated = true;
        break;
      }
      h = hnew;
    }
  }

  // Final sample from the exact end state (t_end, or the truncation time).
  if (traj.samples.back().t < t)
    emit(t, y.head(n), y.tail(n), h_last_accepted);
  return traj;
}

}  // namespace sidyn
