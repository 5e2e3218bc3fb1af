#include "sidyn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sidyn {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t nearest_sample(const std::vector<TrajectorySample>& samples,
                           double t) {
  std::size_t best = 0;
  double best_d = std::abs(samples[0].t - t);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double d = std::abs(samples[i].t - t);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}
}  // namespace

double energy_W(const DynamicSpec& spec, const TrajectorySample& s) {
  const double mu = spec.schedule.mu(s.t);
  return 0.5 * s.v.squaredNorm() + spec.objective.value(s.x, mu) +
         spec.objective.kappa() * mu;
}

double energy_E(const DynamicSpec& spec, const TrajectorySample& s,
                const Vector& x_star) {
  const double mu = spec.schedule.mu(s.t);
  return 0.5 * s.v.squaredNorm() + spec.objective.value(s.x, mu) -
         spec.objective.value(x_star, mu) + 2.0 * spec.objective.kappa() * mu;
}

double energy_calE(const DynamicSpec& spec, const TrajectorySample& s,
                   const Vector& x_star) {
  const double mu = spec.schedule.mu(s.t);
  const double gap = spec.objective.value(s.x, mu) -
                     spec.objective.value(x_star, mu) +
                     2.0 * spec.objective.kappa() * mu;
  const Vector mix = (spec.alpha - 1.0) * (s.x - x_star) + s.t * s.v;
  return s.t * s.t * gap + 0.5 * mix.squaredNorm();
}

std::vector<double> perturbed_energy_Wg_all(const DynamicSpec& spec,
                                            const Trajectory& traj,
                                            double f_star) {
  if (spec.perturbation.is_none())
    throw std::invalid_argument("perturbed_energy_Wg: no perturbation configured");
  const auto& ss = traj.samples;
  const std::size_t N = ss.size();
  // <v(t), g(t)> at each sample, then suffix trapezoid for the tail integral.
  std::vector<double> vg(N), tail(N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    vg[i] = ss[i].v.dot(spec.perturbation.g(ss[i].t, spec.objective.dim()));
  for (std::size_t i = N - 1; i-- > 0;)
    tail[i] = tail[i + 1] +
              0.5 * (vg[i] + vg[i + 1]) * (ss[i + 1].t - ss[i].t);

  std::vector<double> out(N);
  const double kappa = spec.objective.kappa();
  for (std::size_t i = 0; i < N; ++i) {
    const double mu = spec.schedule.mu(ss[i].t);
    out[i] = 0.5 * ss[i].v.squaredNorm() + ss[i].f_smooth - f_star +
             kappa * mu + tail[i];
  }
  return out;
}

double perturbed_energy_Wg(const DynamicSpec& spec, const Trajectory& traj,
                           std::size_t index, double f_star) {
  if (index >= traj.samples.size())
    throw std::invalid_argument("perturbed_energy_Wg: sample index out of range");
  return perturbed_energy_Wg_all(spec, traj, f_star)[index];
}

std::vector<EnergyRecord> energy_records(const DynamicSpec& spec,
                                         const Trajectory& traj,
                                         const DiagnosticsOptions& opts) {
  const auto& ss = traj.samples;
  std::vector<EnergyRecord> recs(ss.size());
  const Vector* anchor = nullptr;
  if (opts.anchor)
    anchor = &*opts.anchor;
  else if (opts.x_star)
    anchor = &*opts.x_star;

  double int_t_gap = 0.0, int_t_speed = 0.0, int_invt_speed = 0.0;
  double prev_t = 0.0, prev_gap = 0.0, prev_ts = 0.0, prev_is = 0.0;

  for (std::size_t i = 0; i < ss.size(); ++i) {
    const auto& s = ss[i];
    EnergyRecord& r = recs[i];
    r.t = s.t;
    r.W = energy_W(spec, s);
    r.E = opts.x_star ? energy_E(spec, s, *opts.x_star) : kNaN;
    r.calE = opts.x_star ? energy_calE(spec, s, *opts.x_star) : kNaN;
    r.h_anchor = anchor ? 0.5 * (s.x - *anchor).squaredNorm() : kNaN;

    const double speed2 = s.v.squaredNorm();
    const double gap_term =
        opts.f_star ? s.t * (s.f_raw - *opts.f_star) : kNaN;
    const double ts_term = s.t * speed2;
    const double is_term = speed2 / s.t;
    if (i > 0) {
      const double dt = s.t - prev_t;
      if (opts.f_star) int_t_gap += 0.5 * (gap_term + prev_gap) * dt;
      int_t_speed += 0.5 * (ts_term + prev_ts) * dt;
      int_invt_speed += 0.5 * (is_term + prev_is) * dt;
    }
    prev_t = s.t;
    prev_gap = gap_term;
    prev_ts = ts_term;
    prev_is = is_term;

    r.t2_gap = opts.f_star ? s.t * s.t * (s.f_raw - *opts.f_star) : kNaN;
    r.t2_E = opts.x_star ? s.t * s.t * r.E : kNaN;
    r.int_t_gap = opts.f_star ? int_t_gap : kNaN;
    r.int_t_speed = int_t_speed;
    r.int_invt_speed = int_invt_speed;
  }
  return recs;
}

Verdict check_w_monotone(const std::vector<EnergyRecord>& recs) {
  Verdict v{"W_monotone", -std::numeric_limits<double>::infinity(),
            tol::w_monotone_rel, true};
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    const double scale = 1.0 + std::abs(recs[i].W);
    const double viol = (recs[i + 1].W - recs[i].W) / scale;
    v.max_violation = std::max(v.max_violation, viol);
  }
  if (recs.size() < 2) v.max_violation = 0.0;
  v.pass = v.max_violation <= v.tolerance;
  return v;
}

namespace {
Verdict nonneg_check(const std::vector<EnergyRecord>& recs,
                     double EnergyRecord::*field, const std::string& name) {
  Verdict v{name, -std::numeric_limits<double>::infinity(),
            tol::energy_floor, true};
  for (const auto& r : recs)
    v.max_violation = std::max(v.max_violation, -(r.*field));
  if (recs.empty()) v.max_violation = 0.0;
  v.pass = v.max_violation <= v.tolerance;
  return v;
}
}  // namespace

Verdict check_e_nonneg(const std::vector<EnergyRecord>& recs) {
  return nonneg_check(recs, &EnergyRecord::E, "E_nonnegative");
}

Verdict check_calE_nonneg(const std::vector<EnergyRecord>& recs) {
  return nonneg_check(recs, &EnergyRecord::calE, "calE_nonnegative");
}

Verdict check_quasi_descent(const Trajectory& traj, const DynamicSpec& spec,
                            const Vector& x_star) {
  if (!(spec.alpha >= 3.0))
    throw std::invalid_argument("check_quasi_descent: requires alpha >= 3");
  const auto& ss = traj.samples;
  const double C = 2.0 * (spec.alpha - 1.0) * spec.objective.kappa();

  // calE(t_j) - calE(t_i) <= C * int_{t_i}^{t_j} s mu(s) ds for all i < j
  // is equivalent to Q(t) = calE(t) - C * int_{t0}^{t} s mu(s) ds being
  // nonincreasing over samples, so one pass over running minima suffices.
  double calE0 = 0.0;
  double running_min = std::numeric_limits<double>::infinity();
  double max_violation = 0.0;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    const double calE = energy_calE(spec, ss[i], x_star);
    if (i == 0) calE0 = calE;
    const double Q =
        calE - C * spec.schedule.integral_t_mu(spec.t0, ss[i].t);
    if (i > 0) max_violation = std::max(max_violation, Q - running_min);
    running_min = std::min(running_min, Q);
  }

  Verdict v{"calE_quasi_descent", max_violation,
            tol::quasi_descent_rel * (1.0 + calE0), true};
  v.pass = v.max_violation <= v.tolerance;
  return v;
}

Verdict check_wg_monotone(const DynamicSpec& spec, const Trajectory& traj,
                          double f_star) {
  const auto wg = perturbed_energy_Wg_all(spec, traj, f_star);
  Verdict v{"Wg_monotone", -std::numeric_limits<double>::infinity(),
            tol::w_monotone_rel, true};
  for (std::size_t i = 0; i + 1 < wg.size(); ++i) {
    const double scale = 1.0 + std::abs(wg[i]);
    v.max_violation = std::max(v.max_violation, (wg[i + 1] - wg[i]) / scale);
  }
  if (wg.size() < 2) v.max_violation = 0.0;
  v.pass = v.max_violation <= v.tolerance;
  return v;
}

namespace {
// "Final decade" of a run: the last tenth of the integration horizon.
double final_decade_start(double t0, double T) { return T - 0.1 * (T - t0); }
}  // namespace

Verdict check_plateau(const std::vector<EnergyRecord>& recs,
                      double EnergyRecord::*field, const std::string& name) {
  Verdict v{name, 0.0, tol::plateau_fraction, true};
  if (recs.size() < 2) return v;
  const double t_a = final_decade_start(recs.front().t, recs.back().t);
  double at_ta = recs.front().*field;
  for (const auto& r : recs) {
    if (r.t >= t_a) {
      at_ta = r.*field;
      break;
    }
  }
  const double total = recs.back().*field;
  const double increment = total - at_ta;
  v.max_violation = increment / std::max(std::abs(total), 1e-300);
  v.pass = v.max_violation <= v.tolerance;
  return v;
}

Verdict check_t2_gap_bounded(const std::vector<EnergyRecord>& recs) {
  Verdict v{"t2_gap_bounded", 0.0, 0.0, true};
  const double t0 = recs.front().t;
  double running_max = -std::numeric_limits<double>::infinity();
  for (const auto& r : recs)
    if (r.t >= t0 + 1.0) running_max = std::max(running_max, r.t2_gap);
  if (std::isinf(running_max)) return v;  // horizon shorter than t0 + 1
  v.max_violation = recs.back().t2_gap - running_max;
  v.pass = v.max_violation <= v.tolerance;
  return v;
}

Verdict check_t2_gap_decay(const std::vector<EnergyRecord>& recs) {
  Verdict v{"t2_gap_decay", 0.0, tol::t2_decay_ratio, true};
  const double T = recs.back().t;
  std::size_t ref = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const double d = std::abs(recs[i].t - T / 4.0);
    if (d < best) {
      best = d;
      ref = i;
    }
  }
  const double denom = recs[ref].t2_gap;
  const double num = recs.back().t2_gap;
  v.max_violation = denom > 0.0 ? num / denom : (num > 0.0 ? 1e300 : 0.0);
  v.pass = v.max_violation <= v.tolerance;
  return v;
}

Verdict check_h_anchor_stable(const std::vector<EnergyRecord>& recs) {
  Verdict v{"h_anchor_stable", 0.0, tol::h_anchor_oscillation, true};
  double peak = 0.0;
  for (const auto& r : recs) peak = std::max(peak, std::abs(r.h_anchor));
  const double t_a = final_decade_start(recs.front().t, recs.back().t);
  double mx = -std::numeric_limits<double>::infinity();
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& r : recs) {
    if (r.t < t_a) continue;
    mx = std::max(mx, r.h_anchor);
    mn = std::min(mn, r.h_anchor);
  }
  // Oscillation relative to the anchor distance's peak over the whole run;
  // the limit itself can be ~0 so it cannot serve as the denominator.
  v.max_violation = (mx - mn) / std::max(peak, 1e-300);
  v.pass = v.max_violation <= v.tolerance;
  return v;
}

Verdict check_velocity_vanishing(const Trajectory& traj) {
  Verdict v{"velocity_vanishing", 0.0, 0.0, true};
  const auto& ss = traj.samples;
  const double t0 = ss.front().t;
  const double T = ss.back().t;
  const double first_decade_end = t0 + 0.1 * (T - t0);
  double vmax = 0.0;
  for (const auto& s : ss) {
    if (s.t > first_decade_end) break;
    vmax = std::max(vmax, s.v.norm());
  }
  v.max_violation = ss.back().v.norm() - 0.1 * vmax;
  v.pass = v.max_violation <= v.tolerance;
  return v;
}

std::vector<Verdict> run_standard_checks(const DynamicSpec& spec,
                                         const Trajectory& traj,
                                         const DiagnosticsOptions& opts) {
  const auto recs = energy_records(spec, traj, opts);
  std::vector<Verdict> out;
  const bool unperturbed = spec.perturbation.is_none();
  // W descent and the calE quasi-descent inequality belong to the
  // unperturbed dynamic; under forcing their W_g counterpart is checked.
  if (unperturbed) out.push_back(check_w_monotone(recs));

  const bool h1 = spec.schedule.check_h1().certified;
  if (opts.x_star) {
    out.push_back(check_e_nonneg(recs));
    out.push_back(check_calE_nonneg(recs));
    if (spec.alpha >= 3.0 && h1 && unperturbed)
      out.push_back(check_quasi_descent(traj, spec, *opts.x_star));
  }
  if (opts.f_star) {
    out.push_back(check_plateau(recs, &EnergyRecord::int_t_gap,
                                "int_t_gap_plateau"));
    out.push_back(check_t2_gap_bounded(recs));
    if (spec.alpha > 3.0) out.push_back(check_t2_gap_decay(recs));
    if (!spec.perturbation.is_none())
      out.push_back(check_wg_monotone(spec, traj, *opts.f_star));
  }
  out.push_back(
      check_plateau(recs, &EnergyRecord::int_t_speed, "int_t_speed_plateau"));
  out.push_back(check_plateau(recs, &EnergyRecord::int_invt_speed,
                              "int_invt_speed_plateau"));
  if (opts.anchor || opts.x_star) out.push_back(check_h_anchor_stable(recs));
  if (h1) out.push_back(check_velocity_vanishing(traj));
  return out;
}

double fit_rate(const Trajectory& traj, double f_star, double t_a,
                double t_b) {
  if (!(t_a < t_b)) throw std::invalid_argument("fit_rate: need t_a < t_b");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long m = 0;
  for (const auto& s : traj.samples) {
    if (s.t < t_a || s.t > t_b) continue;
    const double gap = s.f_raw - f_star;
    if (gap <= 1e-16) continue;  // floor; dropped
    const double lx = std::log(s.t), ly = std::log(gap);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 10)
    throw std::invalid_argument("fit_rate: fewer than 10 usable samples");
  const double denom = m * sxx - sx * sx;
  return (m * sxy - sx * sy) / denom;
}

double decay_ratio(const Trajectory& traj, double f_star, double T) {
  const auto& ss = traj.samples;
  const std::size_t i_T = nearest_sample(ss, T);
  auto t2gap = [&](std::size_t i) {
    return ss[i].t * ss[i].t * (ss[i].f_raw - f_star);
  };
  // Reference value: the envelope of t^2 gap within 10% of T/4. The pointwise
  // value can sit on a crossing of the optimal set where the gap vanishes.
  const double t_ref = T / 4.0;
  double denom = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ss.size(); ++i)
    if (std::abs(ss[i].t - t_ref) <= 0.1 * t_ref)
      denom = std::max(denom, t2gap(i));
  if (std::isinf(denom)) denom = t2gap(nearest_sample(ss, t_ref));
  const double num = t2gap(i_T);
  if (denom <= 0.0)
    return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return num / denom;
}

}  // namespace sidyn
