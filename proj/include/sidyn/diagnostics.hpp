#pragma once

#include "sidyn/integrator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sidyn {

/// Per-sample energy values and running integral estimates.
/// Quantities that need a reference point (x_star, f_star, anchor) are NaN
/// when the reference was not supplied.
struct EnergyRecord {
  double t = 0.0;
  double W = 0.0;        // 1/2||v||^2 + f~(x,mu) + kappa*mu
  double E = 0.0;        // 1/2||v||^2 + f~(x,mu) - f~(x*,mu) + 2*kappa*mu
  double calE = 0.0;     // t^2(f~ gap + 2 kappa mu) + 1/2||(a-1)(x-x*)+t v||^2
  double h_anchor = 0.0; // 1/2||x - z||^2
  double t2_gap = 0.0;   // t^2 (f_raw - f_star)
  double t2_E = 0.0;
  double int_t_gap = 0.0;      // int t (f_raw - f_star)
  double int_t_speed = 0.0;    // int t ||v||^2
  double int_invt_speed = 0.0; // int ||v||^2 / t
};

double energy_W(const DynamicSpec& spec, const TrajectorySample& s);
double energy_E(const DynamicSpec& spec, const TrajectorySample& s,
                const Vector& x_star);
double energy_calE(const DynamicSpec& spec, const TrajectorySample& s,
                   const Vector& x_star);

/// Finite-horizon perturbed energy at sample `index`:
///   W_g(t) = 1/2||v||^2 + f~(x,mu) - f_star + kappa*mu
///            + int_t^{T_end} <v, g> dtau   (trapezoid over samples).
double perturbed_energy_Wg(const DynamicSpec& spec, const Trajectory& traj,
                           std::size_t index, double f_star);
std::vector<double> perturbed_energy_Wg_all(const DynamicSpec& spec,
                                            const Trajectory& traj,
                                            double f_star);

struct DiagnosticsOptions {
  std::optional<Vector> x_star;
  std::optional<double> f_star;
  std::optional<Vector> anchor;  // z for h_anchor; defaults to x_star
  /// False when f_star is merely the best observed value ("relative mode").
  bool f_star_exact = true;
};

std::vector<EnergyRecord> energy_records(const DynamicSpec& spec,
                                         const Trajectory& traj,
                                         const DiagnosticsOptions& opts);

struct Verdict {
  std::string name;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

// Pinned check tolerances.
namespace tol {
inline constexpr double w_monotone_rel = 1e-6;   // per step, scaled by 1+|W|
inline constexpr double energy_floor = 1e-10;    // E, calE >= -this
inline constexpr double quasi_descent_rel = 1e-5;  // scaled by 1+calE(t0)
inline constexpr double plateau_fraction = 0.05;
inline constexpr double t2_decay_ratio = 0.5;
inline constexpr double h_anchor_oscillation = 0.05;
inline constexpr double rate_slope_max = -1.8;
}  // namespace tol

/// W(t_{k+1}) <= W(t_k) + 1e-6 (1 + |W(t_k)|). Violations are reported
/// normalized by 1 + |W(t_k)|.
Verdict check_w_monotone(const std::vector<EnergyRecord>& recs);
Verdict check_e_nonneg(const std::vector<EnergyRecord>& recs);
Verdict check_calE_nonneg(const std::vector<EnergyRecord>& recs);

/// calE(t_j) - calE(t_i) <= 2 (alpha-1) kappa int_{t_i}^{t_j} s mu(s) ds
/// + 1e-5 (1 + calE(t0)), for every sample pair i < j. Requires alpha >= 3.
Verdict check_quasi_descent(const Trajectory& traj, const DynamicSpec& spec,
                            const Vector& x_star);
Verdict check_wg_monotone(const DynamicSpec& spec, const Trajectory& traj,
                          double f_star);

/// Increment of a running integral over the final decade (the last tenth of
/// the horizon) must be <= 5% of its total.
Verdict check_plateau(const std::vector<EnergyRecord>& recs,
                      double EnergyRecord::*field, const std::string& name);
/// t^2 gap at t_end does not exceed its running maximum past t0 + 1.
Verdict check_t2_gap_bounded(const std::vector<EnergyRecord>& recs);
/// t^2 gap at t_end <= 0.5 x its envelope near t_end / 4.
Verdict check_t2_gap_decay(const std::vector<EnergyRecord>& recs);
/// Oscillation of h_anchor over the final decade, relative to the peak of
/// h_anchor over the whole run, is <= 5%.
Verdict check_h_anchor_stable(const std::vector<EnergyRecord>& recs);
/// ||v(t_end)|| <= 0.1 x max ||v|| over the first decade of the horizon.
Verdict check_velocity_vanishing(const Trajectory& traj);

/// Every check that the supplied references make applicable.
std::vector<Verdict> run_standard_checks(const DynamicSpec& spec,
                                         const Trajectory& traj,
                                         const DiagnosticsOptions& opts);

/// Least-squares slope of log(f_raw - f_star) vs log t over [t_a, t_b].
/// Samples with gap <= 1e-16 are dropped; fewer than 10 usable samples is an
/// error.
double fit_rate(const Trajectory& traj, double f_star, double t_a, double t_b);

/// t^2 gap at the sample nearest T divided by its value at the sample
/// nearest T/4.
double decay_ratio(const Trajectory& traj, double f_star, double T);

}  // namespace sidyn
