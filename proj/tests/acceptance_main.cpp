// Acceptance suite: every criterion prints one PASS/FAIL line; the process
// exits 0 only if all criteria pass.

#include "sidyn/diagnostics.hpp"
#include "sidyn/experiment.hpp"
#include "sidyn/problems.hpp"

#include "test_util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace sidyn;
using namespace sidyn::testing;

namespace {

struct Criterion {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct Ex1Run {
  Trajectory traj;
  std::vector<EnergyRecord> recs;
  DiagnosticsOptions opts;
  double seconds = 0.0;
};

std::vector<Ex1Run> g_ex1_runs;  // shared by criteria 3, 4 and 9

std::vector<Ex1Run> run_example1(const Preset& p, int count,
                                 std::uint64_t seed) {
  std::vector<Ex1Run> runs;
  for (const Vector& x0 :
       sample_initial_points(count, 2, -5.0, 5.0, seed)) {
    const auto t0 = std::chrono::steady_clock::now();
    Ex1Run run;
    run.traj = integrate(p.spec, p.config, x0, Vector::Zero(2));
    run.seconds = seconds_since(t0);
    run.opts.x_star = p.problem.x_star;
    run.opts.f_star = p.problem.f_star;
    run.opts.anchor = project_example1_optimal(run.traj.samples.back().x);
    run.recs = energy_records(p.spec, run.traj, run.opts);
    runs.push_back(std::move(run));
  }
  return runs;
}

// 1. Definition certification on the built-in smoothings and presets.
Criterion criterion1() {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& [name, report] : verify_reports()) {
    c.require(report.all_pass(), name + " certification failed");
  }
  const double secs = seconds_since(t0);
  c.require(secs < 60.0, "certification took too long");
  c.detail << " [" << secs << " s]";
  return c;
}

// 2. Integrator against the closed-form quadratic solution.
Criterion criterion2() {
  Criterion c;
  const auto spec = bessel_spec();
  IntegratorConfig cfg;
  cfg.t_end = 50.0;
  const Vector x0 = vec1(bessel_oracle_x(1.0));
  const Vector v0 = vec1(bessel_oracle_v(1.0));

  auto max_err = [&](const IntegratorConfig& conf) {
    const Trajectory traj = integrate(spec, conf, x0, v0);
    double err = 0.0;
    for (const auto& s : traj.samples)
      err = std::max(err, std::abs(s.x[0] - bessel_oracle_x(s.t)));
    return err;
  };

  const double err_default = max_err(cfg);
  c.require(err_default <= 1e-6, "max error above 1e-6");
  IntegratorConfig tight = cfg;
  tight.rtol *= 0.5;
  tight.atol *= 0.5;
  const double err_tight = max_err(tight);
  c.require(2.0 * err_tight <= err_default,
            "halved tolerances did not halve the error");
  c.detail << " [err=" << err_default << ", halved=" << err_tight << "]";
  return c;
}

// 3. Example 1, ten seeded starts: rate, decay and distance targets.
Criterion criterion3() {
  Criterion c;
  const auto p = preset("ex1");
  g_ex1_runs = run_example1(p, 10, 12345);

  double worst_ratio = 0.0, worst_slope = -1e300, worst_dist = 0.0,
         worst_secs = 0.0;
  for (const auto& run : g_ex1_runs) {
    const double T = run.traj.t_final();
    const double ratio = decay_ratio(run.traj, 0.75, T);
    const double slope = fit_rate(run.traj, 0.75, 10.0, 100.0);
    const double dist =
        p.problem.dist_to_opt(run.traj.samples.back().x);
    worst_ratio = std::max(worst_ratio, ratio);
    worst_slope = std::max(worst_slope, slope);
    worst_dist = std::max(worst_dist, dist);
    worst_secs = std::max(worst_secs, run.seconds);
  }
  c.require(worst_ratio <= 0.5, "t^2-gap decay ratio above 0.5");
  c.require(worst_slope <= -1.8, "log-log slope above -1.8");
  c.require(worst_dist <= 1e-2, "distance to the optimal set above 1e-2");
  c.require(worst_secs < 30.0, "a run exceeded 30 s");
  c.detail << " [worst: ratio=" << worst_ratio << ", slope=" << worst_slope
           << ", dist=" << worst_dist << ", " << worst_secs << " s/run]";
  return c;
}

// 4. Energy inequalities along every Example-1 run.
Criterion criterion4() {
  Criterion c;
  const auto p = preset("ex1");
  if (g_ex1_runs.empty()) g_ex1_runs = run_example1(p, 10, 12345);
  for (std::size_t i = 0; i < g_ex1_runs.size(); ++i) {
    const auto& run = g_ex1_runs[i];
    const auto tag = [&](const char* what) {
      return "run " + std::to_string(i) + ": " + what;
    };
    c.require(check_w_monotone(run.recs).pass, tag("W not monotone"));
    c.require(check_e_nonneg(run.recs).pass, tag("E negative"));
    c.require(check_quasi_descent(run.traj, p.spec, *p.problem.x_star).pass,
              tag("calE quasi-descent violated"));
    c.require(check_plateau(run.recs, &EnergyRecord::int_t_gap, "fkc").pass,
              tag("int t*gap does not plateau"));
    c.require(check_plateau(run.recs, &EnergyRecord::int_t_speed, "fkd").pass,
              tag("int t*speed^2 does not plateau"));
    c.require(
        check_plateau(run.recs, &EnergyRecord::int_invt_speed, "q8").pass,
        tag("int speed^2/t does not plateau"));
  }
  return c;
}

// 5. Perturbed stability: g(t) = 20 e^{-t}, four seeded starts.
Criterion criterion5() {
  Criterion c;
  const auto p = preset("ex1_perturbed");
  const auto runs = run_example1(p, 4, 12345);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    const auto tag = [&](const char* what) {
      return "run " + std::to_string(i) + ": " + what;
    };
    const double T = run.traj.t_final();
    c.require(decay_ratio(run.traj, 0.75, T) <= 0.5, tag("decay ratio"));
    c.require(fit_rate(run.traj, 0.75, 10.0, 100.0) <= -1.8, tag("slope"));
    c.require(p.problem.dist_to_opt(run.traj.samples.back().x) <= 1e-2,
              tag("distance"));
    c.require(check_wg_monotone(p.spec, run.traj, 0.75).pass,
              tag("W_g not monotone"));
  }
  return c;
}

// 6. Examples 2 and 3 converge at the advertised rate.
Criterion criterion6() {
  Criterion c;
  for (const char* id : {"ex2", "ex3"}) {
    const auto p = preset(id);
    const auto x0 =
        sample_initial_points(1, p.problem.objective.dim(), -5.0, 5.0, 777)[0];
    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory traj = integrate(p.spec, p.config, x0, Vector::Zero(x0.size()));
    const double secs = seconds_since(t0);
    const double T = traj.t_final();
    const double slope = fit_rate(traj, 0.0, 10.0, T);
    const double ratio = decay_ratio(traj, 0.0, T);
    c.require(slope <= -1.8, std::string(id) + ": slope above -1.8");
    c.require(ratio <= 0.5, std::string(id) + ": decay ratio above 0.5");
    if (std::string(id) == "ex3")
      c.require(secs < 300.0, "ex3 exceeded 5 minutes");
    c.detail << " [" << id << ": slope=" << slope << ", ratio=" << ratio
             << ", " << secs << " s]";
  }
  return c;
}

// 7. Parameter-sweep sanity on Example 2.
Criterion criterion7() {
  Criterion c;
  const auto p = preset("ex2");
  const Vector x0 = sample_initial_points(1, 10, -5.0, 5.0, 6)[0];

  auto final_gap = [&](double alpha, double mu_exponent, double t_end) {
    const auto sched = MuSchedule::power_law(1.0, mu_exponent, 1.0);
    const auto spec =
        DynamicSpec::make(alpha, 1.0, p.problem.objective, sched);
    IntegratorConfig cfg = p.config;
    cfg.t_end = t_end;
    const Trajectory traj = integrate(spec, cfg, x0, Vector::Zero(10));
    return traj.samples.back().f_raw - p.problem.f_star;
  };

  std::vector<double> alpha_gaps;
  for (double a : {3.1, 4.0, 7.0}) alpha_gaps.push_back(final_gap(a, 3.0, 100.0));
  c.require(alpha_gaps[0] >= alpha_gaps[1] && alpha_gaps[1] >= alpha_gaps[2],
            "final gap not nonincreasing in alpha");
  c.detail << " [alpha gaps: " << alpha_gaps[0] << " >= " << alpha_gaps[1]
           << " >= " << alpha_gaps[2] << "]";

  std::vector<double> p_gaps;
  for (double mu_p : {2.5, 3.0, 4.0}) p_gaps.push_back(final_gap(4.0, mu_p, 60.0));
  c.require(p_gaps[0] >= p_gaps[1] && p_gaps[1] >= p_gaps[2],
            "final gap not nonincreasing in the mu exponent");
  c.detail << " [p gaps: " << p_gaps[0] << " >= " << p_gaps[1]
           << " >= " << p_gaps[2] << "]";
  return c;
}

// 8. Integrability gate and closed-form integral cross-check.
Criterion criterion8() {
  Criterion c;
  const auto strict_cfg = nlohmann::json::parse(
      R"({"schedule": {"kind": "power_law", "c": 1.0, "p": 2.0}})");
  bool rejected = false;
  try {
    resolve_run_config(strict_cfg, true);
  } catch (const ConfigError&) {
    rejected = true;
  }
  c.require(rejected, "power_law p=2 not rejected under strict");
  c.require(!resolve_run_config(strict_cfg, false).warnings.empty(),
            "p=2 produced no warning without strict");

  c.require(MuSchedule::power_law(1.0, 3.0, 1.0).check_h1().certified,
            "p=3 not certified");
  c.require(MuSchedule::exponential(5.0, 0.1, 1.0).check_h1().certified,
            "exponential not certified");

  double max_rel = 0.0;
  for (const auto& s : {MuSchedule::power_law(1.0, 3.0, 1.0),
                        MuSchedule::power_law(2.0, 2.5, 1.0),
                        MuSchedule::exponential(1.0, 0.5, 1.0)}) {
    for (auto [a, b] : {std::pair{1.0, 10.0}, {2.0, 200.0}}) {
      const double closed = s.integral_t_mu(a, b);
      const double quad = integrate_simpson(
          [&](double t) {
            return t * (s.kind() == MuSchedule::Kind::power_law
                            ? s.c() * std::pow(t, -s.decay())
                            : s.c() * std::exp(-s.decay() * t));
          },
          a, b, 1e-13 * closed);
      max_rel = std::max(max_rel, std::abs(closed - quad) / closed);
    }
  }
  c.require(max_rel <= 1e-8, "closed-form integral off by more than 1e-8");
  c.detail << " [max quadrature mismatch " << max_rel << "]";
  return c;
}

// 9. Anchor distance stabilizes over the final decade.
Criterion criterion9() {
  Criterion c;
  const auto p = preset("ex1");
  if (g_ex1_runs.empty()) g_ex1_runs = run_example1(p, 10, 12345);
  double worst = 0.0;
  for (std::size_t i = 0; i < g_ex1_runs.size(); ++i) {
    const auto v = check_h_anchor_stable(g_ex1_runs[i].recs);
    worst = std::max(worst, v.max_violation);
    c.require(v.pass,
              "run " + std::to_string(i) + ": h_anchor oscillation above 5%");
  }
  c.detail << " [worst oscillation " << worst << "]";
  return c;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Criterion()>> criteria[] = {
      {"definition certification (verify)", criterion1},
      {"integrator matches the closed-form quadratic solution", criterion2},
      {"example 1: rates, decay and distance on 10 seeded runs", criterion3},
      {"example 1: energy inequalities on every run", criterion4},
      {"perturbed example 1: stability under g(t) = 20 e^{-t}", criterion5},
      {"examples 2 and 3: fast rates at scale", criterion6},
      {"alpha and mu-exponent sweep sanity on example 2", criterion7},
      {"integrability gate and closed-form integrals", criterion8},
      {"trajectory stabilization (anchor distance)", criterion9},
  };

  bool all = true;
  int index = 1;
  for (const auto& [name, fn] : criteria) {
    Criterion c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail << "exception: " << e.what();
    }
    all = all && c.pass;
    std::printf("[%s] criterion %d: %s%s\n", c.pass ? "PASS" : "FAIL", index,
                name, c.detail.str().c_str());
    std::fflush(stdout);
    ++index;
  }
  std::printf("%s\n", all ? "ACCEPTANCE: all criteria pass"
                          : "ACCEPTANCE: FAILURES present");
  return all ? 0 : 1;
}
