#include "sidyn/experiment.hpp"

#include "sidyn/rng.hpp"
#include "svg.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

namespace sidyn {

namespace fs = std::filesystem;

namespace {

const char* kSeriesColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                               "#bcbd22", "#17becf"};

double json_num(const nlohmann::json& j, const std::string& key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number())
    throw ConfigError("config: '" + key + "' must be a number");
  return j.at(key).get<double>();
}

std::string run_dir_name(int index) {
  std::ostringstream os;
  os << "run_" << std::setfill('0') << std::setw(3) << index;
  return os.str();
}

}  // namespace

ResolvedRun resolve_run_config(const nlohmann::json& cfg, bool strict) {
  if (!cfg.is_object()) throw ConfigError("config: top level must be an object");

  // Problem selection.
  std::string preset_id;
  int mA = 20, mD = 50, nn = 10;
  std::uint64_t problem_seed = 1002;
  bool custom = false;
  if (cfg.contains("problem")) {
    const auto& pj = cfg.at("problem");
    if (pj.contains("preset")) {
      preset_id = pj.at("preset").get<std::string>();
    } else if (pj.contains("custom")) {
      custom = true;
      const auto& cj = pj.at("custom");
      mA = static_cast<int>(json_num(cj, "mA", mA));
      mD = static_cast<int>(json_num(cj, "mD", mD));
      nn = static_cast<int>(json_num(cj, "n", nn));
      problem_seed =
          static_cast<std::uint64_t>(json_num(cj, "seed", 1002.0));
    } else {
      throw ConfigError("config: problem needs 'preset' or 'custom'");
    }
  } else {
    preset_id = "ex1";
  }

  Preset base = [&] {
    try {
      if (custom) {
        Preset p = preset("ex2");  // carries the shared defaults
        p.problem = build_random_l2l1(mA, mD, nn, problem_seed);
        p.spec = DynamicSpec::make(p.spec.alpha, p.spec.t0,
                                   p.problem.objective, p.spec.schedule);
        return p;
      }
      return preset(preset_id);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }();

  // Dynamic / schedule / perturbation / integrator overrides.
  double alpha = base.spec.alpha;
  double t0 = base.spec.t0;
  if (cfg.contains("dynamic")) {
    alpha = json_num(cfg.at("dynamic"), "alpha", alpha);
    t0 = json_num(cfg.at("dynamic"), "t0", t0);
  }
  if (!(alpha > 0.0)) throw ConfigError("config: dynamic.alpha must be > 0");
  if (!(t0 > 0.0)) throw ConfigError("config: dynamic.t0 must be > 0");

  MuSchedule schedule = base.spec.schedule;
  {
    std::string kind = schedule.kind() == MuSchedule::Kind::power_law
                           ? "power_law"
                           : "exponential";
    double c = schedule.c();
    double decay = schedule.decay();
    if (cfg.contains("schedule")) {
      const auto& sj = cfg.at("schedule");
      if (sj.contains("kind")) kind = sj.at("kind").get<std::string>();
      c = json_num(sj, "c", c);
      decay = json_num(sj, kind == "power_law" ? "p" : "r",
                       kind == "power_law" ? decay : 1.0);
    }
    try {
      schedule = kind == "power_law" ? MuSchedule::power_law(c, decay, t0)
                 : kind == "exponential"
                     ? MuSchedule::exponential(c, decay, t0)
                     : throw ConfigError("config: schedule.kind must be "
                                         "power_law or exponential");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }

  Perturbation pert = base.spec.perturbation;
  if (cfg.contains("perturbation")) {
    const auto& gj = cfg.at("perturbation");
    const std::string kind = gj.value("kind", "exponential_decay");
    if (kind == "none") {
      pert = Perturbation::none();
    } else if (kind == "exponential_decay") {
      const double a = json_num(gj, "a", 20.0);
      const double b = json_num(gj, "b", 1.0);
      Vector dir;
      if (gj.contains("direction_seed")) {
        CounterRng rng(static_cast<std::uint64_t>(
            json_num(gj, "direction_seed", 0.0)));
        dir.resize(base.problem.objective.dim());
        for (int i = 0; i < dir.size(); ++i) dir[i] = rng.normal();
      } else {
        dir = Vector::Ones(base.problem.objective.dim());
      }
      try {
        pert = Perturbation::exponential_decay(a, b, dir);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    } else {
      throw ConfigError("config: perturbation.kind must be none or "
                        "exponential_decay");
    }
  }

  IntegratorConfig icfg = base.config;
  if (cfg.contains("integrator")) {
    const auto& ij = cfg.at("integrator");
    icfg.rtol = json_num(ij, "rtol", icfg.rtol);
    icfg.atol = json_num(ij, "atol", icfg.atol);
    icfg.h_init = json_num(ij, "h_init", icfg.h_init);
    icfg.h_min = json_num(ij, "h_min", icfg.h_min);
    icfg.h_max = json_num(ij, "h_max", icfg.h_max);
    icfg.eta_stability = json_num(ij, "eta_stability", icfg.eta_stability);
    icfg.t_end = json_num(ij, "t_end", icfg.t_end);
    icfg.record_every = json_num(ij, "record_every", icfg.record_every);
    if (ij.contains("store_dense"))
      icfg.store_dense = ij.at("store_dense").get<bool>();
  }

  DynamicSpec spec =
      DynamicSpec::make(alpha, t0, base.problem.objective, schedule, pert);
  ResolvedRun rr{std::move(base.problem),
                 std::move(spec),
                 icfg,
                 {},
                 cfg.value("out", std::string("runs/out")),
                 static_cast<int>(json_num(cfg, "parallel", 1.0)),
                 {},
                 {}};

  try {
    rr.config.validate(t0);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  // Integrability gate on the schedule.
  const auto h1 = schedule.check_h1();
  if (!h1.certified) {
    const std::string msg =
        "schedule fails the integrability gate h1 (int t*mu(t) dt diverges): " +
        h1.reason;
    if (strict) throw ConfigError("config: " + msg);
    rr.warnings.push_back(msg);
  }

  // Initial points.
  int count = 1;
  double box_lo = -5.0, box_hi = 5.0;
  std::uint64_t init_seed = 12345;
  const int dim = rr.problem.objective.dim();
  if (cfg.contains("initial") && cfg.at("initial").contains("points")) {
    for (const auto& pj : cfg.at("initial").at("points")) {
      Vector x0(dim);
      if (static_cast<int>(pj.size()) != dim)
        throw ConfigError("config: initial point dimension mismatch");
      for (int i = 0; i < dim; ++i) x0[i] = pj.at(i).get<double>();
      rr.initial_points.push_back(std::move(x0));
    }
    if (rr.initial_points.empty())
      throw ConfigError("config: initial.points is empty");
  } else {
    if (cfg.contains("initial")) {
      const auto& ij = cfg.at("initial");
      count = static_cast<int>(json_num(ij, "count", 1.0));
      if (ij.contains("box")) {
        box_lo = ij.at("box").at(0).get<double>();
        box_hi = ij.at("box").at(1).get<double>();
      }
      init_seed = static_cast<std::uint64_t>(json_num(ij, "seed", 12345.0));
    }
    try {
      rr.initial_points =
          sample_initial_points(count, dim, box_lo, box_hi, init_seed);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  if (rr.parallel < 1) throw ConfigError("config: parallel must be >= 1");

  // Fully resolved echo.
  nlohmann::json echo;
  echo["problem"] = custom
                        ? nlohmann::json{{"custom",
                                          {{"mA", mA},
                                           {"mD", mD},
                                           {"n", nn},
                                           {"seed", problem_seed}}}}
                        : nlohmann::json{{"preset", preset_id}};
  echo["provenance"] = to_json(rr.problem.provenance);
  echo["f_star"] = rr.problem.f_star;
  echo["dynamic"] = spec_echo(rr.spec);
  echo["integrator"] = config_echo(rr.config);
  if (cfg.contains("initial") && cfg.at("initial").contains("points")) {
    echo["initial"] = cfg.at("initial");
  } else {
    echo["initial"] = {{"count", count},
                       {"box", {box_lo, box_hi}},
                       {"seed", init_seed}};
  }
  echo["out"] = rr.out_dir;
  echo["parallel"] = rr.parallel;
  echo["strict"] = strict;
  echo["warnings"] = rr.warnings;
  rr.echo = std::move(echo);
  return rr;
}

namespace {

RunResult process_one_run(const ResolvedRun& rr, int index,
                          const fs::path& out_root) {
  const auto t_start = std::chrono::steady_clock::now();
  const Vector& x0 = rr.initial_points[index];
  const Vector v0 = Vector::Zero(x0.size());

  Trajectory traj = integrate(rr.spec, rr.config, x0, v0);

  DiagnosticsOptions opts;
  opts.x_star = rr.problem.x_star;
  opts.f_star = rr.problem.f_star;
  // Anchor at the point the run actually approaches: for the segment-valued
  // optimal set, the projection of the final iterate; otherwise x_star.
  const Vector& x_final = traj.samples.back().x;
  if (rr.problem.provenance.example_id.rfind("ex1", 0) == 0)
    opts.anchor = project_example1_optimal(x_final);
  else if (rr.problem.x_star)
    opts.anchor = rr.problem.x_star;

  const auto recs = energy_records(rr.spec, traj, opts);
  auto verdicts = run_standard_checks(rr.spec, traj, opts);

  RunResult res;
  res.index = index;
  res.accepted_steps = traj.accepted_steps;
  res.rejected_steps = traj.rejected_steps;
  res.truncated = traj.truncated;
  res.final_gap = traj.samples.back().f_raw - rr.problem.f_star;
  res.final_dist = rr.problem.dist_to_opt
                       ? rr.problem.dist_to_opt(x_final)
                       : std::numeric_limits<double>::quiet_NaN();
  const double T = traj.t_final();
  try {
    res.slope = fit_rate(traj, rr.problem.f_star, std::max(T / 10.0, rr.spec.t0),
                         T);
  } catch (const std::invalid_argument&) {
    res.slope = std::numeric_limits<double>::quiet_NaN();
  }
  res.ratio = decay_ratio(traj, rr.problem.f_star, T);
  res.verdicts = verdicts;
  res.all_pass = !traj.truncated;
  for (const auto& v : verdicts) res.all_pass = res.all_pass && v.pass;

  // Per-run artifacts.
  const fs::path dir = out_root / run_dir_name(index);
  fs::create_directories(dir);
  nlohmann::json meta{{"config", rr.echo},
                      {"run_index", index},
                      {"x0", std::vector<double>(x0.begin(), x0.end())}};
  write_trajectory_csv((dir / "trajectory.csv").string(), traj, meta);
  write_diagnostics_csv((dir / "diagnostics.csv").string(), recs);
  std::ofstream vf(dir / "verdicts.json");
  vf << nlohmann::json{{"config", rr.echo},
                       {"run_index", index},
                       {"verdicts", to_json(verdicts)},
                       {"all_pass", res.all_pass}}
            .dump(2)
     << "\n";

  res.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t_start)
                    .count();
  return res;
}

}  // namespace

ExperimentSummary run_experiment(const ResolvedRun& rr) {
  const fs::path out_root(rr.out_dir);
  fs::create_directories(out_root);

  const int n_runs = static_cast<int>(rr.initial_points.size());
  ExperimentSummary summary;
  summary.runs.resize(n_runs);

  const int workers = std::min(rr.parallel, n_runs);
  if (workers <= 1) {
    for (int i = 0; i < n_runs; ++i)
      summary.runs[i] = process_one_run(rr, i, out_root);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n_runs; i = next.fetch_add(1))
          summary.runs[i] = process_one_run(rr, i, out_root);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (const auto& r : summary.runs)
    summary.all_pass = summary.all_pass && r.all_pass;

  // Summary JSON.
  nlohmann::json runs_json = nlohmann::json::array();
  for (const auto& r : summary.runs) {
    runs_json.push_back({{"index", r.index},
                         {"final_gap", r.final_gap},
                         {"final_dist", r.final_dist},
                         {"slope", r.slope},
                         {"decay_ratio", r.ratio},
                         {"seconds", r.seconds},
                         {"accepted_steps", r.accepted_steps},
                         {"rejected_steps", r.rejected_steps},
                         {"truncated", r.truncated},
                         {"all_pass", r.all_pass},
                         {"energy_verdicts", to_json(r.verdicts)}});
  }
  std::ofstream sf(out_root / "summary.json");
  sf << nlohmann::json{{"config", rr.echo},
                       {"runs", runs_json},
                       {"all_pass", summary.all_pass}}
            .dump(2)
     << "\n";

  // Plots: objective gap on log-log axes; the planar trajectory when n = 2.
  {
    std::vector<SvgSeries> series;
    for (int i = 0; i < n_runs; ++i) {
      Trajectory traj =
          read_trajectory_csv((out_root / run_dir_name(i) / "trajectory.csv")
                                  .string());
      SvgSeries s;
      s.color = kSeriesColors[i % 10];
      for (const auto& smp : traj.samples) {
        s.x.push_back(smp.t);
        s.y.push_back(smp.f_raw - rr.problem.f_star);
      }
      series.push_back(std::move(s));
    }
    write_svg_plot((out_root / "gap_loglog.svg").string(),
                   {"objective gap vs time", "t", "f(x(t)) - f*", true, true},
                   series);

    if (rr.problem.objective.dim() == 2) {
      std::vector<SvgSeries> plane;
      for (int i = 0; i < n_runs; ++i) {
        Trajectory traj = read_trajectory_csv(
            (out_root / run_dir_name(i) / "trajectory.csv").string());
        SvgSeries s;
        s.color = kSeriesColors[i % 10];
        for (const auto& smp : traj.samples) {
          s.x.push_back(smp.x[0]);
          s.y.push_back(smp.x[1]);
        }
        plane.push_back(std::move(s));
      }
      if (rr.problem.provenance.example_id.rfind("ex1", 0) == 0) {
        SvgSeries seg;
        seg.color = "#000000";
        seg.label = "optimal set";
        seg.x = {0.0, 0.5};
        seg.y = {0.5, 0.0};
        plane.push_back(std::move(seg));
      }
      write_svg_plot((out_root / "trajectory_plane.svg").string(),
                     {"trajectories", "x_1", "x_2", false, false}, plane);
    }
  }
  return summary;
}

std::vector<std::pair<std::string, CertificationReport>> verify_reports(
    const std::vector<std::string>& targets) {
  std::vector<std::string> which = targets;
  if (which.empty()) which = {"sqrt_abs", "logexp_plus", "ex1", "ex2", "ex3"};

  std::vector<std::pair<std::string, CertificationReport>> out;
  for (const auto& name : which) {
    if (name == "sqrt_abs" || name == "logexp_plus") {
      auto f = lift_separable(name == "sqrt_abs"
                                  ? ScalarSmoothing::sqrt_abs()
                                  : ScalarSmoothing::logexp_plus(),
                              1);
      out.emplace_back(name, certify(f, DomainSampler::box(1, -10, 10, 1000)));
    } else {
      Preset p = preset(name);
      const int dim = p.problem.objective.dim();
      const int samples = dim <= 2 ? 1000 : dim <= 10 ? 500 : 200;
      out.emplace_back(
          name, certify(p.problem.objective,
                        DomainSampler::box(dim, -10, 10, samples)));
    }
  }
  return out;
}

int cmd_run(const std::string& config_path, bool strict,
            const std::optional<std::string>& out_override,
            const std::optional<std::uint64_t>& seed_override, int parallel) {
  nlohmann::json cfg;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file: " + config_path);
    cfg = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << nlohmann::json{{"error", "invalid config JSON"},
                                {"detail", e.what()}}
                     .dump()
              << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 2;
  }

  if (out_override) cfg["out"] = *out_override;
  if (seed_override) {
    // --seed selects seeded box sampling, superseding explicit points.
    nlohmann::json init = cfg.value("initial", nlohmann::json::object());
    init.erase("points");
    init["seed"] = *seed_override;
    cfg["initial"] = init;
  }
  if (parallel > 0) cfg["parallel"] = parallel;

  try {
    ResolvedRun rr = resolve_run_config(cfg, strict);
    for (const auto& w : rr.warnings)
      std::cerr << "warning: " << w << "\n";
    ExperimentSummary summary = run_experiment(rr);
    for (const auto& r : summary.runs) {
      std::cout << "run " << r.index << ": final_gap=" << r.final_gap
                << " slope=" << r.slope << " decay_ratio=" << r.ratio
                << (r.all_pass ? " [pass]" : " [FAIL]") << "\n";
    }
    std::cout << (summary.all_pass ? "all runs pass" : "FAILURES present")
              << "; outputs in " << rr.out_dir << "\n";
    return summary.all_pass ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << nlohmann::json{{"error", std::string("invalid config: ") +
                                              e.what()}}
                     .dump()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
}

int cmd_verify(const std::vector<std::string>& targets) {
  try {
    bool all = true;
    for (const auto& [name, report] : verify_reports(targets)) {
      std::cout << name << ":\n";
      for (const auto& c : report.checks) {
        std::cout << "  " << std::left << std::setw(20) << c.condition
                  << " max_observed=" << std::setw(14) << c.max_observed
                  << " bound=" << std::setw(14) << c.bound
                  << (c.pass ? " pass" : " FAIL") << "\n";
      }
      all = all && report.all_pass();
    }
    std::cout << (all ? "certification: all pass" : "certification: FAIL")
              << "\n";
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 2;
  }
}

int cmd_rates(const std::string& csv_path, double f_star, double t_a,
              double t_b) {
  try {
    Trajectory traj = read_trajectory_csv(csv_path);
    const double slope = fit_rate(traj, f_star, t_a, t_b);
    const double ratio = decay_ratio(traj, f_star, t_b);
    std::cout << "slope=" << slope << " decay_ratio=" << ratio << "\n";
    const bool pass = slope <= tol::rate_slope_max && ratio <= tol::t2_decay_ratio;
    std::cout << (pass ? "rates: pass" : "rates: FAIL") << "\n";
    return pass ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 2;
  }
}

}  // namespace sidyn
