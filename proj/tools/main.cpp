#include "sidyn/experiment.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{
      "sidyn: nonsmooth convex minimization by integrating a damped "
      "second-order dynamic on a smoothed objective, with energy-based "
      "convergence diagnostics"};
  app.require_subcommand(1);

  // run
  std::string config_path;
  bool strict = false;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int parallel = 0;
  auto* run = app.add_subcommand("run", "run a configured experiment");
  run->add_option("--config", config_path, "JSON run configuration")
      ->required();
  run->add_flag("--strict", strict,
                "reject schedules that fail the integrability gate");
  run->add_option("--out", out_dir, "output directory (overrides config)");
  run->add_option("--seed", seed, "initial-point seed (overrides config)")
      ->each([&](const std::string&) { seed_given = true; });
  run->add_option("--parallel", parallel, "worker threads for multiple runs");

  // verify
  std::vector<std::string> targets;
  auto* verify = app.add_subcommand(
      "verify", "certify built-in smoothings and preset objectives");
  verify->add_option(
      "targets", targets,
      "subset of {sqrt_abs, logexp_plus, ex1, ex2, ex3}; default all");

  // rates
  std::string csv_path;
  double f_star = 0.0;
  std::vector<double> window{10.0, 100.0};
  auto* rates = app.add_subcommand(
      "rates", "fit the convergence-rate slope of a trajectory CSV");
  rates->add_option("csv", csv_path, "trajectory CSV from 'run'")->required();
  rates->add_option("--f-star", f_star, "optimal value")->required();
  rates->add_option("--window", window, "fit window [t_a t_b]")
      ->expected(2);

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return sidyn::cmd_run(
        config_path, strict,
        out_dir.empty() ? std::nullopt : std::make_optional(out_dir),
        seed_given ? std::make_optional(seed) : std::nullopt, parallel);
  }
  if (verify->parsed()) return sidyn::cmd_verify(targets);
  if (rates->parsed())
    return sidyn::cmd_rates(csv_path, f_star, window[0], window[1]);
  return 2;
}
