#pragma once

#include "sidyn/diagnostics.hpp"
#include "sidyn/io.hpp"
#include "sidyn/problems.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sidyn {

/// Invalid or rejected run configuration (maps to CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A run configuration materialized against preset defaults. `echo` is the
/// fully resolved config, embedded in every output so artifacts are
/// re-runnable from their own metadata.
struct ResolvedRun {
  ProblemInstance problem;
  DynamicSpec spec;
  IntegratorConfig config;
  std::vector<Vector> initial_points;
  std::string out_dir;
  int parallel = 1;
  nlohmann::json echo;
  std::vector<std::string> warnings;
};

/// Validates and materializes a JSON run config. Under `strict`, a schedule
/// that fails the integrability gate (int t mu(t) dt = inf) is a ConfigError;
/// otherwise it is recorded as a warning.
ResolvedRun resolve_run_config(const nlohmann::json& cfg, bool strict);

struct RunResult {
  int index = 0;
  double final_gap = 0.0;
  double final_dist = 0.0;
  double slope = 0.0;
  double ratio = 0.0;
  double seconds = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;
  bool truncated = false;
  bool all_pass = true;
  std::vector<Verdict> verdicts;
};

struct ExperimentSummary {
  std::vector<RunResult> runs;
  bool all_pass = true;
};

/// Integrates every initial point (optionally in parallel), writes
/// trajectory/diagnostics CSVs, verdict JSONs, summary.json and SVG plots
/// under out_dir.
ExperimentSummary run_experiment(const ResolvedRun& rr);

/// Certification reports for the built-in smoothings and preset objectives.
/// Empty target list means all of: sqrt_abs, logexp_plus, ex1, ex2, ex3.
std::vector<std::pair<std::string, CertificationReport>> verify_reports(
    const std::vector<std::string>& targets = {});

// CLI entry points. Exit codes: 0 pass, 1 verification/acceptance failure,
// 2 usage error.
int cmd_run(const std::string& config_path, bool strict,
            const std::optional<std::string>& out_override,
            const std::optional<std::uint64_t>& seed_override, int parallel);
int cmd_verify(const std::vector<std::string>& targets);
int cmd_rates(const std::string& csv_path, double f_star, double t_a,
              double t_b);

}  // namespace sidyn
