#pragma once

#include "sidyn/diagnostics.hpp"
#include "sidyn/problems.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace sidyn {

/// Fixed column order: t, x_0..x_{n-1}, v_0..v_{n-1}, f_raw, f_smooth,
/// grad_norm, step_size. Metadata rides along as leading '# key=json' lines.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const nlohmann::json& meta = {});

/// Reads a trajectory CSV written by write_trajectory_csv ('#' lines are
/// skipped). Dense segments are not reconstructed.
Trajectory read_trajectory_csv(const std::string& path);

void write_diagnostics_csv(const std::string& path,
                           const std::vector<EnergyRecord>& recs);

nlohmann::json to_json(const CertificationCheck& check);
nlohmann::json to_json(const CertificationReport& report);
nlohmann::json to_json(const Verdict& verdict);
nlohmann::json to_json(const std::vector<Verdict>& verdicts);
nlohmann::json to_json(const Provenance& prov);

/// Serializable echo of the dynamic (alpha, t0, schedule, perturbation and
/// the objective's certified constants).
nlohmann::json spec_echo(const DynamicSpec& spec);
nlohmann::json config_echo(const IntegratorConfig& config);

}  // namespace sidyn
