#include "sidyn/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace sidyn {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << std::setprecision(17);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const nlohmann::json& meta) {
  auto out = open_out(path);
  if (!meta.is_null() && !meta.empty()) out << "# meta=" << meta.dump() << "\n";
  for (const auto& ev : traj.events)
    out << "# event t=" << ev.t << " " << ev.what << "\n";

  const int n = traj.dim();
  out << "t";
  for (int i = 0; i < n; ++i) out << ",x_" << i;
  for (int i = 0; i < n; ++i) out << ",v_" << i;
  out << ",f_raw,f_smooth,grad_norm,step_size\n";
  for (const auto& s : traj.samples) {
    out << s.t;
    for (int i = 0; i < n; ++i) out << "," << s.x[i];
    for (int i = 0; i < n; ++i) out << "," << s.v[i];
    out << "," << s.f_raw << "," << s.f_smooth << "," << s.grad_norm << ","
        << s.step_size << "\n";
  }
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);

  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  if (header.empty())
    throw std::runtime_error("malformed trajectory CSV (no header): " + path);

  int n = 0;
  for (const auto& col : header)
    if (col.rfind("x_", 0) == 0) ++n;
  if (header.size() != static_cast<std::size_t>(2 * n + 5) || header[0] != "t")
    throw std::runtime_error("malformed trajectory CSV header: " + path);

  Trajectory traj;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size())
      throw std::runtime_error("malformed trajectory CSV row: " + path);
    TrajectorySample s;
    std::size_t c = 0;
    auto next = [&] { return std::stod(cells.at(c++)); };
    s.t = next();
    s.x.resize(n);
    s.v.resize(n);
    for (int i = 0; i < n; ++i) s.x[i] = next();
    for (int i = 0; i < n; ++i) s.v[i] = next();
    s.f_raw = next();
    s.f_smooth = next();
    s.grad_norm = next();
    s.step_size = next();
    traj.samples.push_back(std::move(s));
  }
  if (traj.samples.empty())
    throw std::runtime_error("trajectory CSV has no samples: " + path);
  return traj;
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<EnergyRecord>& recs) {
  auto out = open_out(path);
  out << "t,W,E,calE,t2_gap,t2_E,h_anchor,int_t_gap,int_t_speed,"
         "int_invt_speed\n";
  for (const auto& r : recs) {
    out << r.t << "," << r.W << "," << r.E << "," << r.calE << "," << r.t2_gap
        << "," << r.t2_E << "," << r.h_anchor << "," << r.int_t_gap << ","
        << r.int_t_speed << "," << r.int_invt_speed << "\n";
  }
}

nlohmann::json to_json(const CertificationCheck& check) {
  return {{"condition", check.condition},
          {"max_observed", check.max_observed},
          {"bound", check.bound},
          {"pass", check.pass}};
}

nlohmann::json to_json(const CertificationReport& report) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : report.checks) arr.push_back(to_json(c));
  return {{"checks", arr}, {"all_pass", report.all_pass()}};
}

nlohmann::json to_json(const Verdict& verdict) {
  return {{"name", verdict.name},
          {"max_violation", verdict.max_violation},
          {"tolerance", verdict.tolerance},
          {"pass", verdict.pass}};
}

nlohmann::json to_json(const std::vector<Verdict>& verdicts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : verdicts) arr.push_back(to_json(v));
  return arr;
}

nlohmann::json to_json(const Provenance& prov) {
  nlohmann::json j{{"example_id", prov.example_id},
                   {"seed", prov.seed},
                   {"dims", prov.dims}};
  if (prov.sigma_max_A > 0.0) j["sigma_max_A"] = prov.sigma_max_A;
  if (prov.sigma_max_D > 0.0) j["sigma_max_D"] = prov.sigma_max_D;
  return j;
}

nlohmann::json spec_echo(const DynamicSpec& spec) {
  nlohmann::json sched{
      {"kind", spec.schedule.kind() == MuSchedule::Kind::power_law
                   ? "power_law"
                   : "exponential"},
      {"c", spec.schedule.c()},
      {spec.schedule.kind() == MuSchedule::Kind::power_law ? "p" : "r",
       spec.schedule.decay()},
      {"t0", spec.schedule.t0()}};
  nlohmann::json pert;
  if (spec.perturbation.is_none()) {
    pert = {{"kind", "none"}};
  } else {
    pert = {{"kind", "exponential_decay"},
            {"a", spec.perturbation.amplitude()},
            {"b", spec.perturbation.decay_rate()},
            {"direction", std::vector<double>(
                              spec.perturbation.direction().begin(),
                              spec.perturbation.direction().end())}};
  }
  return {{"alpha", spec.alpha},
          {"t0", spec.t0},
          {"schedule", sched},
          {"perturbation", pert},
          {"objective",
           {{"dim", spec.objective.dim()},
            {"kappa", spec.objective.kappa()},
            {"lip_nonsmooth", spec.objective.lip_nonsmooth()},
            {"lip_smooth", spec.objective.lip_smooth()}}}};
}

nlohmann::json config_echo(const IntegratorConfig& config) {
  return {{"rtol", config.rtol},
          {"atol", config.atol},
          {"h_init", config.h_init},
          {"h_min", config.h_min},
          {"h_max", config.h_max},
          {"eta_stability", config.eta_stability},
          {"t_end", config.t_end},
          {"record_every", config.record_every},
          {"store_dense", config.store_dense}};
}

}  // namespace sidyn
