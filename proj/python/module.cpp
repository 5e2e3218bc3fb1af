#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sidyn/diagnostics.hpp"
#include "sidyn/experiment.hpp"
#include "sidyn/integrator.hpp"
#include "sidyn/problems.hpp"

namespace py = pybind11;
using namespace sidyn;

namespace {

py::dict report_to_dict(const CertificationReport& r) {
  py::list checks;
  for (const auto& c : r.checks) {
    py::dict d;
    d["condition"] = c.condition;
    d["max_observed"] = c.max_observed;
    d["bound"] = c.bound;
    d["pass"] = c.pass;
    checks.append(d);
  }
  py::dict out;
  out["checks"] = checks;
  out["all_pass"] = r.all_pass();
  return out;
}

}  // namespace

PYBIND11_MODULE(sidyn, m) {
  m.doc() =
      "Nonsmooth convex minimization by integrating a damped second-order "
      "dynamic on a smoothed objective, with energy-based diagnostics.";

  py::class_<ScalarSmoothing>(m, "ScalarSmoothing")
      .def_static("sqrt_abs", &ScalarSmoothing::sqrt_abs)
      .def_static("logexp_plus", &ScalarSmoothing::logexp_plus)
      .def_property_readonly("kappa_scalar", &ScalarSmoothing::kappa_scalar)
      .def_property_readonly("lip_scalar", &ScalarSmoothing::lip_scalar)
      .def("value", &ScalarSmoothing::value)
      .def("underlying", &ScalarSmoothing::underlying)
      .def("deriv_s", &ScalarSmoothing::deriv_s)
      .def("deriv_mu", &ScalarSmoothing::deriv_mu);

  py::class_<SmoothedFunction>(m, "SmoothedFunction")
      .def_property_readonly("dim", &SmoothedFunction::dim)
      .def_property_readonly("kappa", &SmoothedFunction::kappa)
      .def_property_readonly("lip_nonsmooth", &SmoothedFunction::lip_nonsmooth)
      .def_property_readonly("lip_smooth", &SmoothedFunction::lip_smooth)
      .def("grad_lipschitz", &SmoothedFunction::grad_lipschitz)
      .def("value", &SmoothedFunction::value)
      .def("underlying", &SmoothedFunction::underlying)
      .def("grad_x", &SmoothedFunction::grad_x)
      .def("grad_mu", &SmoothedFunction::grad_mu)
      .def("with_constants", &SmoothedFunction::with_constants)
      .def("__add__", [](const SmoothedFunction& a, const SmoothedFunction& b) {
        return combine_sum(a, b);
      });

  m.def("lift_separable", &lift_separable, py::arg("scalar"), py::arg("m"));
  m.def("wrap_smooth", &wrap_smooth, py::arg("value"), py::arg("grad"),
        py::arg("ell"), py::arg("dim"));
  m.def("compose_affine", &compose_affine, py::arg("f"), py::arg("A"),
        py::arg("b"));
  m.def("combine_sum", &combine_sum);
  m.def("zero_function", &zero_function);
  m.def("spectral_norm", &spectral_norm, py::arg("A"),
        py::arg("rel_tol") = 1e-8, py::arg("max_iter") = 10000);

  py::class_<DomainSampler>(m, "DomainSampler")
      .def(py::init<>())
      .def_static("box", &DomainSampler::box, py::arg("dim"), py::arg("lo"),
                  py::arg("hi"), py::arg("n_samples") = 1000,
                  py::arg("seed") = 0)
      .def_readwrite("box_lo", &DomainSampler::box_lo)
      .def_readwrite("box_hi", &DomainSampler::box_hi)
      .def_readwrite("n_samples", &DomainSampler::n_samples)
      .def_readwrite("mu_grid", &DomainSampler::mu_grid)
      .def_readwrite("seed", &DomainSampler::seed);

  m.def("certify", [](const SmoothedFunction& f, const DomainSampler& s) {
    return report_to_dict(certify(f, s));
  });

  py::class_<MuSchedule>(m, "MuSchedule")
      .def_static("power_law", &MuSchedule::power_law, py::arg("c"),
                  py::arg("p"), py::arg("t0"))
      .def_static("exponential", &MuSchedule::exponential, py::arg("c"),
                  py::arg("r"), py::arg("t0"))
      .def_property_readonly("t0", &MuSchedule::t0)
      .def_property_readonly("c", &MuSchedule::c)
      .def_property_readonly("decay", &MuSchedule::decay)
      .def("mu", &MuSchedule::mu)
      .def("mu_dot", &MuSchedule::mu_dot)
      .def("floored_at", &MuSchedule::floored_at)
      .def("integral_t_mu", &MuSchedule::integral_t_mu)
      .def("check_h1", [](const MuSchedule& s) {
        const auto rep = s.check_h1();
        py::dict d;
        d["certified"] = rep.certified;
        d["weak_certified"] = rep.weak_certified;
        d["reason"] = rep.reason;
        return d;
      });

  py::class_<Perturbation>(m, "Perturbation")
      .def_static("none", &Perturbation::none)
      .def_static("exponential_decay", &Perturbation::exponential_decay,
                  py::arg("a"), py::arg("b"), py::arg("direction"))
      .def_property_readonly("is_none", &Perturbation::is_none)
      .def("norm", &Perturbation::norm)
      .def("g", &Perturbation::g)
      .def("integral_norm", &Perturbation::integral_norm)
      .def("integral_t_norm", &Perturbation::integral_t_norm);

  py::class_<DynamicSpec>(m, "DynamicSpec")
      .def_static("make", &DynamicSpec::make, py::arg("alpha"), py::arg("t0"),
                  py::arg("objective"), py::arg("schedule"),
                  py::arg("perturbation") = Perturbation::none())
      .def_readonly("alpha", &DynamicSpec::alpha)
      .def_readonly("t0", &DynamicSpec::t0)
      .def_readonly("objective", &DynamicSpec::objective)
      .def_readonly("schedule", &DynamicSpec::schedule)
      .def_readonly("perturbation", &DynamicSpec::perturbation);

  py::class_<PhaseState>(m, "PhaseState")
      .def(py::init([](double t, Vector x, Vector v) {
             return PhaseState{t, std::move(x), std::move(v)};
           }),
           py::arg("t"), py::arg("x"), py::arg("v"))
      .def_readwrite("t", &PhaseState::t)
      .def_readwrite("x", &PhaseState::x)
      .def_readwrite("v", &PhaseState::v);

  m.def("rhs", &rhs, py::arg("spec"), py::arg("state"));
  m.def("lipschitz_bound", &lipschitz_bound, py::arg("spec"), py::arg("t"));

  py::class_<IntegratorConfig>(m, "IntegratorConfig")
      .def(py::init<>())
      .def_readwrite("rtol", &IntegratorConfig::rtol)
      .def_readwrite("atol", &IntegratorConfig::atol)
      .def_readwrite("h_init", &IntegratorConfig::h_init)
      .def_readwrite("h_min", &IntegratorConfig::h_min)
      .def_readwrite("h_max", &IntegratorConfig::h_max)
      .def_readwrite("eta_stability", &IntegratorConfig::eta_stability)
      .def_readwrite("t_end", &IntegratorConfig::t_end)
      .def_readwrite("record_every", &IntegratorConfig::record_every)
      .def_readwrite("store_dense", &IntegratorConfig::store_dense);

  py::class_<TrajectorySample>(m, "TrajectorySample")
      .def_readonly("t", &TrajectorySample::t)
      .def_readonly("x", &TrajectorySample::x)
      .def_readonly("v", &TrajectorySample::v)
      .def_readonly("f_raw", &TrajectorySample::f_raw)
      .def_readonly("f_smooth", &TrajectorySample::f_smooth)
      .def_readonly("grad_norm", &TrajectorySample::grad_norm)
      .def_readonly("step_size", &TrajectorySample::step_size);

  py::class_<TrajectoryEvent>(m, "TrajectoryEvent")
      .def_readonly("t", &TrajectoryEvent::t)
      .def_readonly("what", &TrajectoryEvent::what);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("samples", &Trajectory::samples)
      .def_readonly("events", &Trajectory::events)
      .def_readonly("truncated", &Trajectory::truncated)
      .def_readonly("accepted_steps", &Trajectory::accepted_steps)
      .def_readonly("rejected_steps", &Trajectory::rejected_steps)
      .def("t_begin", &Trajectory::t_begin)
      .def("t_final", &Trajectory::t_final)
      .def("has_dense", &Trajectory::has_dense)
      .def("interpolate", &Trajectory::interpolate)
      .def("ts", [](const Trajectory& tr) {
        Vector out(tr.samples.size());
        for (std::size_t i = 0; i < tr.samples.size(); ++i)
          out[i] = tr.samples[i].t;
        return out;
      })
      .def("f_raws", [](const Trajectory& tr) {
        Vector out(tr.samples.size());
        for (std::size_t i = 0; i < tr.samples.size(); ++i)
          out[i] = tr.samples[i].f_raw;
        return out;
      })
      .def("positions", [](const Trajectory& tr) {
        Matrix out(tr.samples.size(), tr.dim());
        for (std::size_t i = 0; i < tr.samples.size(); ++i)
          out.row(i) = tr.samples[i].x;
        return out;
      });

  m.def("integrate", &integrate, py::arg("spec"), py::arg("config"),
        py::arg("x0"), py::arg("v0"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<EnergyRecord>(m, "EnergyRecord")
      .def_readonly("t", &EnergyRecord::t)
      .def_readonly("W", &EnergyRecord::W)
      .def_readonly("E", &EnergyRecord::E)
      .def_readonly("calE", &EnergyRecord::calE)
      .def_readonly("h_anchor", &EnergyRecord::h_anchor)
      .def_readonly("t2_gap", &EnergyRecord::t2_gap)
      .def_readonly("t2_E", &EnergyRecord::t2_E)
      .def_readonly("int_t_gap", &EnergyRecord::int_t_gap)
      .def_readonly("int_t_speed", &EnergyRecord::int_t_speed)
      .def_readonly("int_invt_speed", &EnergyRecord::int_invt_speed);

  py::class_<DiagnosticsOptions>(m, "DiagnosticsOptions")
      .def(py::init<>())
      .def_readwrite("x_star", &DiagnosticsOptions::x_star)
      .def_readwrite("f_star", &DiagnosticsOptions::f_star)
      .def_readwrite("anchor", &DiagnosticsOptions::anchor)
      .def_readwrite("f_star_exact", &DiagnosticsOptions::f_star_exact);

  py::class_<Verdict>(m, "Verdict")
      .def_readonly("name", &Verdict::name)
      .def_readonly("max_violation", &Verdict::max_violation)
      .def_readonly("tolerance", &Verdict::tolerance)
      .def_readonly("pass_", &Verdict::pass)
      .def("__repr__", [](const Verdict& v) {
        return "<Verdict " + v.name + (v.pass ? " pass" : " FAIL") +
               " max_violation=" + std::to_string(v.max_violation) + ">";
      });

  m.def("energy_W", &energy_W);
  m.def("energy_E", &energy_E);
  m.def("energy_calE", &energy_calE);
  m.def("perturbed_energy_Wg", &perturbed_energy_Wg);
  m.def("energy_records", &energy_records);
  m.def("run_standard_checks", &run_standard_checks);
  m.def("check_quasi_descent", &check_quasi_descent);
  m.def("fit_rate", &fit_rate, py::arg("trajectory"), py::arg("f_star"),
        py::arg("t_a"), py::arg("t_b"));
  m.def("decay_ratio", &decay_ratio, py::arg("trajectory"), py::arg("f_star"),
        py::arg("T"));

  py::class_<Provenance>(m, "Provenance")
      .def_readonly("example_id", &Provenance::example_id)
      .def_readonly("seed", &Provenance::seed)
      .def_readonly("dims", &Provenance::dims)
      .def_readonly("sigma_max_A", &Provenance::sigma_max_A)
      .def_readonly("sigma_max_D", &Provenance::sigma_max_D);

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_readonly("objective", &ProblemInstance::objective)
      .def_readonly("f_star", &ProblemInstance::f_star)
      .def_readonly("x_star", &ProblemInstance::x_star)
      .def_readonly("provenance", &ProblemInstance::provenance)
      .def("dist_to_opt", [](const ProblemInstance& p, const Vector& x) {
        return p.dist_to_opt(x);
      });

  m.def("build_example1", &build_example1);
  m.def("build_random_l2l1", &build_random_l2l1, py::arg("mA"), py::arg("mD"),
        py::arg("n"), py::arg("seed"));
  m.def("project_example1_optimal", &project_example1_optimal);

  py::class_<Preset>(m, "Preset")
      .def_readonly("problem", &Preset::problem)
      .def_readonly("spec", &Preset::spec)
      .def_readonly("config", &Preset::config);
  m.def("preset", &preset, py::arg("example_id"));
  m.def("sample_initial_points", &sample_initial_points, py::arg("count"),
        py::arg("dim"), py::arg("lo"), py::arg("hi"), py::arg("seed"));

  m.def("verify_reports", [](const std::vector<std::string>& targets) {
    py::list out;
    for (const auto& [name, rep] : verify_reports(targets)) {
      py::dict d = report_to_dict(rep);
      d["name"] = name;
      out.append(d);
    }
    return out;
  }, py::arg("targets") = std::vector<std::string>{});
}
