#pragma once

#include "sidyn/dynamics.hpp"

#include <string>
#include <vector>

namespace sidyn {

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_init = 1e-3;
  double h_min = 1e-12;
  double h_max = 1.0;
  /// Accepted steps are capped at eta_stability / sqrt(ell + L/mu(t)).
  double eta_stability = 1.0;
  double t_end = 0.0;  // required
  double record_every = 0.1;
  /// Keep per-step interpolation coefficients so Trajectory::interpolate
  /// works off-grid. Costs O(steps * dim) memory; presets disable it for the
  /// large problems.
  bool store_dense = true;

  void validate(double t0) const;
};

struct TrajectorySample {
  double t;
  Vector x;
  Vector v;
  double f_raw;      // underlying f(x)
  double f_smooth;   // f~(x, mu(t))
  double grad_norm;  // ||grad_x f~(x, mu(t))||
  double step_size;  // accepted step covering this sample
};

struct TrajectoryEvent {
  double t;
  std::string what;
};

/// Samples on the record grid plus (optionally) dense-output segments of
/// every accepted step.
class Trajectory {
 public:
  std::vector<TrajectorySample> samples;
  std::vector<TrajectoryEvent> events;
  bool truncated = false;
  long accepted_steps = 0;
  long rejected_steps = 0;

  double t_begin() const { return samples.front().t; }
  double t_final() const { return samples.back().t; }
  int dim() const { return static_cast<int>(samples.front().x.size()); }

  bool has_dense() const { return !segments_.empty(); }
  /// Dense evaluation at any t in [t_begin, t_final]. At a recorded sample
  /// time the stored sample is returned exactly.
  PhaseState interpolate(double t) const;

  struct DenseSegment {
    double t0, h;
    // y(t0 + theta h) = r1 + theta(r2 + (1-theta)(r3 + theta(r4 + (1-theta) r5)))
    Vector r1, r2, r3, r4, r5;
  };
  std::vector<DenseSegment> segments_;  // filled when store_dense
};

/// Dormand-Prince 5(4) with a PI step controller and the stability cap from
/// lipschitz_bound. Deterministic: identical inputs give identical output.
Trajectory integrate(const DynamicSpec& spec, const IntegratorConfig& config,
                     const Vector& x0, const Vector& v0);

}  // namespace sidyn
