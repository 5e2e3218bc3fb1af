#pragma once

#include "sidyn/integrator.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sidyn {

struct Provenance {
  std::string example_id;
  std::uint64_t seed = 0;
  std::vector<int> dims;
  double sigma_max_A = 0.0;  // 0 when not applicable
  double sigma_max_D = 0.0;
};

/// A benchmark objective with known optimum for acceptance checks.
struct ProblemInstance {
  SmoothedFunction objective;
  double f_star = 0.0;
  std::optional<Vector> x_star;
  std::function<double(const Vector&)> dist_to_opt;
  Provenance provenance;
};

/// min (x1 + x2 - 1)^2 + |x1| + max{x2, 0} over R^2.
/// Optimal set: the segment {x1 + x2 = 1/2, x1 >= 0, x2 >= 0}, value 3/4.
ProblemInstance build_example1();

/// Closed-form Euclidean projection onto that optimal segment.
Vector project_example1_optimal(const Vector& x);

/// min ||A x - b||_2^2 + ||D x - d||_1 with A (mA x n), D (mD x n) and the
/// planted solution x* drawn i.i.d. standard normal from the seeded
/// counter-based generator (entries in row-major order: A, then D, then x*);
/// b = A x*, d = D x*. Optimal value 0 at x*.
ProblemInstance build_random_l2l1(int mA, int mD, int n, std::uint64_t seed);

struct Preset {
  ProblemInstance problem;
  DynamicSpec spec;
  IntegratorConfig config;
};

/// Paper-anchored experiment presets: ex1, ex1_perturbed, ex2, ex3.
/// All use alpha = 7, mu(t) = 1/t^3, t0 = 1.
Preset preset(const std::string& example_id);

/// `count` points uniform in [lo, hi]^dim from the seeded generator.
std::vector<Vector> sample_initial_points(int count, int dim, double lo,
                                          double hi, std::uint64_t seed);

}  // namespace sidyn
