#include "sidyn/problems.hpp"

#include "sidyn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace sidyn {

Vector project_example1_optimal(const Vector& x) {
  if (x.size() != 2)
    throw std::invalid_argument("project_example1_optimal: expects R^2");
  // Segment from (0, 1/2) to (1/2, 0).
  const double p0x = 0.0, p0y = 0.5;
  const double dx = 0.5, dy = -0.5;
  double s = ((x[0] - p0x) * dx + (x[1] - p0y) * dy) / (dx * dx + dy * dy);
  s = std::clamp(s, 0.0, 1.0);
  Vector z(2);
  z << p0x + s * dx, p0y + s * dy;
  return z;
}

ProblemInstance build_example1() {
  // (x1 + x2 - 1)^2 : Hessian 2*[[1,1],[1,1]], largest eigenvalue 4.
  auto quad_value = [](const Vector& x) {
    const double s = x[0] + x[1] - 1.0;
    return s * s;
  };
  auto quad_grad = [](const Vector& x) {
    const double s = 2.0 * (x[0] + x[1] - 1.0);
    Vector g(2);
    g << s, s;
    return g;
  };
  SmoothedFunction quad = wrap_smooth(quad_value, quad_grad, 4.0, 2);

  Matrix sel1(1, 2), sel2(1, 2);
  sel1 << 1.0, 0.0;
  sel2 << 0.0, 1.0;
  SmoothedFunction abs_x1 = compose_affine(
      lift_separable(ScalarSmoothing::sqrt_abs(), 1), sel1, Vector::Zero(1));
  SmoothedFunction plus_x2 = compose_affine(
      lift_separable(ScalarSmoothing::logexp_plus(), 1), sel2, Vector::Zero(1));

  Vector x_star(2);
  x_star << 0.25, 0.25;

  return ProblemInstance{
      quad + abs_x1 + plus_x2,
      0.75,
      x_star,
      [](const Vector& x) { return (x - project_example1_optimal(x)).norm(); },
      Provenance{"ex1", 0, {2}, 0.0, 0.0},
  };
}

ProblemInstance build_random_l2l1(int mA, int mD, int n, std::uint64_t seed) {
  if (mA < 1 || mD < 1 || n < 1)
    throw std::invalid_argument("build_random_l2l1: dimensions must be >= 1");

  // Entry order is part of the reproducibility contract: A row-major, then D
  // row-major, then x*.
  CounterRng rng(seed);
  Matrix A(mA, n), D(mD, n);
  for (int i = 0; i < mA; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
  for (int i = 0; i < mD; ++i)
    for (int j = 0; j < n; ++j) D(i, j) = rng.normal();
  Vector xs(n);
  for (int j = 0; j < n; ++j) xs[j] = rng.normal();

  const Vector b = A * xs;
  const Vector d = D * xs;

  const double sigma_A = spectral_norm(A);
  const double sigma_D = spectral_norm(D);

  // ||A x - b||_2^2 with gradient 2 A^T (A x - b); ell = 2 sigma_max(A)^2.
  auto shared_A = std::make_shared<Matrix>(A);
  auto shared_b = std::make_shared<Vector>(b);
  auto quad_value = [shared_A, shared_b](const Vector& x) {
    return (*shared_A * x - *shared_b).squaredNorm();
  };
  auto quad_grad = [shared_A, shared_b](const Vector& x) {
    return Vector(2.0 * shared_A->transpose() * (*shared_A * x - *shared_b));
  };
  SmoothedFunction quad =
      wrap_smooth(quad_value, quad_grad, 2.0 * sigma_A * sigma_A, n);

  SmoothedFunction l1 = compose_affine(
      lift_separable(ScalarSmoothing::sqrt_abs(), mD), D, d);

  return ProblemInstance{
      quad + l1,
      0.0,
      xs,
      [xs](const Vector& x) { return (x - xs).norm(); },
      Provenance{"l2l1", seed, {mA, mD, n}, sigma_A, sigma_D},
  };
}

Preset preset(const std::string& example_id) {
  const double alpha = 7.0, t0 = 1.0;
  const MuSchedule schedule = MuSchedule::power_law(1.0, 3.0, t0);

  IntegratorConfig config;
  config.t_end = 100.0;
  config.record_every = 0.1;

  if (example_id == "ex1" || example_id == "ex1_perturbed") {
    ProblemInstance problem = build_example1();
    Perturbation pert = Perturbation::none();
    if (example_id == "ex1_perturbed") {
      // g(t) = 20 e^{-t} along the normalized all-ones direction.
      pert = Perturbation::exponential_decay(20.0, 1.0, Vector::Ones(2));
      problem.provenance.example_id = "ex1_perturbed";
    }
    DynamicSpec spec =
        DynamicSpec::make(alpha, t0, problem.objective, schedule, pert);
    return {std::move(problem), std::move(spec), config};
  }
  if (example_id == "ex2") {
    ProblemInstance problem = build_random_l2l1(20, 50, 10, 1002);
    problem.provenance.example_id = "ex2";
    config.store_dense = false;
    DynamicSpec spec =
        DynamicSpec::make(alpha, t0, problem.objective, schedule);
    return {std::move(problem), std::move(spec), config};
  }
  if (example_id == "ex3") {
    ProblemInstance problem = build_random_l2l1(200, 500, 100, 1003);
    problem.provenance.example_id = "ex3";
    config.store_dense = false;
    config.t_end = 40.0;  // keeps the run inside the desk-scale time budget
    DynamicSpec spec =
        DynamicSpec::make(alpha, t0, problem.objective, schedule);
    return {std::move(problem), std::move(spec), config};
  }
  throw std::invalid_argument("preset: unknown example id '" + example_id +
                              "' (expected ex1, ex1_perturbed, ex2, ex3)");
}

std::vector<Vector> sample_initial_points(int count, int dim, double lo,
                                          double hi, std::uint64_t seed) {
  if (count < 1 || dim < 1)
    throw std::invalid_argument("sample_initial_points: bad count or dim");
  if (!(lo <= hi))
    throw std::invalid_argument("sample_initial_points: need lo <= hi");
  CounterRng rng(seed);
  std::vector<Vector> pts(count, Vector(dim));
  for (auto& p : pts)
    for (int i = 0; i < dim; ++i) p[i] = rng.uniform(lo, hi);
  return pts;
}

}  // namespace sidyn
