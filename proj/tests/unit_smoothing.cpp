#include "sidyn/smoothing.hpp"

#include "sidyn/rng.hpp"
#include "test_util.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>

using namespace sidyn;
using namespace sidyn::testing;

namespace {

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix A(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) A(i, j) = rng.normal();
  return A;
}

SmoothedFunction example1_objective() {
  auto quad = wrap_smooth(
      [](const Vector& x) {
        const double s = x[0] + x[1] - 1.0;
        return s * s;
      },
      [](const Vector& x) {
        const double s = 2.0 * (x[0] + x[1] - 1.0);
        return Vector(vec2(s, s));
      },
      4.0, 2);
  Matrix s1(1, 2), s2(1, 2);
  s1 << 1, 0;
  s2 << 0, 1;
  auto abs1 = compose_affine(lift_separable(ScalarSmoothing::sqrt_abs(), 1),
                             s1, Vector::Zero(1));
  auto plus2 = compose_affine(lift_separable(ScalarSmoothing::logexp_plus(), 1),
                              s2, Vector::Zero(1));
  return quad + abs1 + plus2;
}

}  // namespace

TEST_CASE("sqrt_abs values and derivatives") {
  const auto s = ScalarSmoothing::sqrt_abs();
  CHECK(s.value(0.0, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.underlying(-3.0) == 3.0);
  CHECK(s.deriv_s(0.0, 0.3) == 0.0);

  // grad at x = 3, mu = 1e-6 is 3/sqrt(9 + 1e-12), i.e. 1 within 1e-10
  const double g = s.deriv_s(3.0, 1e-6);
  CHECK(g == doctest::Approx(3.0 / std::sqrt(9.0 + 1e-12)).epsilon(1e-15));
  CHECK(std::abs(g - 1.0) < 1e-10);

  CHECK(s.deriv_mu(0.0, 0.7) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(s.deriv_mu(1e6, 1.0)) < 2e-6);

  CHECK_THROWS_AS(s.value(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(s.value(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("logexp_plus values and derivatives") {
  const auto s = ScalarSmoothing::logexp_plus();
  CHECK(s.value(0.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(s.underlying(-5.0) == 0.0);
  CHECK(s.underlying(5.0) == 5.0);
  CHECK(s.deriv_s(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  // d/dmu [mu log(1+e^{s/mu})] at s = 0 is log 2
  CHECK(s.deriv_mu(0.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  SUBCASE("stable branches agree at the switch and never overflow") {
    const double mu = 0.25;
    const double lo = s.value(29.9999 * mu, mu);
    const double hi = s.value(30.0001 * mu, mu);
    CHECK(hi - lo == doctest::Approx(0.0002 * mu * 0.5).epsilon(1e-3));
    CHECK(std::isfinite(s.value(1000.0, 1e-3)));
    CHECK(s.value(1000.0, 1e-3) == doctest::Approx(1000.0));
    CHECK(s.value(-1000.0, 1e-3) == 0.0);
    CHECK(std::isfinite(s.deriv_mu(1000.0, 1e-3)));
  }
}

TEST_CASE("lift_separable") {
  const auto f1 = lift_separable(ScalarSmoothing::sqrt_abs(), 1);
  CHECK(f1.dim() == 1);
  CHECK(f1.kappa() == 1.0);
  CHECK(f1.lip_nonsmooth() == 1.0);
  CHECK(f1.lip_smooth() == 0.0);
  CHECK(f1.value(vec1(0.7), 0.2) ==
        ScalarSmoothing::sqrt_abs().value(0.7, 0.2));

  const auto f3 = lift_separable(ScalarSmoothing::sqrt_abs(), 3);
  Vector z = Vector::Zero(3);
  CHECK(f3.value(z, 1.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(f3.kappa() == 3.0);
  CHECK(f3.lip_nonsmooth() == 1.0);  // diagonal Hessian: max entry, not sum

  const auto g2 = lift_separable(ScalarSmoothing::logexp_plus(), 2);
  CHECK(g2.kappa() == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));

  CHECK_THROWS_AS(lift_separable(ScalarSmoothing::sqrt_abs(), 0),
                  std::invalid_argument);
}

TEST_CASE("combine_sum adds values, gradients and constants") {
  const auto a = lift_separable(ScalarSmoothing::sqrt_abs(), 2);
  const auto b = lift_separable(ScalarSmoothing::sqrt_abs(), 2);
  const auto sum = a + b;
  CHECK(sum.kappa() == 4.0);
  CHECK(sum.lip_nonsmooth() == 2.0);
  const Vector x = vec2(0.3, -0.8);
  CHECK(sum.value(x, 0.5) ==
        doctest::Approx(2.0 * a.value(x, 0.5)).epsilon(1e-15));
  CHECK((sum.grad_x(x, 0.5) - 2.0 * a.grad_x(x, 0.5)).norm() == 0.0);

  const auto with_zero = a + zero_function(2);
  CHECK(with_zero.kappa() == a.kappa());
  CHECK(with_zero.lip_nonsmooth() == a.lip_nonsmooth());
  CHECK(with_zero.lip_smooth() == a.lip_smooth());
  CHECK(with_zero.value(x, 0.5) == a.value(x, 0.5));

  CHECK_THROWS_AS(combine_sum(a, lift_separable(ScalarSmoothing::sqrt_abs(), 3)),
                  std::invalid_argument);

  // sum of sqrt_abs over 2 coordinates at the origin: additivity of mu
  CHECK(lift_separable(ScalarSmoothing::sqrt_abs(), 2)
            .value(Vector::Zero(2), 0.25) ==
        doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("example-1 objective assembly") {
  const auto f = example1_objective();
  CHECK(f.kappa() == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(f.lip_nonsmooth() == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(f.lip_smooth() == 4.0);
  // (0.25 + 0.25 - 1)^2 + |0.25| + max{0.25, 0} = 0.25 + 0.25 + 0.25
  CHECK(f.underlying(vec2(0.25, 0.25)) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("compose_affine chains values and scales constants") {
  SUBCASE("identity leaves constants unchanged") {
    const auto f = lift_separable(ScalarSmoothing::sqrt_abs(), 2);
    const auto g = compose_affine(f, Matrix::Identity(2, 2), Vector::Zero(2));
    CHECK(g.kappa() == f.kappa());
    CHECK(g.lip_nonsmooth() == doctest::Approx(f.lip_nonsmooth()).epsilon(1e-9));
    const Vector x = vec2(1.2, -0.4);
    CHECK(g.value(x, 0.3) == f.value(x, 0.3));
  }

  SUBCASE("scaling by 2 scales L by 4") {
    const auto f = lift_separable(ScalarSmoothing::sqrt_abs(), 1);
    Matrix A(1, 1);
    A << 2.0;
    const auto g = compose_affine(f, A, Vector::Zero(1));
    CHECK(g.lip_nonsmooth() == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(g.kappa() == 1.0);
  }

  SUBCASE("50x10 composition: kappa = 50, L = sigma_max(D)^2") {
    const Matrix D = random_matrix(50, 10, 7);
    const Vector d = Vector::Zero(50);
    const auto g =
        compose_affine(lift_separable(ScalarSmoothing::sqrt_abs(), 50), D, d);
    CHECK(g.dim() == 10);
    CHECK(g.kappa() == 50.0);
    const double sigma = Eigen::JacobiSVD<Matrix>(D).singularValues()(0);
    CHECK(g.lip_nonsmooth() == doctest::Approx(sigma * sigma).epsilon(1e-7));

    // gradient chains through A^T: finite-difference cross-check
    CounterRng rng(11);
    Vector x(10);
    for (int i = 0; i < 10; ++i) x[i] = rng.uniform(-2, 2);
    const Vector grad = g.grad_x(x, 0.1);
    for (int i = 0; i < 10; ++i) {
      Vector xp = x, xm = x;
      xp[i] += 1e-6;
      xm[i] -= 1e-6;
      const double fd = (g.value(xp, 0.1) - g.value(xm, 0.1)) / 2e-6;
      CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-5));
    }
  }

  SUBCASE("shape mismatch throws") {
    const auto f = lift_separable(ScalarSmoothing::sqrt_abs(), 3);
    CHECK_THROWS_AS(
        compose_affine(f, Matrix::Identity(2, 2), Vector::Zero(2)),
        std::invalid_argument);
  }
}

TEST_CASE("wrap_smooth constants") {
  // Hessian of (x1 + x2 - 1)^2 is 2*[[1,1],[1,1]]; top eigenvalue 4.
  Matrix H(2, 2);
  H << 2, 2, 2, 2;
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(4.0).epsilon(1e-14));

  // ||A x - b||^2: ell = 2 sigma_max(A)^2 against the SVD oracle.
  const Matrix A = random_matrix(20, 10, 3);
  const double sigma = Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
  const auto f = wrap_smooth(
      [A](const Vector& x) { return (A * x).squaredNorm(); },
      [A](const Vector& x) { return Vector(2.0 * A.transpose() * (A * x)); },
      2.0 * sigma * sigma, 10);
  CHECK(f.kappa() == 0.0);
  CHECK(f.lip_nonsmooth() == 0.0);
  CHECK(f.grad_mu(Vector::Ones(10), 0.5) == 0.0);
  CHECK(f.value(Vector::Ones(10), 0.5) == f.underlying(Vector::Ones(10)));

  const auto z = zero_function(4);
  CHECK(z.kappa() == 0.0);
  CHECK(z.lip_nonsmooth() == 0.0);
  CHECK(z.lip_smooth() == 0.0);
  CHECK(z.value(Vector::Ones(4), 1.0) == 0.0);
}

TEST_CASE("spectral_norm matches SVD") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const Matrix A = random_matrix(20, 10, seed);
    const double svd = Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
    CHECK(spectral_norm(A) == doctest::Approx(svd).epsilon(1e-7));
  }
  Matrix sel(1, 2);
  sel << 1, 0;
  CHECK(spectral_norm(sel) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_norm(Matrix::Zero(3, 3)) == 0.0);
}

TEST_CASE("sandwich, mu-Lipschitz and convexity properties") {
  const auto f = example1_objective();
  CounterRng rng(99);
  const double mus[] = {1.0, 0.1, 0.01};
  for (int trial = 0; trial < 2000; ++trial) {
    Vector x = vec2(rng.uniform(-10, 10), rng.uniform(-10, 10));
    Vector y = vec2(rng.uniform(-10, 10), rng.uniform(-10, 10));
    const double fr = f.underlying(x);
    double prev = 0.0, prev_mu = 0.0;
    for (double mu : mus) {
      const double val = f.value(x, mu);
      CHECK(std::abs(val - fr) <= f.kappa() * mu + 1e-12);
      if (prev_mu > 0.0)
        CHECK(std::abs(val - prev) <= f.kappa() * std::abs(mu - prev_mu) + 1e-12);
      prev = val;
      prev_mu = mu;
      // midpoint convexity
      CHECK(f.value(0.5 * (x + y), mu) <=
            0.5 * (f.value(x, mu) + f.value(y, mu)) + 1e-12);
      // |grad_mu| <= kappa
      CHECK(std::abs(f.grad_mu(x, mu)) <= f.kappa() + 1e-12);
    }
  }
}

TEST_CASE("gradient matches coordinatewise finite differences") {
  const auto f = example1_objective();
  CounterRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = vec2(rng.uniform(-5, 5), rng.uniform(-5, 5));
    for (double mu : {1.0, 0.05}) {
      const Vector g = f.grad_x(x, mu);
      const double delta = 1e-6 * (1.0 + x.norm());
      for (int i = 0; i < 2; ++i) {
        Vector xp = x, xm = x;
        xp[i] += delta;
        xm[i] -= delta;
        const double fd = (f.value(xp, mu) - f.value(xm, mu)) / (2.0 * delta);
        CHECK(std::abs(g[i] - fd) / (1.0 + std::abs(g[i])) < 1e-5);
      }
      const double dmu = 1e-6;
      const double fdmu =
          (f.value(x, mu + dmu) - f.value(x, mu - dmu)) / (2.0 * dmu);
      CHECK(std::abs(f.grad_mu(x, mu) - fdmu) < 1e-5 * (1.0 + f.kappa()));
    }
  }
}

TEST_CASE("certify") {
  SUBCASE("sqrt_abs passes on [-10,10]") {
    const auto f = lift_separable(ScalarSmoothing::sqrt_abs(), 1);
    const auto report = certify(f, DomainSampler::box(1, -10, 10, 1000));
    CHECK(report.all_pass());
    CHECK(report.checks.size() == 6);
  }

  SUBCASE("wrong kappa is caught") {
    const auto f = lift_separable(ScalarSmoothing::sqrt_abs(), 1);
    const auto broken = f.with_constants(0.5, f.lip_nonsmooth(), 0.0);
    const auto report = certify(broken, DomainSampler::box(1, -10, 10, 500));
    CHECK_FALSE(report.all_pass());
    bool kappa_failed = false;
    for (const auto& c : report.checks)
      if ((c.condition == "sandwich" || c.condition == "mu_grad_bound") &&
          !c.pass)
        kappa_failed = true;
    CHECK(kappa_failed);
  }

  SUBCASE("wrong Lipschitz constant is caught") {
    const auto f = lift_separable(ScalarSmoothing::sqrt_abs(), 1);
    const auto broken = f.with_constants(f.kappa(), 0.25, 0.0);
    const auto report = certify(broken, DomainSampler::box(1, -10, 10, 500));
    CHECK_FALSE(report.all_pass());
  }

  SUBCASE("assembled example-1 objective passes") {
    const auto report =
        certify(example1_objective(), DomainSampler::box(2, -10, 10, 800));
    CHECK(report.all_pass());
  }

  SUBCASE("empty sampler throws") {
    const auto f = lift_separable(ScalarSmoothing::sqrt_abs(), 1);
    auto s = DomainSampler::box(1, -10, 10, 0);
    CHECK_THROWS_AS(certify(f, s), std::invalid_argument);
    s = DomainSampler::box(1, -10, 10, 10);
    s.mu_grid.clear();
    CHECK_THROWS_AS(certify(f, s), std::invalid_argument);
  }
}

TEST_CASE("dimension and domain errors") {
  const auto f = lift_separable(ScalarSmoothing::sqrt_abs(), 2);
  CHECK_THROWS_AS(f.value(vec1(1.0), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(f.value(vec2(1, 2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(f.underlying(vec1(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(f.grad_x(vec2(1, 2), -0.5), std::invalid_argument);
  CHECK_THROWS_AS(f.grad_mu(vec2(1, 2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(wrap_smooth({}, {}, -1.0, 2), std::invalid_argument);
}
