#include "sidyn/smoothing.hpp"

#include "sidyn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sidyn {

namespace {

double sigmoid(double r) {
  if (r >= 0.0) return 1.0 / (1.0 + std::exp(-r));
  const double e = std::exp(r);
  return e / (1.0 + e);
}

void check_mu(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("smoothing: mu must be > 0");
}

}  // namespace

double ScalarSmoothing::kappa_scalar() const {
  return kind_ == Kind::sqrt_abs ? 1.0 : std::log(2.0);
}

double ScalarSmoothing::lip_scalar() const {
  return kind_ == Kind::sqrt_abs ? 1.0 : 0.25;
}

double ScalarSmoothing::value(double s, double mu) const {
  check_mu(mu);
  if (kind_ == Kind::sqrt_abs) return std::hypot(s, mu);
  // mu * log(1 + e^{s/mu}) in overflow-safe branches
  const double r = s / mu;
  if (r > 30.0) return s + mu * std::exp(-r);
  if (r < -30.0) return mu * std::exp(r);
  return mu * std::log1p(std::exp(r));
}

double ScalarSmoothing::underlying(double s) const {
  return kind_ == Kind::sqrt_abs ? std::abs(s) : std::max(s, 0.0);
}

double ScalarSmoothing::deriv_s(double s, double mu) const {
  check_mu(mu);
  if (kind_ == Kind::sqrt_abs) return s / std::hypot(s, mu);
  return sigmoid(s / mu);
}

double ScalarSmoothing::deriv_mu(double s, double mu) const {
  check_mu(mu);
  if (kind_ == Kind::sqrt_abs) return mu / std::hypot(s, mu);
  // d/dmu [mu log(1+e^{s/mu})] = log(1+e^r) - r sigma(r), r = s/mu
  const double r = s / mu;
  if (r > 30.0) return std::exp(-r) * (1.0 + r);
  if (r < -30.0) return std::exp(r) * (1.0 - r);
  return std::log1p(std::exp(r)) - r * sigmoid(r);
}

struct SmoothedFunction::Impl {
  int dim;
  double kappa;
  double lip_nonsmooth;
  double lip_smooth;

  Impl(int d, double k, double L, double ell)
      : dim(d), kappa(k), lip_nonsmooth(L), lip_smooth(ell) {}
  virtual ~Impl() = default;

  virtual double value(const Vector& x, double mu) const = 0;
  virtual double underlying(const Vector& x) const = 0;
  // Contract: out += grad_x f~(x, mu); lets sums accumulate without temporaries.
  virtual void add_grad_x(const Vector& x, double mu, Vector& out) const = 0;
  virtual double grad_mu(const Vector& x, double mu) const = 0;
};

namespace {

using ImplPtr = std::shared_ptr<const SmoothedFunction::Impl>;

struct LiftImpl final : SmoothedFunction::Impl {
  ScalarSmoothing s;

  LiftImpl(ScalarSmoothing sc, int m)
      : Impl(m, m * sc.kappa_scalar(), sc.lip_scalar(), 0.0), s(sc) {}

  double value(const Vector& x, double mu) const override {
    double acc = 0.0;
    for (int i = 0; i < dim; ++i) acc += s.value(x[i], mu);
    return acc;
  }
  double underlying(const Vector& x) const override {
    double acc = 0.0;
    for (int i = 0; i < dim; ++i) acc += s.underlying(x[i]);
    return acc;
  }
  void add_grad_x(const Vector& x, double mu, Vector& out) const override {
    for (int i = 0; i < dim; ++i) out[i] += s.deriv_s(x[i], mu);
  }
  double grad_mu(const Vector& x, double mu) const override {
    double acc = 0.0;
    for (int i = 0; i < dim; ++i) acc += s.deriv_mu(x[i], mu);
    return acc;
  }
};

struct WrapImpl final : SmoothedFunction::Impl {
  std::function<double(const Vector&)> value_fn;
  std::function<Vector(const Vector&)> grad_fn;

  WrapImpl(std::function<double(const Vector&)> v,
           std::function<Vector(const Vector&)> g, double ell, int d)
      : Impl(d, 0.0, 0.0, ell), value_fn(std::move(v)), grad_fn(std::move(g)) {}

  double value(const Vector& x, double) const override { return value_fn(x); }
  double underlying(const Vector& x) const override { return value_fn(x); }
  void add_grad_x(const Vector& x, double, Vector& out) const override {
    out += grad_fn(x);
  }
  double grad_mu(const Vector&, double) const override { return 0.0; }
};

struct ZeroImpl final : SmoothedFunction::Impl {
  explicit ZeroImpl(int d) : Impl(d, 0.0, 0.0, 0.0) {}
  double value(const Vector&, double) const override { return 0.0; }
  double underlying(const Vector&) const override { return 0.0; }
  void add_grad_x(const Vector&, double, Vector&) const override {}
  double grad_mu(const Vector&, double) const override { return 0.0; }
};

struct ComposeImpl final : SmoothedFunction::Impl {
  ImplPtr inner;
  Matrix A;
  Vector b;

  ComposeImpl(ImplPtr f, Matrix A_, Vector b_, double sigma2)
      : Impl(static_cast<int>(A_.cols()), f->kappa, f->lip_nonsmooth * sigma2,
             f->lip_smooth * sigma2),
        inner(std::move(f)),
        A(std::move(A_)),
        b(std::move(b_)) {}

  double value(const Vector& x, double mu) const override {
    return inner->value(A * x - b, mu);
  }
  double underlying(const Vector& x) const override {
    return inner->underlying(A * x - b);
  }
  void add_grad_x(const Vector& x, double mu, Vector& out) const override {
    const Vector y = A * x - b;
    Vector gy = Vector::Zero(A.rows());
    inner->add_grad_x(y, mu, gy);
    out.noalias() += A.transpose() * gy;
  }
  double grad_mu(const Vector& x, double mu) const override {
    return inner->grad_mu(A * x - b, mu);
  }
};

struct SumImpl final : SmoothedFunction::Impl {
  ImplPtr a, b;

  SumImpl(ImplPtr a_, ImplPtr b_)
      : Impl(a_->dim, a_->kappa + b_->kappa,
             a_->lip_nonsmooth + b_->lip_nonsmooth,
             a_->lip_smooth + b_->lip_smooth),
        a(std::move(a_)),
        b(std::move(b_)) {}

  double value(const Vector& x, double mu) const override {
    return a->value(x, mu) + b->value(x, mu);
  }
  double underlying(const Vector& x) const override {
    return a->underlying(x) + b->underlying(x);
  }
  void add_grad_x(const Vector& x, double mu, Vector& out) const override {
    a->add_grad_x(x, mu, out);
    b->add_grad_x(x, mu, out);
  }
  double grad_mu(const Vector& x, double mu) const override {
    return a->grad_mu(x, mu) + b->grad_mu(x, mu);
  }
};

struct OverrideImpl final : SmoothedFunction::Impl {
  ImplPtr inner;

  OverrideImpl(ImplPtr f, double k, double L, double ell)
      : Impl(f->dim, k, L, ell), inner(std::move(f)) {}

  double value(const Vector& x, double mu) const override {
    return inner->value(x, mu);
  }
  double underlying(const Vector& x) const override {
    return inner->underlying(x);
  }
  void add_grad_x(const Vector& x, double mu, Vector& out) const override {
    inner->add_grad_x(x, mu, out);
  }
  double grad_mu(const Vector& x, double mu) const override {
    return inner->grad_mu(x, mu);
  }
};

}  // namespace

SmoothedFunction::SmoothedFunction(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {
  if (!impl_) throw std::invalid_argument("SmoothedFunction: null impl");
}

int SmoothedFunction::dim() const { return impl_->dim; }
double SmoothedFunction::kappa() const { return impl_->kappa; }
double SmoothedFunction::lip_nonsmooth() const { return impl_->lip_nonsmooth; }
double SmoothedFunction::lip_smooth() const { return impl_->lip_smooth; }

double SmoothedFunction::grad_lipschitz(double mu) const {
  check_mu(mu);
  return impl_->lip_smooth + impl_->lip_nonsmooth / mu;
}

namespace {
void check_dim(const Vector& x, int dim) {
  if (x.size() != dim)
    throw std::invalid_argument("SmoothedFunction: dimension mismatch");
}
}  // namespace

double SmoothedFunction::value(const Vector& x, double mu) const {
  check_dim(x, impl_->dim);
  check_mu(mu);
  return impl_->value(x, mu);
}

double SmoothedFunction::underlying(const Vector& x) const {
  check_dim(x, impl_->dim);
  return impl_->underlying(x);
}

Vector SmoothedFunction::grad_x(const Vector& x, double mu) const {
  Vector out;
  grad_x_into(x, mu, out);
  return out;
}

void SmoothedFunction::grad_x_into(const Vector& x, double mu,
                                   Vector& out) const {
  check_dim(x, impl_->dim);
  check_mu(mu);
  out.setZero(impl_->dim);
  impl_->add_grad_x(x, mu, out);
}

double SmoothedFunction::grad_mu(const Vector& x, double mu) const {
  check_dim(x, impl_->dim);
  check_mu(mu);
  return impl_->grad_mu(x, mu);
}

SmoothedFunction SmoothedFunction::with_constants(double kappa,
                                                  double lip_nonsmooth,
                                                  double lip_smooth) const {
  if (kappa < 0.0 || lip_nonsmooth < 0.0 || lip_smooth < 0.0)
    throw std::invalid_argument("with_constants: constants must be >= 0");
  return SmoothedFunction(
      std::make_shared<OverrideImpl>(impl_, kappa, lip_nonsmooth, lip_smooth));
}

SmoothedFunction lift_separable(const ScalarSmoothing& s, int m) {
  if (m < 1) throw std::invalid_argument("lift_separable: m must be >= 1");
  return SmoothedFunction(std::make_shared<LiftImpl>(s, m));
}

SmoothedFunction wrap_smooth(std::function<double(const Vector&)> value,
                             std::function<Vector(const Vector&)> grad,
                             double ell, int dim) {
  if (ell < 0.0) throw std::invalid_argument("wrap_smooth: ell must be >= 0");
  if (dim < 1) throw std::invalid_argument("wrap_smooth: dim must be >= 1");
  return SmoothedFunction(
      std::make_shared<WrapImpl>(std::move(value), std::move(grad), ell, dim));
}

SmoothedFunction compose_affine(const SmoothedFunction& f, Matrix A,
                                Vector b) {
  if (A.rows() != f.dim())
    throw std::invalid_argument("compose_affine: A.rows() must equal f.dim()");
  if (b.size() != A.rows())
    throw std::invalid_argument("compose_affine: b.size() must equal A.rows()");
  if (A.cols() < 1)
    throw std::invalid_argument("compose_affine: A must have columns");
  const double sigma = spectral_norm(A);
  return SmoothedFunction(std::make_shared<ComposeImpl>(
      f.share_impl(), std::move(A), std::move(b), sigma * sigma));
}

SmoothedFunction combine_sum(const SmoothedFunction& a,
                             const SmoothedFunction& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("combine_sum: dimension mismatch");
  return SmoothedFunction(
      std::make_shared<SumImpl>(a.share_impl(), b.share_impl()));
}

SmoothedFunction zero_function(int dim) {
  if (dim < 1) throw std::invalid_argument("zero_function: dim must be >= 1");
  return SmoothedFunction(std::make_shared<ZeroImpl>(dim));
}

double spectral_norm(const Matrix& A, double rel_tol, int max_iter) {
  if (A.rows() == 0 || A.cols() == 0) return 0.0;
  CounterRng rng(0x5EEDBA5Eull);
  Vector v(A.cols());
  for (int i = 0; i < v.size(); ++i) v[i] = rng.normal();
  double nv = v.norm();
  if (nv == 0.0) {
    v.setOnes();
    nv = v.norm();
  }
  v /= nv;

  double lambda = 0.0;
  Vector w(A.rows()), z(A.cols());
  for (int it = 0; it < max_iter; ++it) {
    w.noalias() = A * v;
    z.noalias() = A.transpose() * w;
    const double rayleigh = v.dot(z);  // eigenvalue estimate for A^T A
    const double nz = z.norm();
    if (nz == 0.0) return 0.0;
    v = z / nz;
    if (it > 0 && std::abs(rayleigh - lambda) <= rel_tol * std::abs(rayleigh)) {
      lambda = rayleigh;
      break;
    }
    lambda = rayleigh;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

DomainSampler DomainSampler::box(int dim, double lo, double hi, int n_samples,
                                 std::uint64_t seed) {
  DomainSampler s;
  s.box_lo = Vector::Constant(dim, lo);
  s.box_hi = Vector::Constant(dim, hi);
  s.n_samples = n_samples;
  s.seed = seed;
  return s;
}

bool CertificationReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

CertificationReport certify(const SmoothedFunction& f,
                            const DomainSampler& sampler) {
  const int n = f.dim();
  if (sampler.n_samples < 1 || sampler.mu_grid.empty())
    throw std::invalid_argument("certify: sampler is empty");
  if (sampler.box_lo.size() != n || sampler.box_hi.size() != n)
    throw std::invalid_argument("certify: sampler box dimension mismatch");
  for (double mu : sampler.mu_grid) check_mu(mu);

  CounterRng rng(sampler.seed);
  auto draw = [&] {
    Vector x(n);
    for (int i = 0; i < n; ++i)
      x[i] = rng.uniform(sampler.box_lo[i], sampler.box_hi[i]);
    return x;
  };

  // Deterministic corner cases first (clamped into the box), then random
  // draws. The origin pins the tight point of both kappa bounds.
  std::vector<Vector> xs;
  xs.reserve(sampler.n_samples + 3);
  Vector origin = Vector::Zero(n).cwiseMax(sampler.box_lo).cwiseMin(sampler.box_hi);
  xs.push_back(origin);
  xs.push_back(sampler.box_lo);
  xs.push_back(0.5 * (sampler.box_lo + sampler.box_hi));
  for (int i = 0; i < sampler.n_samples; ++i) xs.push_back(draw());

  const double kappa = f.kappa();
  const double abs_tol = 1e-12;

  CertificationCheck sandwich{"sandwich", 0.0, kappa, true};
  CertificationCheck mu_lip{"mu_lipschitz", 0.0, kappa, true};
  CertificationCheck mu_grad{"mu_grad_bound", 0.0, kappa, true};
  CertificationCheck grad_lip{"grad_lipschitz", 0.0, 1.0, true};
  CertificationCheck convexity{"convexity_midpoint", 0.0, abs_tol, true};
  CertificationCheck fd{"fd_gradient", 0.0, 1e-5, true};

  Vector gx, gy;
  for (const Vector& x : xs) {
    const double f_raw = f.underlying(x);
    const Vector y = draw();  // partner for pair-based checks

    double prev_val = 0.0;
    double prev_mu = 0.0;
    bool have_prev = false;
    for (double mu : sampler.mu_grid) {
      const double val = f.value(x, mu);

      // |f~ - f| <= kappa mu
      const double diff = std::abs(val - f_raw);
      sandwich.max_observed = std::max(sandwich.max_observed, diff / mu);
      if (diff > kappa * mu + abs_tol) sandwich.pass = false;

      // |f~(x,mu1) - f~(x,mu2)| <= kappa |mu1 - mu2|
      if (have_prev) {
        const double dmu = std::abs(mu - prev_mu);
        if (dmu > 0.0) {
          const double dval = std::abs(val - prev_val);
          mu_lip.max_observed = std::max(mu_lip.max_observed, dval / dmu);
          if (dval > kappa * dmu + abs_tol) mu_lip.pass = false;
        }
      }
      prev_val = val;
      prev_mu = mu;
      have_prev = true;

      // |d/dmu f~| <= kappa
      const double gmu = f.grad_mu(x, mu);
      mu_grad.max_observed = std::max(mu_grad.max_observed, std::abs(gmu));
      if (std::abs(gmu) > kappa + abs_tol) mu_grad.pass = false;

      // gradient Lipschitz ratio, normalized by ell + L/mu
      f.grad_x_into(x, mu, gx);
      f.grad_x_into(y, mu, gy);
      const double dist = (x - y).norm();
      if (dist > 0.0) {
        const double ratio = (gx - gy).norm() / dist;
        const double bound = f.grad_lipschitz(mu);
        if (bound > 0.0) {
          const double rel = ratio / bound;
          grad_lip.max_observed = std::max(grad_lip.max_observed, rel);
          if (rel > 1.0 + 1e-9) grad_lip.pass = false;
        } else if (ratio > abs_tol) {
          grad_lip.max_observed = std::max(grad_lip.max_observed, 1e300);
          grad_lip.pass = false;
        }
      }

      // midpoint convexity
      const double mid_violation =
          f.value(0.5 * (x + y), mu) - 0.5 * (f.value(x, mu) + f.value(y, mu));
      convexity.max_observed =
          std::max(convexity.max_observed, mid_violation);
      if (mid_violation > abs_tol) convexity.pass = false;

      // Directional finite differences of value vs grad_x, relative to the
      // gradient's own magnitude (the directional component can vanish).
      const double delta = 1e-6 * (1.0 + x.norm());
      for (int k = 0; k < sampler.fd_directions; ++k) {
        Vector d(n);
        for (int i = 0; i < n; ++i) d[i] = rng.normal();
        const double nd = d.norm();
        if (nd == 0.0) continue;
        d /= nd;
        const double fd_val =
            (f.value(x + delta * d, mu) - f.value(x - delta * d, mu)) /
            (2.0 * delta);
        const double analytic = gx.dot(d);
        const double rel = std::abs(fd_val - analytic) / (1.0 + gx.norm());
        fd.max_observed = std::max(fd.max_observed, rel);
        if (rel > 1e-5) fd.pass = false;
      }
      // Finite differences in mu vs grad_mu, relative to the certified
      // dynamic range kappa of the mu-derivative.
      const double dmu_step = std::min(1e-6 * (1.0 + mu), 0.5 * mu);
      const double fd_mu =
          (f.value(x, mu + dmu_step) - f.value(x, mu - dmu_step)) /
          (2.0 * dmu_step);
      const double rel_mu = std::abs(fd_mu - gmu) / (1.0 + kappa);
      fd.max_observed = std::max(fd.max_observed, rel_mu);
      if (rel_mu > 1e-5) fd.pass = false;
    }
  }

  CertificationReport report;
  report.checks = {sandwich, mu_lip, mu_grad, grad_lip, convexity, fd};
  return report;
}

}  // namespace sidyn
