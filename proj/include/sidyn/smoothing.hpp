#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace sidyn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One-dimensional smoothing kernels with certified constants.
///
/// sqrt_abs     : s -> sqrt(s^2 + mu^2)        smooths |s|        (kappa = 1,   L = 1)
/// logexp_plus  : s -> mu * log(1 + e^{s/mu})  smooths max{s, 0}  (kappa = ln2, L = 1/4)
class ScalarSmoothing {
 public:
  enum class Kind { sqrt_abs, logexp_plus };

  static ScalarSmoothing sqrt_abs() { return ScalarSmoothing(Kind::sqrt_abs); }
  static ScalarSmoothing logexp_plus() {
    return ScalarSmoothing(Kind::logexp_plus);
  }

  Kind kind() const { return kind_; }
  double kappa_scalar() const;
  double lip_scalar() const;

  double value(double s, double mu) const;
  double underlying(double s) const;
  double deriv_s(double s, double mu) const;
  double deriv_mu(double s, double mu) const;

 private:
  explicit ScalarSmoothing(Kind k) : kind_(k) {}
  Kind kind_;
};

/// A convex objective f together with a smooth approximation family
/// f~(x, mu) and the constants that certify it:
///   |f~(x,mu) - f(x)|            <= kappa * mu
///   |d/dmu f~(x,mu)|             <= kappa
///   Lip(grad_x f~(., mu))        <= lip_smooth + lip_nonsmooth / mu
///
/// Values are immutable and cheap to copy; evaluation is safe to share
/// across threads.
class SmoothedFunction {
 public:
  struct Impl;

  int dim() const;
  double kappa() const;
  double lip_nonsmooth() const;
  double lip_smooth() const;
  /// lip_smooth + lip_nonsmooth / mu.
  double grad_lipschitz(double mu) const;

  double value(const Vector& x, double mu) const;
  /// The original nonsmooth f; for diagnostics only, never the dynamic.
  double underlying(const Vector& x) const;
  Vector grad_x(const Vector& x, double mu) const;
  void grad_x_into(const Vector& x, double mu, Vector& out) const;
  double grad_mu(const Vector& x, double mu) const;

  /// Copy with overridden constants. Diagnostic/testing hook; the returned
  /// object evaluates identically but advertises the given constants.
  SmoothedFunction with_constants(double kappa, double lip_nonsmooth,
                                  double lip_smooth) const;

  explicit SmoothedFunction(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> share_impl() const { return impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

/// f(x) = sum_i s(x_i, mu). kappa scales with m; the Hessian is diagonal so
/// the Lipschitz constant does not.
SmoothedFunction lift_separable(const ScalarSmoothing& s, int m);

/// Wraps an already-smooth convex function with gradient-Lipschitz constant
/// ell. The smoothing parameter is ignored (kappa = 0, L = 0).
SmoothedFunction wrap_smooth(std::function<double(const Vector&)> value,
                             std::function<Vector(const Vector&)> grad,
                             double ell, int dim);

/// x -> f(A x - b, mu). kappa is unchanged; both Lipschitz constants scale
/// by sigma_max(A)^2 (computed once by power iteration and cached).
SmoothedFunction compose_affine(const SmoothedFunction& f, Matrix A, Vector b);

SmoothedFunction combine_sum(const SmoothedFunction& a,
                             const SmoothedFunction& b);
inline SmoothedFunction operator+(const SmoothedFunction& a,
                                  const SmoothedFunction& b) {
  return combine_sum(a, b);
}

SmoothedFunction zero_function(int dim);

/// Largest singular value by power iteration on A^T A.
double spectral_norm(const Matrix& A, double rel_tol = 1e-8,
                     int max_iter = 10000);

/// Sampling plan for certification.
struct DomainSampler {
  Vector box_lo;
  Vector box_hi;
  int n_samples = 1000;
  std::vector<double> mu_grid = {1.0, 0.1, 0.01};
  std::uint64_t seed = 0;
  int fd_directions = 2;  // directional finite-difference probes per sample

  static DomainSampler box(int dim, double lo, double hi,
                           int n_samples = 1000, std::uint64_t seed = 0);
};

struct CertificationCheck {
  std::string condition;
  double max_observed = 0.0;
  double bound = 0.0;
  bool pass = true;
};

struct CertificationReport {
  std::vector<CertificationCheck> checks;
  bool all_pass() const;
};

/// Empirically checks every certified inequality of the smoothing family
/// over the sampler's box and mu grid.
CertificationReport certify(const SmoothedFunction& f,
                            const DomainSampler& sampler);

}  // namespace sidyn
