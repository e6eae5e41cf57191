#include "fincap/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "fincap/error.hpp"
#include "fincap/rng.hpp"
#include "legendre.hpp"
#include "rbf.hpp"

namespace fincap::norms {

const char* family_name(Family f) {
  switch (f) {
    case Family::Euclidean: return "euclidean";
    case Family::Ellipsoidal: return "ellipsoidal";
    case Family::PNorm: return "pnorm";
    case Family::Regularized: return "regularized";
    case Family::Sampled: return "sampled";
  }
  return "unknown";
}

namespace {

constexpr int kStackDim = 8;

void require_finite(const double* v, int n, const char* what) {
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(v[i])) throw InvalidArgument(std::string(what) + ": non-finite input");
}

bool is_zero(const double* v, int n) {
  for (int i = 0; i < n; ++i)
    if (v[i] != 0.0) return false;
  return true;
}

// Scratch buffer that stays on the stack for small dimensions.
class Scratch {
 public:
  explicit Scratch(std::size_t n) {
    if (n > small_.size()) {
      heap_.resize(n);
      ptr_ = heap_.data();
    } else {
      ptr_ = small_.data();
    }
  }
  double* data() { return ptr_; }

 private:
  std::array<double, kStackDim * kStackDim> small_;
  std::vector<double> heap_;
  double* ptr_;
};

// Weighted power sum (sum_i a_i |z_i|^p)^(1/p) with derivatives; the PNorm
// family and its closed-form dual are both instances.
// x^e for x >= 0; small integer exponents (p = 2, 3, 4 and their
// derivatives) use products, which keeps pow() out of the energy kernels.
inline double power(double x, double e) {
  switch (static_cast<int>(e)) {
    case 0:
      if (e == 0.0) return 1.0;
      break;
    case 1:
      if (e == 1.0) return x;
      break;
    case 2:
      if (e == 2.0) return x * x;
      break;
    case 3:
      if (e == 3.0) return x * x * x;
      break;
    case 4:
      if (e == 4.0) return (x * x) * (x * x);
      break;
    default:
      break;
  }
  return std::pow(x, e);
}

inline double root(double s, double p) {
  if (p == 2.0) return std::sqrt(s);
  if (p == 4.0) return std::sqrt(std::sqrt(s));
  return std::pow(s, 1.0 / p);
}

struct PowerNorm {
  double p = 2.0;
  std::vector<double> a;

  double value(const double* z, int n) const {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(z[i]));
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[static_cast<std::size_t>(i)] * power(std::abs(z[i]) / m, p);
    return m * root(s, p);
  }

  double grad(const double* z, int n, double* g) const {
    const double H = value(z, n);
    for (int i = 0; i < n; ++i) {
      const double r = std::abs(z[i]) / H;
      const double s = z[i] > 0.0 ? 1.0 : (z[i] < 0.0 ? -1.0 : 0.0);
      g[i] = a[static_cast<std::size_t>(i)] * s * power(r, p - 1.0);
    }
    return H;
  }

  void hess(const double* z, int n, double* hm) const {
    Scratch gs(static_cast<std::size_t>(n));
    double* g = gs.data();
    const double H = grad(z, n, g);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) hm[i * n + j] = -g[i] * g[j];
      hm[i * n + i] += a[static_cast<std::size_t>(i)] * power(std::abs(z[i]) / H, p - 2.0);
    }
    const double f = (p - 1.0) / H;
    for (int k = 0; k < n * n; ++k) hm[k] *= f;
  }
};

}  // namespace

namespace detail {

class NormImpl {
 public:
  NormImpl(Family f, int n) : family(f), dim(n) {}
  virtual ~NormImpl() = default;

  Family family;
  int dim;
  EquivalenceConstants eq;

  virtual double value(const double* xi) const = 0;
  virtual double grad(const double* xi, double* g) const = 0;
  virtual void hess(const double* xi, double* hm) const = 0;
  virtual std::string label() const = 0;

  virtual double grad_v(const double* xi, double* g) const {
    const double H = grad(xi, g);
    for (int i = 0; i < dim; ++i) g[i] *= H;
    return 0.5 * H * H;
  }

  virtual void hess_v(const double* xi, double* hm) const {
    hess(xi, hm);
    Scratch gs(static_cast<std::size_t>(dim));
    double* g = gs.data();
    const double H = grad(xi, g);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) hm[i * dim + j] = H * hm[i * dim + j] + g[i] * g[j];
  }

  virtual bool closed_dual() const { return false; }
  virtual bool quadratic() const { return false; }
  virtual bool uniformly_convex() const { return true; }
  virtual bool reliable_hessian() const { return true; }

  virtual double dual(const double* x) const { return numeric_dual(x, nullptr, nullptr); }
  virtual double dual_grad(const double* x, double* g) const { return numeric_dual(x, g, nullptr); }
  virtual void dual_hess_v(const double* x, double* hm) const { numeric_dual(x, nullptr, hm); }

  // H_0(x) through the Legendre transform: the minimizer xi* of
  // V(xi) - <x, xi> satisfies grad V(xi*) = x, H_0(x) = H(xi*),
  // grad V_0(x) = xi* and hess V_0(x) = hess V(xi*)^{-1}.
  double numeric_dual(const double* x, double* grad_out, double* hess_v0_out) const;
};

double NormImpl::numeric_dual(const double* x, double* grad_out, double* hess_v0_out) const {
  const double upper = eq.sigma > 0.0 ? 1.0 / eq.sigma : std::numeric_limits<double>::infinity();
  return fincap::detail::legendre_conjugate(*this, x, grad_out, hess_v0_out, upper, "dual norm");
}

namespace {

class QuadraticNorm final : public NormImpl {
 public:
  QuadraticNorm(Family f, Mat A) : NormImpl(f, static_cast<int>(A.rows())), A_(std::move(A)) {
    Ainv_ = A_.inverse();
    Ainv_ = 0.5 * (Ainv_ + Ainv_.transpose());
  }

  const Mat& A() const { return A_; }

  double value(const double* xi) const override { return std::sqrt(form(A_, xi)); }

  double grad(const double* xi, double* g) const override {
    apply(A_, xi, g);
    double q = 0.0;
    for (int i = 0; i < dim; ++i) q += g[i] * xi[i];
    const double H = std::sqrt(q);
    for (int i = 0; i < dim; ++i) g[i] /= H;
    return H;
  }

  void hess(const double* xi, double* hm) const override {
    Scratch s(static_cast<std::size_t>(dim));
    double* ax = s.data();
    apply(A_, xi, ax);
    double q = 0.0;
    for (int i = 0; i < dim; ++i) q += ax[i] * xi[i];
    const double H = std::sqrt(q);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) hm[i * dim + j] = (A_(i, j) - ax[i] * ax[j] / q) / H;
  }

  double grad_v(const double* xi, double* g) const override {
    apply(A_, xi, g);
    double q = 0.0;
    for (int i = 0; i < dim; ++i) q += g[i] * xi[i];
    return 0.5 * q;
  }

  void hess_v(const double*, double* hm) const override {
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) hm[i * dim + j] = A_(i, j);
  }

  bool closed_dual() const override { return true; }
  bool quadratic() const override { return true; }

  double dual(const double* x) const override { return std::sqrt(form(Ainv_, x)); }

  double dual_grad(const double* x, double* g) const override {
    apply(Ainv_, x, g);
    double q = 0.0;
    for (int i = 0; i < dim; ++i) q += g[i] * x[i];
    const double H0 = std::sqrt(q);
    for (int i = 0; i < dim; ++i) g[i] /= H0;
    return H0;
  }

  void dual_hess_v(const double*, double* hm) const override {
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) hm[i * dim + j] = Ainv_(i, j);
  }

  std::string label() const override {
    if (family == Family::Euclidean) return "euclidean";
    std::ostringstream os;
    os.precision(17);
    os << "ellipsoidal(";
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) os << (i + j ? "," : "") << A_(i, j);
    os << ")";
    return os.str();
  }

 private:
  double form(const Mat& M, const double* v) const {
    double q = 0.0;
    for (int i = 0; i < dim; ++i) {
      double row = 0.0;
      for (int j = 0; j < dim; ++j) row += M(i, j) * v[j];
      q += v[i] * row;
    }
    return q;
  }
  void apply(const Mat& M, const double* v, double* out) const {
    for (int i = 0; i < dim; ++i) {
      double row = 0.0;
      for (int j = 0; j < dim; ++j) row += M(i, j) * v[j];
      out[i] = row;
    }
  }

  Mat A_;
  Mat Ainv_;
};

class PNormImpl final : public NormImpl {
 public:
  PNormImpl(int n, double p, std::vector<double> w) : NormImpl(Family::PNorm, n) {
    primal_.p = p;
    primal_.a = std::move(w);
    dual_.p = p / (p - 1.0);
    for (double a : primal_.a) dual_.a.push_back(std::pow(a, -dual_.p / p));
  }

  double p() const { return primal_.p; }
  const std::vector<double>& weights() const { return primal_.a; }

  double value(const double* xi) const override { return primal_.value(xi, dim); }
  double grad(const double* xi, double* g) const override { return primal_.grad(xi, dim, g); }
  void hess(const double* xi, double* hm) const override { primal_.hess(xi, dim, hm); }

  bool closed_dual() const override { return true; }
  bool uniformly_convex() const override { return primal_.p == 2.0; }

  double dual(const double* x) const override { return dual_.value(x, dim); }
  double dual_grad(const double* x, double* g) const override { return dual_.grad(x, dim, g); }
  void dual_hess_v(const double* x, double* hm) const override {
    dual_.hess(x, dim, hm);
    Scratch gs(static_cast<std::size_t>(dim));
    double* g = gs.data();
    const double H0 = dual_.grad(x, dim, g);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) hm[i * dim + j] = H0 * hm[i * dim + j] + g[i] * g[j];
  }

  std::string label() const override {
    std::ostringstream os;
    os.precision(17);
    os << "pnorm(p=" << primal_.p << ",w=";
    for (std::size_t i = 0; i < primal_.a.size(); ++i) os << (i ? "," : "") << primal_.a[i];
    os << ")";
    return os.str();
  }

 private:
  PowerNorm primal_;
  PowerNorm dual_;
};

class RegularizedImpl final : public NormImpl {
 public:
  RegularizedImpl(NormModel base, double eps)
      : NormImpl(Family::Regularized, base.dim()), base_(std::move(base)), eps_(eps) {}

  const NormModel& base() const { return base_; }
  double eps() const { return eps_; }

  double value(const double* xi) const override {
    const double B = base_.h(xi);
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += xi[i] * xi[i];
    return std::sqrt((1.0 - eps_) * B * B + eps_ * s);
  }

  double grad_v(const double* xi, double* g) const override {
    Scratch gs(static_cast<std::size_t>(dim));
    double* gb = gs.data();
    const double B = base_.grad_h(xi, gb);
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      g[i] = (1.0 - eps_) * B * gb[i] + eps_ * xi[i];
      s += xi[i] * xi[i];
    }
    return 0.5 * ((1.0 - eps_) * B * B + eps_ * s);
  }

  double grad(const double* xi, double* g) const override {
    const double H = std::sqrt(2.0 * grad_v(xi, g));
    for (int i = 0; i < dim; ++i) g[i] /= H;
    return H;
  }

  void hess_v(const double* xi, double* hm) const override {
    Scratch gs(static_cast<std::size_t>(dim));
    double* gb = gs.data();
    base_.hess_h(xi, hm);
    const double B = base_.grad_h(xi, gb);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j)
        hm[i * dim + j] = (1.0 - eps_) * (gb[i] * gb[j] + B * hm[i * dim + j]);
      hm[i * dim + i] += eps_;
    }
  }

  void hess(const double* xi, double* hm) const override {
    Scratch gs(static_cast<std::size_t>(dim));
    double* g = gs.data();
    hess_v(xi, hm);
    const double H = grad(xi, g);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) hm[i * dim + j] = (hm[i * dim + j] - g[i] * g[j]) / H;
  }

  bool reliable_hessian() const override { return base_.reliable_hessian(); }

  std::string label() const override {
    std::ostringstream os;
    os.precision(17);
    os << "regularized(" << base_.label() << ",eps=" << eps_ << ")";
    return os.str();
  }

 private:
  NormModel base_;
  double eps_;
};

class SampledImpl final : public NormImpl {
 public:
  SampledImpl(const geom::SphereGrid& grid, const std::vector<double>& values, double kappa)
      : NormImpl(Family::Sampled, grid.dim()), rbf_(grid, values, kappa, true) {}

  double value(const double* xi) const override { return rbf_.value(xi); }
  double grad(const double* xi, double* g) const override { return rbf_.grad(xi, g); }
  void hess(const double* xi, double* hm) const override { rbf_.hess(xi, hm); }
  bool reliable_hessian() const override { return false; }

  std::string label() const override {
    std::ostringstream os;
    os.precision(17);
    os << "sampled(nodes=" << rbf_.size() << ",kappa=" << rbf_.kappa() << ")";
    return os.str();
  }

 private:
  fincap::detail::SphericalRbf rbf_;
};

// Pattern search on the sphere for the extremes of H, started from the best
// of a fixed direction set.
EquivalenceConstants compute_equivalence(const NormImpl& impl) {
  const int n = impl.dim;
  std::vector<Vec> dirs;
  if (n == 3) {
    dirs = geom::fibonacci_sphere(2048);
  } else if (n == 2) {
    dirs = geom::seed_directions(2, 2048);
  } else {
    dirs = geom::random_directions(n, 2048, 0xE0C0FFEEULL);
    for (int i = 0; i < n; ++i) {
      Vec e = Vec::Zero(n);
      e(i) = 1.0;
      dirs.push_back(e);
    }
  }
  auto refine = [&](Vec x, double sign) {
    double best = sign * impl.value(x.data());
    double step = 0.05;
    while (step > 1e-9) {
      bool improved = false;
      const Mat E = geom::tangent_frame(x);
      for (int c = 0; c < n - 1 && !improved; ++c) {
        for (double s : {step, -step}) {
          Vec y = (x + s * E.col(c)).normalized();
          const double val = sign * impl.value(y.data());
          if (val > best) {
            best = val;
            x = y;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    return sign * best;
  };
  std::size_t imin = 0, imax = 0;
  std::vector<double> vals(dirs.size());
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    vals[k] = impl.value(dirs[k].data());
    if (vals[k] < vals[imin]) imin = k;
    if (vals[k] > vals[imax]) imax = k;
  }
  EquivalenceConstants eq;
  eq.sigma = std::min(vals[imin], refine(dirs[imin], -1.0));
  eq.gamma = std::max(vals[imax], refine(dirs[imax], 1.0));
  return eq;
}

template <class T>
const T& as(const detail::NormImpl& impl, const char* what) {
  auto* p = dynamic_cast<const T*>(&impl);
  if (!p) throw InvalidArgument(std::string("norm model has no ") + what);
  return *p;
}

}  // namespace
}  // namespace detail

NormModel::NormModel(std::shared_ptr<const detail::NormImpl> impl) : impl_(std::move(impl)) {}

namespace {

template <class T>
std::shared_ptr<const detail::NormImpl> finalize(std::shared_ptr<T> impl) {
  impl->eq = detail::compute_equivalence(*impl);
  if (!(impl->eq.sigma > 0.0) || !std::isfinite(impl->eq.gamma))
    throw ConstructionError("norm is not positive on the unit sphere");
  return impl;
}

}  // namespace

NormModel NormModel::euclidean(int dim) {
  if (dim < 2) throw InvalidArgument("euclidean norm: dimension must be >= 2");
  auto impl = std::make_shared<detail::QuadraticNorm>(Family::Euclidean, Mat::Identity(dim, dim));
  impl->eq = {1.0, 1.0};
  return NormModel(impl);
}

NormModel NormModel::ellipsoidal(const Mat& A) {
  if (A.rows() != A.cols() || A.rows() < 2) throw InvalidArgument("ellipsoidal norm: matrix must be square, N >= 2");
  if (!A.allFinite()) throw InvalidArgument("ellipsoidal norm: non-finite matrix");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()))
    throw InvalidArgument("ellipsoidal norm: matrix must be symmetric");
  Mat S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  if (es.eigenvalues().minCoeff() <= 0.0) throw InvalidArgument("ellipsoidal norm: matrix must be positive definite");
  auto impl = std::make_shared<detail::QuadraticNorm>(Family::Ellipsoidal, S);
  impl->eq = {std::sqrt(es.eigenvalues().minCoeff()), std::sqrt(es.eigenvalues().maxCoeff())};
  return NormModel(impl);
}

NormModel NormModel::pnorm(int dim, double p, std::vector<double> weights) {
  if (dim < 2) throw InvalidArgument("pnorm: dimension must be >= 2");
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("pnorm: p must be > 1");
  if (weights.empty()) weights.assign(static_cast<std::size_t>(dim), 1.0);
  if (weights.size() != static_cast<std::size_t>(dim)) throw InvalidArgument("pnorm: weight count != dimension");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("pnorm: weights must be positive");
  return NormModel(finalize(std::make_shared<detail::PNormImpl>(dim, p, std::move(weights))));
}

NormModel NormModel::regularized(const NormModel& base, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("regularized norm: eps must lie in (0, 1)");
  return NormModel(finalize(std::make_shared<detail::RegularizedImpl>(base, eps)));
}

NormModel NormModel::sampled(const geom::SphereGrid& grid, std::vector<double> values, double kappa) {
  if (values.size() != grid.size() || grid.size() < 4) throw InvalidArgument("sampled norm: need one value per grid node");
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("sampled norm: values must be positive");
  auto impl = std::make_shared<detail::SampledImpl>(grid, values, kappa);
  auto out = finalize(impl);
  // The interpolant must still be a norm with uniformly convex square.
  const int n = grid.dim();
  const auto dirs = geom::seed_directions(n, 600);
  Mat hm(n, n);
  for (const auto& d : dirs) {
    impl->hess_v(d.data(), hm.data());
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (hm + hm.transpose()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw ConstructionError("sampled norm: interpolant is not uniformly convex");
  }
  return NormModel(out);
}

Family NormModel::family() const { return impl_->family; }
int NormModel::dim() const { return impl_->dim; }
std::string NormModel::label() const { return impl_->label(); }

double NormModel::p() const { return detail::as<detail::PNormImpl>(*impl_, "exponent").p(); }
const std::vector<double>& NormModel::weights() const {
  return detail::as<detail::PNormImpl>(*impl_, "weights").weights();
}
double NormModel::eps() const { return detail::as<detail::RegularizedImpl>(*impl_, "eps").eps(); }
const NormModel& NormModel::base() const { return detail::as<detail::RegularizedImpl>(*impl_, "base").base(); }
const Mat& NormModel::matrix() const { return detail::as<detail::QuadraticNorm>(*impl_, "matrix").A(); }

bool NormModel::is_quadratic() const { return impl_->quadratic(); }
Mat NormModel::quadratic_matrix() const { return matrix(); }
bool NormModel::uniformly_convex() const { return impl_->uniformly_convex(); }
bool NormModel::closed_form_dual() const { return impl_->closed_dual(); }
bool NormModel::reliable_hessian() const { return impl_->reliable_hessian(); }
const EquivalenceConstants& NormModel::equivalence() const { return impl_->eq; }

double NormModel::h(const double* xi) const {
  require_finite(xi, impl_->dim, "H");
  return impl_->value(xi);
}

double NormModel::grad_h(const double* xi, double* g) const {
  require_finite(xi, impl_->dim, "grad H");
  if (is_zero(xi, impl_->dim)) throw DomainError("grad H: norm is not differentiable at the origin");
  return impl_->grad(xi, g);
}

void NormModel::hess_h(const double* xi, double* hm) const {
  require_finite(xi, impl_->dim, "hess H");
  if (is_zero(xi, impl_->dim)) throw DomainError("hess H: norm is not differentiable at the origin");
  impl_->hess(xi, hm);
}

double NormModel::grad_v(const double* xi, double* g) const {
  require_finite(xi, impl_->dim, "grad V");
  if (is_zero(xi, impl_->dim)) {
    for (int i = 0; i < impl_->dim; ++i) g[i] = 0.0;
    return 0.0;
  }
  return impl_->grad_v(xi, g);
}

void NormModel::hess_v(const double* xi, double* hm) const {
  require_finite(xi, impl_->dim, "hess V");
  if (is_zero(xi, impl_->dim)) throw DomainError("hess V: not defined at the origin");
  impl_->hess_v(xi, hm);
}

double NormModel::h0(const double* x) const {
  require_finite(x, impl_->dim, "H_0");
  return impl_->dual(x);
}

double NormModel::grad_h0(const double* x, double* g) const {
  require_finite(x, impl_->dim, "grad H_0");
  if (is_zero(x, impl_->dim)) throw DomainError("grad H_0: dual norm is not differentiable at the origin");
  return impl_->dual_grad(x, g);
}

void NormModel::hess_v0(const double* x, double* hm) const {
  require_finite(x, impl_->dim, "hess V_0");
  if (is_zero(x, impl_->dim)) throw DomainError("hess V_0: not defined at the origin");
  impl_->dual_hess_v(x, hm);
}

namespace {
void check_dim(const NormModel& m, const Vec& v) {
  if (v.size() != m.dim()) throw InvalidArgument("vector length does not match norm dimension");
}
}  // namespace

double NormModel::h(const Vec& xi) const {
  check_dim(*this, xi);
  return h(xi.data());
}
Vec NormModel::grad_h(const Vec& xi) const {
  check_dim(*this, xi);
  Vec g(dim());
  grad_h(xi.data(), g.data());
  return g;
}
Mat NormModel::hess_h(const Vec& xi) const {
  check_dim(*this, xi);
  Mat hm(dim(), dim());
  hess_h(xi.data(), hm.data());  // symmetric, so storage order is irrelevant
  return hm;
}
double NormModel::v(const Vec& xi) const {
  const double H = h(xi);
  return 0.5 * H * H;
}
Vec NormModel::grad_v(const Vec& xi) const {
  check_dim(*this, xi);
  Vec g(dim());
  grad_v(xi.data(), g.data());
  return g;
}
Mat NormModel::hess_v(const Vec& xi) const {
  check_dim(*this, xi);
  Mat hm(dim(), dim());
  hess_v(xi.data(), hm.data());
  return hm;
}
double NormModel::h0(const Vec& x) const {
  check_dim(*this, x);
  return h0(x.data());
}
Vec NormModel::grad_h0(const Vec& x) const {
  check_dim(*this, x);
  Vec g(dim());
  grad_h0(x.data(), g.data());
  return g;
}
Mat NormModel::hess_v0(const Vec& x) const {
  check_dim(*this, x);
  Mat hm(dim(), dim());
  hess_v0(x.data(), hm.data());
  return hm;
}
Mat NormModel::hess_h0(const Vec& x) const {
  const Mat hv = hess_v0(x);
  Vec g(dim());
  const double H0 = grad_h0(x.data(), g.data());
  return (hv - g * g.transpose()) / H0;
}
double NormModel::v0(const Vec& x) const {
  const double H0 = h0(x);
  return 0.5 * H0 * H0;
}
Vec NormModel::grad_v0(const Vec& x) const {
  Vec g = grad_h0(x);
  return h0(x) * g;
}

double IdentityReport::max_residual() const {
  double m = std::max({h0_of_grad_h, h_of_grad_h0, inverse_map});
  if (hessian_checked) m = std::max(m, hessian_product);
  return m;
}

IdentityReport check_duality_identities(const NormModel& model, std::size_t sample_count, std::uint64_t seed) {
  const int n = model.dim();
  Rng rng(seed);
  IdentityReport rep;
  rep.samples = sample_count;
  rep.hessian_checked = model.reliable_hessian();
  const Mat I = Mat::Identity(n, n);
  for (std::size_t s = 0; s < sample_count; ++s) {
    Vec xi(n), x(n);
    for (int i = 0; i < n; ++i) xi(i) = rng.normal();
    for (int i = 0; i < n; ++i) x(i) = rng.normal();
    const double scale = std::exp(rng.uniform(-1.0, 1.0));
    xi *= scale;
    x *= scale;
    const Vec gh = model.grad_h(xi);
    rep.h0_of_grad_h = std::max(rep.h0_of_grad_h, std::abs(model.h0(gh) - 1.0));
    const Vec gh0 = model.grad_h0(x);
    rep.h_of_grad_h0 = std::max(rep.h_of_grad_h0, std::abs(model.h(gh0) - 1.0));
    const Vec back = model.h(xi) * model.grad_h0(gh);
    rep.inverse_map = std::max(rep.inverse_map, (back - xi).norm() / xi.norm());
    if (rep.hessian_checked) {
      const Mat prod = model.hess_v(xi) * model.hess_v0(gh);
      rep.hessian_product = std::max(rep.hessian_product, (prod - I).cwiseAbs().maxCoeff());
    }
  }
  return rep;
}

}  // namespace fincap::norms
