#include "fincap/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fincap/error.hpp"
#include "fincap/reduce.hpp"
#include "fincap/symfun.hpp"
#include "legendre.hpp"
#include "rbf.hpp"

namespace fincap::bodies {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::WulffBall: return "wulff_ball";
    case Kind::Ellipsoid: return "ellipsoid";
    case Kind::EuclideanBall: return "euclidean_ball";
    case Kind::MinkowskiSum: return "minkowski_sum";
    case Kind::SampledSupport: return "sampled_support";
  }
  return "unknown";
}

namespace detail {

class BodyImpl {
 public:
  BodyImpl(Kind k, int n, Vec c) : kind(k), dim(n), center(std::move(c)) {}
  virtual ~BodyImpl() = default;

  Kind kind;
  int dim;
  Vec center;

  virtual double value(const double* xi) const = 0;
  virtual double grad(const double* xi, double* g) const = 0;
  virtual void hess(const double* xi, double* hm) const = 0;
  virtual std::string label() const = 0;
  virtual bool quadratic() const { return false; }
  virtual const NormModel* wulff_norm() const { return nullptr; }
  virtual double wulff_radius() const { return 0.0; }

  // Gauge about the center, y already centered.
  virtual double gauge(const double* y) const {
    return fincap::detail::legendre_conjugate(Centered{*this, dim}, y, nullptr, nullptr,
                                              std::numeric_limits<double>::infinity(), "body gauge");
  }
  virtual double gauge_grad(const double* y, double* g) const {
    return fincap::detail::legendre_conjugate(Centered{*this, dim}, y, g, nullptr,
                                              std::numeric_limits<double>::infinity(), "body gauge");
  }

 private:
  // Support function of the body translated so its center is the origin.
  struct Centered {
    const BodyImpl& b;
    int dim;
    double value(const double* xi) const {
      double s = b.value(xi);
      for (int i = 0; i < dim; ++i) s -= b.center(i) * xi[i];
      return s;
    }
    double grad_v(const double* xi, double* g) const {
      double hc = b.grad(xi, g);
      for (int i = 0; i < dim; ++i) {
        hc -= b.center(i) * xi[i];
        g[i] -= b.center(i);
      }
      for (int i = 0; i < dim; ++i) g[i] *= hc;
      return 0.5 * hc * hc;
    }
    void hess_v(const double* xi, double* hm) const {
      std::vector<double> g(static_cast<std::size_t>(dim));
      double hc = b.grad(xi, g.data());
      for (int i = 0; i < dim; ++i) {
        hc -= b.center(i) * xi[i];
        g[static_cast<std::size_t>(i)] -= b.center(i);
      }
      b.hess(xi, hm);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          hm[i * dim + j] = hc * hm[i * dim + j] + g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(j)];
    }
  };
};

namespace {

std::string vec_str(const Vec& v) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (int i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
  os << ")";
  return os.str();
}

// h = r H + <c, xi>; covers ellipsoids (H quadratic with A = diag(a^2))
// and Euclidean balls.
class WulffImpl final : public BodyImpl {
 public:
  WulffImpl(Kind k, NormModel model, double r, Vec c, Vec axes = Vec())
      : BodyImpl(k, model.dim(), std::move(c)), model_(std::move(model)), r_(r), axes_(std::move(axes)) {}

  double value(const double* xi) const override {
    double s = r_ * model_.h(xi);
    for (int i = 0; i < dim; ++i) s += center(i) * xi[i];
    return s;
  }
  double grad(const double* xi, double* g) const override {
    double s = r_ * model_.grad_h(xi, g);
    for (int i = 0; i < dim; ++i) {
      g[i] = r_ * g[i] + center(i);
      s += center(i) * xi[i];
    }
    return s;
  }
  void hess(const double* xi, double* hm) const override {
    model_.hess_h(xi, hm);
    for (int k = 0; k < dim * dim; ++k) hm[k] *= r_;
  }
  double gauge(const double* y) const override { return model_.h0(y) / r_; }
  double gauge_grad(const double* y, double* g) const override {
    const double v = model_.grad_h0(y, g);
    for (int i = 0; i < dim; ++i) g[i] /= r_;
    return v / r_;
  }
  bool quadratic() const override { return model_.is_quadratic(); }
  const NormModel* wulff_norm() const override { return &model_; }
  double wulff_radius() const override { return r_; }
  const Vec& axes() const { return axes_; }

  std::string label() const override {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
      case Kind::Ellipsoid: os << "ellipsoid(axes=" << vec_str(axes_); break;
      case Kind::EuclideanBall: os << "euclidean_ball(r=" << r_; break;
      default: os << "wulff_ball(" << model_.label() << ",r=" << r_; break;
    }
    os << ",center=" << vec_str(center) << ")";
    return os.str();
  }

 private:
  NormModel model_;
  double r_;
  Vec axes_;
};

class MinkowskiImpl final : public BodyImpl {
 public:
  MinkowskiImpl(std::vector<std::pair<double, std::shared_ptr<const BodyImpl>>> terms, Vec shift, Vec center)
      : BodyImpl(Kind::MinkowskiSum, static_cast<int>(shift.size()), std::move(center)),
        terms_(std::move(terms)),
        shift_(std::move(shift)) {}

  double value(const double* xi) const override {
    double s = 0.0;
    for (const auto& [l, b] : terms_) s += l * b->value(xi);
    for (int i = 0; i < dim; ++i) s += shift_(i) * xi[i];
    return s;
  }
  double grad(const double* xi, double* g) const override {
    std::vector<double> gi(static_cast<std::size_t>(dim));
    double s = 0.0;
    for (int i = 0; i < dim; ++i) g[i] = shift_(i);
    for (const auto& [l, b] : terms_) {
      s += l * b->grad(xi, gi.data());
      for (int i = 0; i < dim; ++i) g[i] += l * gi[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < dim; ++i) s += shift_(i) * xi[i];
    return s;
  }
  void hess(const double* xi, double* hm) const override {
    std::vector<double> hi(static_cast<std::size_t>(dim * dim));
    for (int k = 0; k < dim * dim; ++k) hm[k] = 0.0;
    for (const auto& [l, b] : terms_) {
      b->hess(xi, hi.data());
      for (int k = 0; k < dim * dim; ++k) hm[k] += l * hi[static_cast<std::size_t>(k)];
    }
  }
  std::string label() const override {
    std::ostringstream os;
    os.precision(17);
    os << "minkowski_sum(";
    for (std::size_t k = 0; k < terms_.size(); ++k)
      os << (k ? "+" : "") << terms_[k].first << "*" << terms_[k].second->label();
    os << ",shift=" << vec_str(shift_) << ")";
    return os.str();
  }

 private:
  std::vector<std::pair<double, std::shared_ptr<const BodyImpl>>> terms_;
  Vec shift_;
};

class SampledImpl final : public BodyImpl {
 public:
  SampledImpl(const SphereGrid& grid, const std::vector<double>& values, Vec c, double kappa)
      : BodyImpl(Kind::SampledSupport, grid.dim(), std::move(c)), rbf_(grid, values, kappa, false) {}

  double value(const double* xi) const override { return rbf_.value(xi); }
  double grad(const double* xi, double* g) const override {
    bool zero = true;
    for (int i = 0; i < dim; ++i) zero = zero && xi[i] == 0.0;
    if (zero) throw DomainError("support gradient at the origin");
    return rbf_.grad(xi, g);
  }
  void hess(const double* xi, double* hm) const override { rbf_.hess(xi, hm); }
  std::string label() const override {
    std::ostringstream os;
    os.precision(17);
    os << "sampled_support(nodes=" << rbf_.size() << ",kappa=" << rbf_.kappa() << ",center=" << vec_str(center)
       << ")";
    return os.str();
  }

 private:
  fincap::detail::SphericalRbf rbf_;
};

}  // namespace
}  // namespace detail

ConvexBody::ConvexBody(std::shared_ptr<const detail::BodyImpl> impl) : impl_(std::move(impl)) {}

namespace {

Vec center_or_zero(const Vec& c, int dim) {
  if (c.size() == 0) return Vec::Zero(dim);
  if (c.size() != dim) throw InvalidArgument("body center has the wrong dimension");
  if (!c.allFinite()) throw InvalidArgument("body center must be finite");
  return c;
}

}  // namespace

ConvexBody ConvexBody::wulff_ball(const NormModel& model, double r, const Vec& center) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("wulff_ball: radius must be positive");
  if (!model.uniformly_convex())
    throw ConstructionError("wulff_ball: norm is not smooth and uniformly convex (wrap it in a regularized norm)");
  return ConvexBody(std::make_shared<detail::WulffImpl>(Kind::WulffBall, model, r, center_or_zero(center, model.dim())));
}

ConvexBody ConvexBody::ellipsoid(const Vec& semi_axes, const Vec& center) {
  const int n = static_cast<int>(semi_axes.size());
  if (n < 2) throw InvalidArgument("ellipsoid: need at least two semi-axes");
  if (!semi_axes.allFinite() || semi_axes.minCoeff() <= 0.0) throw InvalidArgument("ellipsoid: semi-axes must be positive");
  Mat A = semi_axes.array().square().matrix().asDiagonal();
  return ConvexBody(std::make_shared<detail::WulffImpl>(Kind::Ellipsoid, NormModel::ellipsoidal(A), 1.0,
                                                        center_or_zero(center, n), semi_axes));
}

ConvexBody ConvexBody::euclidean_ball(int dim, double r, const Vec& center) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("euclidean_ball: radius must be positive");
  return ConvexBody(std::make_shared<detail::WulffImpl>(Kind::EuclideanBall, NormModel::euclidean(dim), r,
                                                        center_or_zero(center, dim)));
}

ConvexBody ConvexBody::minkowski_sum(const std::vector<std::pair<double, ConvexBody>>& terms, const Vec& translation) {
  if (terms.empty()) throw InvalidArgument("minkowski_sum: no terms");
  const int n = terms.front().second.dim();
  Vec shift = center_or_zero(translation, n);
  Vec c = shift;
  std::vector<std::pair<double, std::shared_ptr<const detail::BodyImpl>>> t;
  for (const auto& [l, b] : terms) {
    if (b.dim() != n) throw InvalidArgument("minkowski_sum: dimension mismatch");
    if (!(l > 0.0) || !std::isfinite(l)) throw InvalidArgument("minkowski_sum: coefficients must be positive");
    c += l * b.center();
    t.emplace_back(l, b.impl_);
  }
  return ConvexBody(std::make_shared<detail::MinkowskiImpl>(std::move(t), std::move(shift), std::move(c)));
}

ConvexBody ConvexBody::sampled_support(const SphereGrid& grid, std::vector<double> values, const Vec& center,
                                       double kappa) {
  if (values.size() != grid.size() || grid.size() < 4)
    throw InvalidArgument("sampled_support: need one value per grid node");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidArgument("sampled_support: non-finite support value");
  const Vec c = center_or_zero(center, grid.dim());
  auto impl = std::make_shared<detail::SampledImpl>(grid, values, c, kappa);
  ConvexBody body(impl);
  // The interpolant must describe a strictly convex body around c.
  const auto check = geom::seed_directions(grid.dim(), 600);
  for (const auto& th : check) {
    if (body.h(th) - c.dot(th) <= 0.0) throw ConstructionError("sampled_support: center is not interior");
    Eigen::SelfAdjointEigenSolver<Mat> es(body.tangential_hessian(th), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) throw ConstructionError("sampled_support: interpolant is not strictly convex");
  }
  return body;
}

ConvexBody ConvexBody::scaled(double t) const {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("scaled: factor must be positive");
  if (const auto* w = dynamic_cast<const detail::WulffImpl*>(impl_.get()))
    return ConvexBody(std::make_shared<detail::WulffImpl>(w->kind, *w->wulff_norm(), t * w->wulff_radius(),
                                                          Vec(t * w->center), Vec(t * w->axes())));
  return minkowski_sum({{t, *this}});
}

ConvexBody ConvexBody::translated(const Vec& shift) const {
  const Vec s = center_or_zero(shift, dim());
  if (const auto* w = dynamic_cast<const detail::WulffImpl*>(impl_.get()))
    return ConvexBody(std::make_shared<detail::WulffImpl>(w->kind, *w->wulff_norm(), w->wulff_radius(),
                                                          Vec(w->center + s), w->axes()));
  return minkowski_sum({{1.0, *this}}, s);
}

Kind ConvexBody::kind() const { return impl_->kind; }
int ConvexBody::dim() const { return impl_->dim; }
const Vec& ConvexBody::center() const { return impl_->center; }
std::string ConvexBody::label() const { return impl_->label(); }
bool ConvexBody::quadratic() const { return impl_->quadratic(); }
const NormModel* ConvexBody::wulff_norm() const { return impl_->wulff_norm(); }
double ConvexBody::wulff_radius() const { return impl_->wulff_radius(); }

double ConvexBody::h(const Vec& theta) const {
  if (theta.size() != dim()) throw InvalidArgument("support function: wrong dimension");
  return impl_->value(theta.data());
}

Vec ConvexBody::boundary_point(const Vec& theta) const {
  if (theta.size() != dim()) throw InvalidArgument("support function: wrong dimension");
  Vec g(dim());
  impl_->grad(theta.data(), g.data());
  return g;
}

Mat ConvexBody::hess_h(const Vec& theta) const {
  if (theta.size() != dim()) throw InvalidArgument("support function: wrong dimension");
  Mat hm(dim(), dim());
  impl_->hess(theta.data(), hm.data());
  return 0.5 * (hm + hm.transpose());
}

Mat ConvexBody::tangential_hessian(const Vec& theta) const {
  const Vec t = theta / theta.norm();
  const Mat E = geom::tangent_frame(t);
  Mat T = E.transpose() * hess_h(t) * E;
  return 0.5 * (T + T.transpose());
}

double ConvexBody::gauge(const Vec& x) const {
  if (x.size() != dim()) throw InvalidArgument("gauge: wrong dimension");
  return gauge(x.data());
}

double ConvexBody::gauge(const double* x) const {
  const int n = dim();
  double y[16];
  std::vector<double> heap;
  double* yp = y;
  if (n > 16) {
    heap.resize(static_cast<std::size_t>(n));
    yp = heap.data();
  }
  for (int i = 0; i < n; ++i) yp[i] = x[i] - impl_->center(i);
  return impl_->gauge(yp);
}

Vec ConvexBody::gauge_grad(const Vec& x) const {
  if (x.size() != dim()) throw InvalidArgument("gauge: wrong dimension");
  const Vec y = x - center();
  Vec g(dim());
  impl_->gauge_grad(y.data(), g.data());
  return g;
}

SphereGrid default_grid(int dim) {
  if (dim == 2) return SphereGrid::product(2, 0, 256);
  if (dim == 3) return SphereGrid::product(3, 64, 128);
  if (dim == 4) return SphereGrid::product(4, 32, 64);
  return SphereGrid::product(dim, 20, 40);
}

namespace {

void require_supported(const ConvexBody& body, const NormModel& model) {
  if (body.dim() != model.dim()) throw InvalidArgument("body and norm dimensions differ");
  if (body.dim() > 3 && !(body.quadratic() && model.is_quadratic()))
    throw UnsupportedDimension("N > 3 is supported only for Euclidean/ellipsoidal bodies and norms");
}

// adj(T) for the small tangential matrices.
Mat adjugate(const Mat& T) {
  const auto m = T.rows();
  if (m == 1) return Mat::Ones(1, 1);
  if (m == 2) {
    Mat a(2, 2);
    a << T(1, 1), -T(0, 1), -T(1, 0), T(0, 0);
    return a;
  }
  return symfun::s_k_cofactor(T, static_cast<int>(m)).transpose();
}

}  // namespace

BodyIntegrals integrate(const ConvexBody& body, const NormModel& model, const SphereGrid& grid) {
  require_supported(body, model);
  if (grid.dim() != body.dim()) throw InvalidArgument("grid and body dimensions differ");
  const int n = body.dim();
  const std::size_t m = grid.size();
  std::vector<double> vol(m), per(m), curv(m), mink(m), mh(m), eig(m);
  const Vec c = body.center();
  bool failed = false;

#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < m; ++k) {
    const Vec th = grid.node_vec(k);
    const Mat E = geom::tangent_frame(th);
    Mat T = E.transpose() * body.hess_h(th) * E;
    T = 0.5 * (T + T.transpose());
    const Mat HT = E.transpose() * model.hess_h(th) * E;
    const double detT = T.determinant();
    const double trace_adj = HT.cwiseProduct(adjugate(T).transpose()).sum();
    const double w = grid.weight(k);
    const double hk = body.h(th);
    const double Hk = model.h(th);
    const double hc = hk - c.dot(th);
    vol[k] = w * hk * detT / n;
    per[k] = w * Hk * detT;
    curv[k] = w * Hk * trace_adj / (n - 1);
    mink[k] = w * hc * trace_adj / (n - 1);
    mh[k] = detT > 0.0 ? trace_adj / detT : std::numeric_limits<double>::quiet_NaN();
    Eigen::SelfAdjointEigenSolver<Mat> es(T, Eigen::EigenvaluesOnly);
    eig[k] = es.eigenvalues().minCoeff();
    if (!(eig[k] > 0.0)) {
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed) throw CurvatureSingularity("tangential Hessian is not positive definite at a grid node");

  BodyIntegrals out;
  out.volume = ordered_sum(vol);
  out.perimeter = ordered_sum(per);
  out.curvature_integral = ordered_sum(curv);
  out.minkowski_integral = ordered_sum(mink);
  out.mh_min = *std::min_element(mh.begin(), mh.end());
  out.mh_max = *std::max_element(mh.begin(), mh.end());
  out.mh_mean = out.curvature_integral * (n - 1) / out.perimeter;
  out.min_tangential_eig = *std::min_element(eig.begin(), eig.end());
  return out;
}

CertifiedIntegrals certified_integrals(const ConvexBody& body, const NormModel& model, const SphereGrid& grid,
                                       double rel_tol) {
  CertifiedIntegrals c;
  c.coarse = integrate(body, model, grid);
  c.fine = integrate(body, model, grid.refined());
  auto change = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
  c.max_rel_change = std::max({change(c.coarse.volume, c.fine.volume), change(c.coarse.perimeter, c.fine.perimeter),
                               change(c.coarse.curvature_integral, c.fine.curvature_integral),
                               change(c.coarse.minkowski_integral, c.fine.minkowski_integral)});
  c.certified = c.max_rel_change < rel_tol;
  return c;
}

ConvexBody wulff_ball(const NormModel& model, double r, const Vec& center) {
  return ConvexBody::wulff_ball(model, r, center);
}

double volume(const ConvexBody& body, const SphereGrid& grid) {
  // Volume needs no norm; the Euclidean one keeps the dimension check.
  const int n = body.dim();
  if (n > 3 && !body.quadratic()) throw UnsupportedDimension("N > 3 is supported only for Euclidean/ellipsoidal bodies");
  return integrate(body, NormModel::euclidean(n), grid).volume;
}

double volume(const ConvexBody& body) { return volume(body, default_grid(body.dim())); }

double perimeter_aniso(const ConvexBody& body, const NormModel& model, const SphereGrid& grid) {
  return integrate(body, model, grid).perimeter;
}

double perimeter_aniso(const ConvexBody& body, const NormModel& model) {
  return perimeter_aniso(body, model, default_grid(body.dim()));
}

double mean_curvature_aniso(const ConvexBody& body, const NormModel& model, const Vec& theta) {
  require_supported(body, model);
  const Vec th = theta / theta.norm();
  const Mat E = geom::tangent_frame(th);
  const Mat T = body.tangential_hessian(th);
  Eigen::SelfAdjointEigenSolver<Mat> es(T, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(lmin > 1e-12 * std::max(1.0, lmax)))
    throw CurvatureSingularity("tangential Hessian is singular at the requested normal");
  const Mat HT = E.transpose() * model.hess_h(th) * E;
  return (HT * T.inverse()).trace();
}

double mixed_volume_vbkk(const ConvexBody& body, const NormModel& model) {
  return perimeter_aniso(body, model) / body.dim();
}

double mixed_volume_vbbk(const ConvexBody& body, const NormModel& model) {
  return integrate(body, model, default_grid(body.dim())).curvature_integral / body.dim();
}

InequalityReport minkowski_inequality_check(const BodyIntegrals& ints, int dim, double tol_eq) {
  InequalityReport r;
  r.lhs = ints.perimeter * ints.perimeter;
  r.rhs = dim * ints.volume * ints.curvature_integral;
  r.slack = r.lhs - r.rhs;
  r.rel_slack = r.slack / r.lhs;
  r.holds = r.slack >= -1e-8 * r.lhs;
  r.equality = std::abs(r.slack) <= tol_eq * r.lhs;
  return r;
}

InequalityReport minkowski_inequality_check(const ConvexBody& body, const NormModel& model, double tol_eq) {
  return minkowski_inequality_check(integrate(body, model, default_grid(body.dim())), body.dim(), tol_eq);
}

MinkowskiFormulaReport minkowski_formula_check(const ConvexBody& body, const NormModel& model) {
  const auto ints = integrate(body, model, default_grid(body.dim()));
  MinkowskiFormulaReport r;
  r.perimeter = ints.perimeter;
  r.integral = ints.minkowski_integral;
  r.rel_error = std::abs(r.integral - r.perimeter) / r.perimeter;
  return r;
}

ValidationReport validate(const ConvexBody& body, const SphereGrid& grid) {
  ValidationReport r;
  r.min_tangential_eig = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec th = grid.node_vec(k);
    Eigen::SelfAdjointEigenSolver<Mat> es(body.tangential_hessian(th), Eigen::EigenvaluesOnly);
    r.min_tangential_eig = std::min(r.min_tangential_eig, es.eigenvalues().minCoeff());
    const double res = std::abs(body.boundary_point(th).dot(th) - body.h(th));
    r.max_support_residual = std::max(r.max_support_residual, res);
  }
  r.ok = r.min_tangential_eig > 0.0 && r.max_support_residual <= 1e-10 * std::max(1.0, body.center().norm() + 1.0);
  return r;
}

namespace {

// Local maximisation of f over the sphere by a tangent-frame pattern search.
template <class F>
double sphere_pattern_max(const F& f, Vec x, double start) {
  double best = f(x);
  double step = 0.05;
  best = std::max(best, start);
  while (step > 1e-10) {
    bool improved = false;
    const Mat E = geom::tangent_frame(x);
    for (int c = 0; c < E.cols() && !improved; ++c) {
      for (double sgn : {1.0, -1.0}) {
        const Vec y = (x + sgn * step * E.col(c)).normalized();
        const double v = f(y);
        if (v > best) {
          best = v;
          x = y;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace

DualExtent dual_extent(const ConvexBody& body, const NormModel& model, const SphereGrid& grid) {
  const Vec c = body.center();
  auto outer = [&](const Vec& th) { return model.h0(Vec(body.boundary_point(th) - c)); };
  auto inner = [&](const Vec& th) { return -(body.h(th) - c.dot(th)) / model.h(th); };
  std::size_t kmax = 0, kmin = 0;
  double vmax = -1.0, vmin = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec th = grid.node_vec(k);
    const double o = outer(th), i = inner(th);
    if (o > vmax) {
      vmax = o;
      kmax = k;
    }
    if (i > vmin) {
      vmin = i;
      kmin = k;
    }
  }
  DualExtent e;
  e.outer = sphere_pattern_max(outer, grid.node_vec(kmax), vmax);
  e.inner = -sphere_pattern_max(inner, grid.node_vec(kmin), vmin);
  return e;
}

}  // namespace fincap::bodies
