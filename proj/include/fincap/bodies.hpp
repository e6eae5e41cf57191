#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fincap/norms.hpp"
#include "fincap/sphere.hpp"

namespace fincap::bodies {

using geom::Mat;
using geom::SphereGrid;
using geom::Vec;
using norms::NormModel;

enum class Kind { WulffBall, Ellipsoid, EuclideanBall, MinkowskiSum, SampledSupport };

const char* kind_name(Kind k);

namespace detail {
class BodyImpl;
}

/// Strictly convex C^2 body given by its support function h, extended
/// 1-homogeneously to R^N. The boundary point with outer normal theta is
/// grad h(theta); the tangential Hessian E^T hess h(theta) E (E a tangent
/// frame at theta) equals h_ij + h delta_ij and holds the principal radii.
class ConvexBody {
 public:
  /// h = r H(theta) + <center, theta>: the ball of radius r for H_0.
  static ConvexBody wulff_ball(const NormModel& model, double r, const Vec& center);
  static ConvexBody ellipsoid(const Vec& semi_axes, const Vec& center);
  static ConvexBody euclidean_ball(int dim, double r, const Vec& center);
  /// sum_i lambda_i K_i (lambda_i > 0) plus an optional translation.
  static ConvexBody minkowski_sum(const std::vector<std::pair<double, ConvexBody>>& terms,
                                  const Vec& translation = Vec());
  /// Radial-basis interpolant of support values on the nodes of grid; center
  /// must be an interior point (used for the gauge).
  static ConvexBody sampled_support(const SphereGrid& grid, std::vector<double> values, const Vec& center,
                                    double kappa = 0.0);

  ConvexBody scaled(double t) const;
  ConvexBody translated(const Vec& shift) const;

  Kind kind() const;
  int dim() const;
  const Vec& center() const;
  std::string label() const;
  /// Support function and derivatives have closed forms from a quadratic
  /// norm (allowed in every dimension).
  bool quadratic() const;
  /// The norm whose Wulff ball this is, when it is one (else null).
  const NormModel* wulff_norm() const;
  double wulff_radius() const;

  double h(const Vec& theta) const;
  /// Boundary point tau(theta) = grad h(theta).
  Vec boundary_point(const Vec& theta) const;
  Mat hess_h(const Vec& theta) const;
  Mat tangential_hessian(const Vec& theta) const;

  /// Gauge of the body about its center: g(x) < 1 inside, = 1 on the
  /// boundary. level_set(x) = g(x) - 1.
  double gauge(const Vec& x) const;
  Vec gauge_grad(const Vec& x) const;
  double level_set(const Vec& x) const { return gauge(x) - 1.0; }
  /// Raw-pointer version for grid kernels.
  double gauge(const double* x) const;

 private:
  explicit ConvexBody(std::shared_ptr<const detail::BodyImpl> impl);
  std::shared_ptr<const detail::BodyImpl> impl_;
};

/// Default quadrature: 64 x 128 product rule for N = 3, 256 points on the
/// circle, 16 Gegenbauer nodes per polar angle above N = 3.
SphereGrid default_grid(int dim);

/// Sphere-grid integrals for one body and one norm.
struct BodyIntegrals {
  double volume = 0.0;             // (1/N) int h det T
  double perimeter = 0.0;          // P_H = int H(theta) det T
  double curvature_integral = 0.0; // int (M_H/(N-1)) H(nu)
  double minkowski_integral = 0.0; // int (M_H/(N-1)) <x - x0, nu>
  double mh_min = 0.0, mh_max = 0.0, mh_mean = 0.0;
  double min_tangential_eig = 0.0;
};

BodyIntegrals integrate(const ConvexBody& body, const NormModel& model, const SphereGrid& grid);

/// Integrals at grid and at grid.refined(); certified when every integral
/// changes by less than rel_tol.
struct CertifiedIntegrals {
  BodyIntegrals coarse;
  BodyIntegrals fine;
  double max_rel_change = 0.0;
  bool certified = false;
};
CertifiedIntegrals certified_integrals(const ConvexBody& body, const NormModel& model, const SphereGrid& grid,
                                       double rel_tol = 1e-3);

ConvexBody wulff_ball(const NormModel& model, double r, const Vec& center);
double volume(const ConvexBody& body, const SphereGrid& grid);
double volume(const ConvexBody& body);
double perimeter_aniso(const ConvexBody& body, const NormModel& model);
double perimeter_aniso(const ConvexBody& body, const NormModel& model, const SphereGrid& grid);
/// M_H at the boundary point with normal theta; throws CurvatureSingularity
/// if the tangential Hessian is singular there.
double mean_curvature_aniso(const ConvexBody& body, const NormModel& model, const Vec& theta);
/// V(B_{H_0}, Omega, ..., Omega) = P_H / N.
double mixed_volume_vbkk(const ConvexBody& body, const NormModel& model);
/// V(B_{H_0}, B_{H_0}, Omega, ..., Omega) = (1/N) int (M_H/(N-1)) H(nu).
double mixed_volume_vbbk(const ConvexBody& body, const NormModel& model);

struct InequalityReport {
  double lhs = 0.0;    // P_H^2
  double rhs = 0.0;    // N |Omega| int (M_H/(N-1)) H(nu)
  double slack = 0.0;  // lhs - rhs
  double rel_slack = 0.0;
  bool holds = true;     // slack >= -1e-8 lhs
  bool equality = false; // |slack| <= tol_eq lhs
};

InequalityReport minkowski_inequality_check(const ConvexBody& body, const NormModel& model, double tol_eq = 1e-4);
InequalityReport minkowski_inequality_check(const BodyIntegrals& ints, int dim, double tol_eq = 1e-4);

/// P_H against int (M_H/(N-1)) <x - x0, nu>.
struct MinkowskiFormulaReport {
  double perimeter = 0.0;
  double integral = 0.0;
  double rel_error = 0.0;
};
MinkowskiFormulaReport minkowski_formula_check(const ConvexBody& body, const NormModel& model);

/// Strict convexity and the Gauss-map identity <tau(theta), theta> = h(theta)
/// at every grid node.
struct ValidationReport {
  double min_tangential_eig = 0.0;
  double max_support_residual = 0.0;
  bool ok = false;
};
ValidationReport validate(const ConvexBody& body, const SphereGrid& grid);

/// Extent of the body about its center measured by the dual norm:
/// R1 = max H_0(tau(theta) - x0) and R0 = min h_c(theta)/H(theta), so that
/// B_{H_0}(x0, R0) is inside and B_{H_0}(x0, R1) contains the body.
struct DualExtent {
  double inner = 0.0;
  double outer = 0.0;
};
DualExtent dual_extent(const ConvexBody& body, const NormModel& model, const SphereGrid& grid);

}  // namespace fincap::bodies
