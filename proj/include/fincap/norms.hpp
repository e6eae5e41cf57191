#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fincap/sphere.hpp"

namespace fincap::norms {

using geom::Mat;
using geom::Vec;

enum class Family { Euclidean, Ellipsoidal, PNorm, Regularized, Sampled };

const char* family_name(Family f);

struct EquivalenceConstants {
  double sigma = 0.0;  // min of H on the unit sphere
  double gamma = 0.0;  // max of H on the unit sphere
};

namespace detail {
class NormImpl;
}

/// A norm H on R^N together with its dual H_0 and the potentials
/// V = H^2/2, V_0 = H_0^2/2.
///
/// Cheap to copy (shared immutable state). The pointer-based methods are
/// the hot path used by the grid kernels; the Vec overloads wrap them.
/// Derivatives throw DomainError at the origin.
class NormModel {
 public:
  static NormModel euclidean(int dim);
  /// H(xi) = sqrt(xi^T A xi), A symmetric positive definite.
  static NormModel ellipsoidal(const Mat& A);
  /// H(xi) = (sum_i a_i |xi_i|^p)^(1/p).
  static NormModel pnorm(int dim, double p, std::vector<double> weights = {});
  /// H_eps = sqrt((1 - eps) H^2 + eps |xi|^2).
  static NormModel regularized(const NormModel& base, double eps = 0.05);
  /// Even spherical radial-basis interpolant of positive samples of H on
  /// the nodes of grid, extended 1-homogeneously. kappa <= 0 picks the
  /// kernel width from the node spacing.
  static NormModel sampled(const geom::SphereGrid& grid, std::vector<double> values,
                           double kappa = 0.0);

  Family family() const;
  int dim() const;
  std::string label() const;

  // Family parameters (meaningful only for the matching family).
  double p() const;
  const std::vector<double>& weights() const;
  double eps() const;
  const NormModel& base() const;
  const Mat& matrix() const;

  /// V is a quadratic form xi^T A xi / 2 (Euclidean, Ellipsoidal).
  bool is_quadratic() const;
  /// A with V(xi) = xi^T A xi / 2; throws unless is_quadratic().
  Mat quadratic_matrix() const;
  /// Second derivatives of H^2 are bounded and positive definite away from
  /// the origin (false for a bare PNorm with p != 2).
  bool uniformly_convex() const;
  bool closed_form_dual() const;
  /// Trustworthy analytic second derivatives (false for Sampled).
  bool reliable_hessian() const;

  const EquivalenceConstants& equivalence() const;

  // Hot path, raw arrays of length dim().
  double h(const double* xi) const;
  double grad_h(const double* xi, double* g) const;        // returns H
  void hess_h(const double* xi, double* hm) const;          // row-major
  double grad_v(const double* xi, double* g) const;        // returns V
  void hess_v(const double* xi, double* hm) const;
  double h0(const double* x) const;
  double grad_h0(const double* x, double* g) const;        // returns H_0
  void hess_v0(const double* x, double* hm) const;

  double h(const Vec& xi) const;
  Vec grad_h(const Vec& xi) const;
  Mat hess_h(const Vec& xi) const;
  double v(const Vec& xi) const;
  Vec grad_v(const Vec& xi) const;
  Mat hess_v(const Vec& xi) const;
  double h0(const Vec& x) const;
  Vec grad_h0(const Vec& x) const;
  Mat hess_h0(const Vec& x) const;
  double v0(const Vec& x) const;
  Vec grad_v0(const Vec& x) const;
  Mat hess_v0(const Vec& x) const;

 private:
  explicit NormModel(std::shared_ptr<const detail::NormImpl> impl);
  std::shared_ptr<const detail::NormImpl> impl_;
};

/// Maximum residuals of the duality identities over random samples.
struct IdentityReport {
  std::size_t samples = 0;
  double h0_of_grad_h = 0.0;     // |H_0(grad H(xi)) - 1|
  double h_of_grad_h0 = 0.0;     // |H(grad H_0(x)) - 1|
  double inverse_map = 0.0;      // |H(xi) grad H_0(grad H(xi)) - xi| / |xi|
  double hessian_product = 0.0;  // max entry of hess V(xi) hess V_0(grad H(xi)) - Id
  bool hessian_checked = false;  // skipped for Sampled norms
  double max_residual() const;
};

IdentityReport check_duality_identities(const NormModel& model, std::size_t sample_count,
                                        std::uint64_t seed = 1);

}  // namespace fincap::norms
