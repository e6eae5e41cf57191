#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fincap::geom {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Quadrature nodes and weights on the unit sphere S^{N-1}.
///
/// For N = 3 the product rule is Gauss-Legendre in cos(polar) times the
/// trapezoid rule in azimuth. For N > 3 each polar-type angle gets a
/// Gauss-Gegenbauer rule matching its sin^k Jacobian; N = 2 is the
/// trapezoid rule on the circle.
class SphereGrid {
 public:
  static SphereGrid product(int dim, int n_pol, int n_az);
  /// Arbitrary nodes (unit vectors, stored row-wise) with given weights.
  static SphereGrid from_points(int dim, std::vector<double> nodes, std::vector<double> weights);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return weights_.size(); }
  int n_pol() const noexcept { return n_pol_; }
  int n_az() const noexcept { return n_az_; }

  std::span<const double> node(std::size_t k) const {
    return {nodes_.data() + k * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  Vec node_vec(std::size_t k) const;
  double weight(std::size_t k) const { return weights_[k]; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// Same rule with both orders doubled.
  SphereGrid refined() const;

 private:
  int dim_ = 0;
  int n_pol_ = 0;
  int n_az_ = 0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Surface area of S^{N-1}.
double sphere_area(int dim);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);
/// Gauss rule for the weight (1 - t^2)^lambda on [-1, 1] (Golub-Welsch).
void gauss_gegenbauer(int n, double lambda, std::vector<double>& x, std::vector<double>& w);

/// Orthonormal basis of the tangent space at the unit vector theta, as the
/// columns of an N x (N-1) matrix. For N = 3 this is the azimuthal frame
/// (e_polar, e_azimuth), with a fixed choice at the two poles; other
/// dimensions use a Householder reflection sending e_N to theta.
Mat tangent_frame(const Vec& theta);

/// Deterministic quasi-uniform direction sets.
std::vector<Vec> fibonacci_sphere(std::size_t count);
/// Vertices of the subdivided icosahedron (level 0 = 12 vertices).
std::vector<Vec> icosphere(int level);
/// Gaussian directions from a fixed seed (used where N != 3).
std::vector<Vec> random_directions(int dim, std::size_t count, std::uint64_t seed);
/// Seed directions for global searches on S^{N-1}.
std::vector<Vec> seed_directions(int dim, std::size_t approx_count);

}  // namespace fincap::geom
