#pragma once

// Spherical radial-basis interpolant extended 1-homogeneously:
// F(xi) = |xi| sum_k c_k K(<xi/|xi|, theta_k>), K(t) = exp(kappa (t - 1)),
// optionally symmetrised to K(t) + K(-t) so that F is even.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fincap/error.hpp"
#include "fincap/sphere.hpp"

namespace fincap::detail {

class SphericalRbf {
 public:
  SphericalRbf(const geom::SphereGrid& grid, const std::vector<double>& values, double kappa, bool even)
      : dim_(grid.dim()), kappa_(kappa), even_(even) {
    if (kappa_ <= 0.0) {
      const double spacing =
          std::pow(geom::sphere_area(dim_) / static_cast<double>(grid.size()), 1.0 / (dim_ - 1));
      kappa_ = 1.0 / (2.25 * spacing * spacing);
    }
    const std::size_t m = grid.size();
    nodes_.resize(m * static_cast<std::size_t>(dim_));
    for (std::size_t k = 0; k < m; ++k) {
      auto nd = grid.node(k);
      for (int d = 0; d < dim_; ++d) nodes_[k * dim_ + d] = nd[static_cast<std::size_t>(d)];
    }
    Eigen::MatrixXd K(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) K(i, j) = k0(dot(&nodes_[i * dim_], &nodes_[j * dim_]));
    K.diagonal().array() += 1e-10;
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(m));
    Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
    Eigen::VectorXd c = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !c.allFinite())
      throw ConstructionError("spherical interpolant: system is singular");
    coef_.assign(c.data(), c.data() + m);
  }

  int dim() const { return dim_; }
  double kappa() const { return kappa_; }
  std::size_t size() const { return coef_.size(); }

  double value(const double* xi) const {
    const double r = std::sqrt(dot(xi, xi));
    if (r == 0.0) return 0.0;
    double f = 0.0;
    for (std::size_t k = 0; k < coef_.size(); ++k) f += coef_[k] * k0(dot(xi, &nodes_[k * dim_]) / r);
    return r * f;
  }

  double grad(const double* xi, double* g) const {
    const double r = std::sqrt(dot(xi, xi));
    double f = 0.0, ct = 0.0;
    for (int i = 0; i < dim_; ++i) g[i] = 0.0;
    for (std::size_t k = 0; k < coef_.size(); ++k) {
      const double* th = &nodes_[k * dim_];
      const double t = dot(xi, th) / r;
      const double kp = coef_[k] * k1(t);
      f += coef_[k] * k0(t);
      ct += kp * t;
      for (int i = 0; i < dim_; ++i) g[i] += kp * th[i];
    }
    const double a = f - ct;
    for (int i = 0; i < dim_; ++i) g[i] += a * xi[i] / r;
    return r * f;
  }

  // Row-major Hessian: (a P + sum_k c_k K''(t_k) w_k w_k^T) / r with
  // w_k = theta_k - t_k nu and a = f - sum_k c_k K'(t_k) t_k.
  void hess(const double* xi, double* hm) const {
    const double r = std::sqrt(dot(xi, xi));
    std::vector<double> nu(static_cast<std::size_t>(dim_)), w(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) nu[static_cast<std::size_t>(i)] = xi[i] / r;
    double f = 0.0, ct = 0.0;
    for (int k = 0; k < dim_ * dim_; ++k) hm[k] = 0.0;
    for (std::size_t k = 0; k < coef_.size(); ++k) {
      const double* th = &nodes_[k * dim_];
      const double t = dot(nu.data(), th);
      f += coef_[k] * k0(t);
      ct += coef_[k] * k1(t) * t;
      const double c2 = coef_[k] * k2(t);
      for (int i = 0; i < dim_; ++i) w[static_cast<std::size_t>(i)] = th[i] - t * nu[static_cast<std::size_t>(i)];
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) hm[i * dim_ + j] += c2 * w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
    }
    const double a = f - ct;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        hm[i * dim_ + j] =
            (hm[i * dim_ + j] + a * ((i == j ? 1.0 : 0.0) - nu[static_cast<std::size_t>(i)] * nu[static_cast<std::size_t>(j)])) / r;
  }

 private:
  double dot(const double* a, const double* b) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += a[i] * b[i];
    return s;
  }
  double k0(double t) const {
    const double v = std::exp(kappa_ * (t - 1.0));
    return even_ ? v + std::exp(-kappa_ * (t + 1.0)) : v;
  }
  double k1(double t) const {
    const double v = kappa_ * std::exp(kappa_ * (t - 1.0));
    return even_ ? v - kappa_ * std::exp(-kappa_ * (t + 1.0)) : v;
  }
  double k2(double t) const {
    const double v = kappa_ * kappa_ * std::exp(kappa_ * (t - 1.0));
    return even_ ? v + kappa_ * kappa_ * std::exp(-kappa_ * (t + 1.0)) : v;
  }

  int dim_;
  double kappa_;
  bool even_;
  std::vector<double> nodes_;
  std::vector<double> coef_;
};

}  // namespace fincap::detail
