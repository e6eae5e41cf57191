#pragma once

// Polar (Legendre-conjugate) evaluation shared by norms and bodies.
//
// For a positive 1-homogeneous F with F^2 uniformly convex, the minimiser
// xi* of F(xi)^2/2 - <x, xi> satisfies F(xi*) grad F(xi*) = x, and the polar
// F°(x) = sup <x, xi> / F(xi) equals F(xi*). Also grad(F°^2/2)(x) = xi* and
// hess(F°^2/2)(x) = hess(F^2/2)(xi*)^{-1}.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "fincap/error.hpp"
#include "fincap/sphere.hpp"

namespace fincap::detail {

// F must provide: int dim; double value(const double*) const;
// double grad_v(const double*, double*) const (returns F^2/2, writes
// grad of F^2/2); void hess_v(const double*, double*) const.
template <class F>
bool legendre_newton(const F& f, const Eigen::VectorXd& xhat, Eigen::VectorXd& xi, int max_iter) {
  using Vec = Eigen::VectorXd;
  using Mat = Eigen::MatrixXd;
  const int n = f.dim;
  Vec g(n);
  Mat hm(n, n);
  auto phi = [&](const Vec& z) { return 0.5 * std::pow(f.value(z.data()), 2) - xhat.dot(z); };
  double fv = phi(xi);
  for (int it = 0; it < max_iter; ++it) {
    f.grad_v(xi.data(), g.data());
    g -= xhat;
    const double gn = g.norm();
    if (gn <= 1e-13) return true;
    f.hess_v(xi.data(), hm.data());
    Eigen::LDLT<Mat> ldlt(hm);
    Vec d;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) d = -ldlt.solve(g);
    if (d.size() != n || !d.allFinite() || d.dot(g) >= 0.0) d = -g;
    // Full step first, judged by the gradient as well as by phi: close to
    // the minimiser phi is flat to rounding and Armijo alone stalls.
    {
      Vec trial = xi + d;
      Vec gt(n);
      const double ft = phi(trial);
      f.grad_v(trial.data(), gt.data());
      gt -= xhat;
      if (std::isfinite(ft) && (ft <= fv + 1e-4 * d.dot(g) || gt.norm() < 0.5 * gn)) {
        xi = trial;
        fv = ft;
        continue;
      }
    }
    double t = 0.5;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Vec trial = xi + t * d;
      const double ft = phi(trial);
      if (std::isfinite(ft) && ft < fv + 1e-4 * t * d.dot(g)) {
        xi = trial;
        fv = ft;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) return gn <= 1e-10;
  }
  f.grad_v(xi.data(), g.data());
  return (g - xhat).norm() <= 1e-10;
}

// Returns the polar value at x; optionally writes its gradient and the
// Hessian of half its square (row-major). upper_unit bounds the polar on
// unit vectors and is only used for the failure bracket.
template <class F>
double legendre_conjugate(const F& f, const double* x, double* grad_out, double* hess_out, double upper_unit,
                          const char* what) {
  using Vec = Eigen::VectorXd;
  using Mat = Eigen::MatrixXd;
  const int n = f.dim;
  Eigen::Map<const Vec> xm(x, n);
  const double r = xm.norm();
  if (r == 0.0) {
    if (grad_out || hess_out) throw DomainError(std::string(what) + ": gradient at the origin");
    return 0.0;
  }
  const Vec xhat = xm / r;
  Vec xi = xhat / std::pow(f.value(xhat.data()), 2);
  bool ok = legendre_newton(f, xhat, xi, 60);
  if (!ok) {
    const auto seeds = geom::seed_directions(n, 162);
    double best = std::numeric_limits<double>::infinity();
    double lower = 0.0;
    Vec best_xi;
    for (const auto& th : seeds) {
      const double s = xhat.dot(th);
      if (s <= 0.0) continue;
      const double Fth = f.value(th.data());
      lower = std::max(lower, s / Fth);
      const double phi = -0.5 * s * s / (Fth * Fth);
      if (phi < best) {
        best = phi;
        best_xi = th * (s / (Fth * Fth));
      }
    }
    if (best_xi.size() == n) {
      xi = best_xi;
      ok = legendre_newton(f, xhat, xi, 200);
    }
    if (!ok)
      throw ConvergenceFailure(std::string(what) + ": Newton iteration did not converge", {}, r * lower,
                               r * upper_unit);
  }
  const double Fxi = f.value(xi.data());
  if (grad_out)
    for (int i = 0; i < n; ++i) grad_out[i] = xi(i) / Fxi;
  if (hess_out) {
    Mat hm(n, n);
    f.hess_v(xi.data(), hm.data());
    Mat inv = hm.inverse();
    inv = 0.5 * (inv + inv.transpose());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) hess_out[i * n + j] = inv(i, j);
  }
  return r * Fxi;
}

}  // namespace fincap::detail
