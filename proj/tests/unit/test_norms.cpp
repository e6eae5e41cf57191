#include <cmath>
#include <limits>

#include "doctest.h"
#include "fincap/error.hpp"
#include "fincap/norms.hpp"
#include "test_support.hpp"

using namespace fincap;
using namespace fincap::norms;
using testsupport::Mat;
using testsupport::Vec;

namespace {

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Mat diag3(double a, double b, double c) { return v3(a, b, c).asDiagonal(); }

Vec fd_grad(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec p = x, m = x;
    p(i) += h;
    m(i) -= h;
    g(i) = (f(p) - f(m)) / (2 * h);
  }
  return g;
}

Mat fd_jac(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
  Mat J(x.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec p = x, m = x;
    p(i) += h;
    m(i) -= h;
    J.col(i) = (f(p) - f(m)) / (2 * h);
  }
  return J;
}

}  // namespace

TEST_CASE("closed-form values") {
  CHECK(NormModel::euclidean(3).h(v3(3, 4, 0)) == doctest::Approx(5.0).epsilon(1e-15));
  auto ell = NormModel::ellipsoidal(diag3(1, 4, 9));
  CHECK(ell.h(v3(1, 1, 1)) == doctest::Approx(std::sqrt(14.0)).epsilon(1e-15));
  CHECK(ell.h0(v3(1, 2, 3)) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  auto p4 = NormModel::pnorm(3, 4.0);
  CHECK(p4.h(v3(1, 1, 0)) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-15));
  CHECK(p4.h0(v3(1, 1, 1)) == doctest::Approx(std::pow(3.0, 0.75)).epsilon(1e-14));
  auto p2 = NormModel::pnorm(4, 2.0);
  Vec x(4);
  x << 1, -2, 0.5, 3;
  CHECK(p2.h0(x) == doctest::Approx(x.norm()).epsilon(1e-14));
  CHECK(p4.h(Vec::Zero(3)) == 0.0);
}

TEST_CASE("invalid inputs") {
  auto e = NormModel::euclidean(3);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(e.h(v3(nan, 0, 0)), InvalidArgument);
  CHECK_THROWS_AS(e.h0(v3(1, std::numeric_limits<double>::infinity(), 0)), InvalidArgument);
  CHECK_THROWS_AS(e.grad_h(Vec::Zero(3)), DomainError);
  CHECK_THROWS_AS(e.hess_h(Vec::Zero(3)), DomainError);
  CHECK_THROWS_AS(e.grad_h0(Vec::Zero(3)), DomainError);
  CHECK_THROWS_AS(NormModel::pnorm(3, 1.0), InvalidArgument);
  CHECK_THROWS_AS(NormModel::pnorm(3, 2.0, {1, 2}), InvalidArgument);
  CHECK_THROWS_AS(NormModel::ellipsoidal(diag3(1, -1, 1)), InvalidArgument);
  CHECK_THROWS_AS(NormModel::regularized(e, 1.0), InvalidArgument);
  CHECK_THROWS_AS(e.h(Vec::Zero(2)), InvalidArgument);
}

TEST_CASE("euler relation and hessian annihilates xi, all families") {
  Rng rng(11);
  for (int n : {2, 3, 5}) {
    for (const auto& [name, m] : testsupport::smooth_families(n)) {
      CAPTURE(name);
      for (int s = 0; s < 50; ++s) {
        const Vec xi = testsupport::random_vec(rng, n, 2.0);
        const double H = m.h(xi);
        CHECK(std::abs(m.grad_h(xi).dot(xi) - H) <= 1e-12 * H);
        CHECK((m.hess_h(xi) * xi).norm() <= 1e-10 * std::max(1.0, xi.norm()));
        CHECK(std::abs(m.grad_v(xi).dot(xi) - H * H) <= 1e-12 * H * H);
      }
    }
  }
}

TEST_CASE("ellipsoidal hessian of V is the matrix itself") {
  Rng rng(5);
  const Mat A = testsupport::random_spd(rng, 3);
  auto m = NormModel::ellipsoidal(A);
  CHECK(m.is_quadratic());
  for (int s = 0; s < 20; ++s) {
    const Vec xi = testsupport::random_vec(rng, 3);
    CHECK((m.hess_v(xi) - A).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((m.hess_v0(xi) * A - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("duality identities") {
  SUBCASE("ellipsoidal diag(1,2,3)") {
    auto r = check_duality_identities(NormModel::ellipsoidal(diag3(1, 2, 3)), 1000);
    CHECK(r.hessian_checked);
    CHECK(r.max_residual() < 1e-10);
  }
  SUBCASE("euclidean") {
    auto r = check_duality_identities(NormModel::euclidean(3), 1000);
    CHECK(r.max_residual() < 1e-12);
  }
  SUBCASE("regularized p=4, eps=0.1") {
    auto m = NormModel::regularized(NormModel::pnorm(3, 4.0), 0.1);
    auto r = check_duality_identities(m, 1000);
    CHECK(r.max_residual() < 1e-6);
  }
  SUBCASE("every smooth family, N=3 and N=4") {
    for (int n : {3, 4})
      for (const auto& [name, m] : testsupport::smooth_families(n)) {
        CAPTURE(name);
        CHECK(check_duality_identities(m, 200, 9).max_residual() < 1e-8);
      }
  }
}

TEST_CASE("regularized p=4 derivatives agree with finite differences at step 1e-5") {
  auto m = NormModel::regularized(NormModel::pnorm(3, 4.0), 0.1);
  Rng rng(21);
  const double h = 1e-5;
  for (int s = 0; s < 100; ++s) {
    const Vec xi = testsupport::random_vec(rng, 3);
    const Vec x = testsupport::random_vec(rng, 3);
    auto H = [&](const Vec& z) { return m.h(z); };
    auto H0 = [&](const Vec& z) { return m.h0(z); };
    auto gV = [&](const Vec& z) { return m.grad_v(z); };
    auto gV0 = [&](const Vec& z) { return m.grad_v0(z); };
    CHECK((fd_grad(H, xi, h) - m.grad_h(xi)).norm() < 1e-6);
    CHECK((fd_grad(H0, x, h) - m.grad_h0(x)).norm() < 1e-6);
    CHECK((fd_jac(gV, xi, h) - m.hess_v(xi)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((fd_jac(gV0, x, h) - m.hess_v0(x)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("finite-difference convergence order of gradients and hessians") {
  Rng rng(33);
  for (const auto& [name, m] : testsupport::smooth_families(3)) {
    CAPTURE(name);
    const Vec xi = testsupport::random_vec(rng, 3);
    auto H = [&](const Vec& z) { return m.h(z); };
    auto gH = [&](const Vec& z) { return m.grad_h(z); };
    const double e1 = (fd_grad(H, xi, 1e-2) - m.grad_h(xi)).norm();
    const double e2 = (fd_grad(H, xi, 5e-3) - m.grad_h(xi)).norm();
    CHECK(std::log2(e1 / e2) >= 1.8);
    const double f1 = (fd_jac(gH, xi, 1e-2) - m.hess_h(xi)).cwiseAbs().maxCoeff();
    const double f2 = (fd_jac(gH, xi, 5e-3) - m.hess_h(xi)).cwiseAbs().maxCoeff();
    if (f1 > 1e-11) CHECK(std::log2(f1 / f2) >= 1.8);
  }
}

TEST_CASE("homogeneity, evenness, convexity of V on random samples") {
  Rng rng(44);
  for (int n : {3, 4}) {
    for (const auto& [name, m] : testsupport::smooth_families(n)) {
      CAPTURE(name);
      for (int s = 0; s < 200; ++s) {
        const Vec xi = testsupport::random_vec(rng, n);
        double t = rng.uniform(-10.0, 10.0);
        if (t == 0.0) t = 1.0;
        const double Ht = m.h(Vec(t * xi));
        CHECK(std::abs(Ht - std::abs(t) * m.h(xi)) <= 1e-12 * Ht);
        CHECK(m.h(Vec(-xi)) == doctest::Approx(m.h(xi)).epsilon(1e-14));
        CHECK(m.h(xi) > 0.0);
        Eigen::SelfAdjointEigenSolver<Mat> es(m.hess_v(xi));
        CHECK(es.eigenvalues().minCoeff() > 0.0);
      }
    }
  }
}

TEST_CASE("equivalence constants bracket sampled ratios") {
  Rng rng(55);
  for (int n : {2, 3, 4}) {
    for (const auto& [name, m] : testsupport::smooth_families(n)) {
      CAPTURE(name);
      const auto& eq = m.equivalence();
      CHECK(eq.sigma > 0.0);
      CHECK(eq.sigma <= eq.gamma);
      for (int s = 0; s < 2000; ++s) {
        const Vec xi = testsupport::random_vec(rng, n);
        const double ratio = m.h(xi) / xi.norm();
        CHECK(ratio >= eq.sigma * (1 - 1e-12));
        CHECK(ratio <= eq.gamma * (1 + 1e-12));
      }
    }
  }
  auto p4 = NormModel::pnorm(3, 4.0);
  CHECK(p4.equivalence().sigma == doctest::Approx(std::pow(3.0, 0.25) / std::sqrt(3.0)).epsilon(1e-9));
  CHECK(p4.equivalence().gamma == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bare p-norm flags missing uniform convexity") {
  CHECK_FALSE(NormModel::pnorm(3, 4.0).uniformly_convex());
  CHECK(NormModel::pnorm(3, 2.0).uniformly_convex());
  CHECK(NormModel::regularized(NormModel::pnorm(3, 4.0)).uniformly_convex());
  CHECK(NormModel::regularized(NormModel::pnorm(3, 4.0)).eps() == 0.05);
}

TEST_CASE("sampled norm reproduces a smooth norm from its samples") {
  auto grid = geom::SphereGrid::product(3, 12, 24);
  auto truth = NormModel::ellipsoidal(diag3(1.0, 1.5, 2.0));
  std::vector<double> vals;
  for (std::size_t k = 0; k < grid.size(); ++k) vals.push_back(truth.h(grid.node_vec(k)));
  auto m = NormModel::sampled(grid, vals);
  CHECK_FALSE(m.reliable_hessian());
  Rng rng(66);
  for (int s = 0; s < 100; ++s) {
    const Vec xi = testsupport::random_vec(rng, 3);
    CHECK(m.h(xi) == doctest::Approx(truth.h(xi)).epsilon(5e-3));
    CHECK(m.h(Vec(-xi)) == doctest::Approx(m.h(xi)).epsilon(1e-12));
  }
  auto r = check_duality_identities(m, 200);
  CHECK_FALSE(r.hessian_checked);
  CHECK(r.max_residual() < 1e-8);
}

TEST_CASE("numeric dual agrees with closed form through the regularization limit") {
  // eps -> tiny: regularized ellipsoidal norm has closed form
  // sqrt(xi^T ((1-eps)A + eps I) xi); compare its numeric dual.
  const Mat A = diag3(1.0, 2.0, 5.0);
  const double eps = 0.3;
  auto reg = NormModel::regularized(NormModel::ellipsoidal(A), eps);
  auto ref = NormModel::ellipsoidal((1 - eps) * A + eps * Mat::Identity(3, 3));
  Rng rng(77);
  for (int s = 0; s < 100; ++s) {
    const Vec x = testsupport::random_vec(rng, 3);
    CHECK(reg.h0(x) == doctest::Approx(ref.h0(x)).epsilon(1e-12));
    CHECK((reg.grad_h0(x) - ref.grad_h0(x)).norm() < 1e-10);
  }
}
