#include <cmath>

#include "doctest.h"
#include "fincap/bodies.hpp"
#include "fincap/error.hpp"
#include "test_support.hpp"

using namespace fincap;
using namespace fincap::bodies;
using testsupport::Mat;
using testsupport::Vec;

namespace {

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

const Vec kOrigin = Vec::Zero(3);

NormModel reg_p4() { return NormModel::regularized(NormModel::pnorm(3, 4.0), 0.05); }

// Sum of principal curvatures of {sum x_i^2/a_i^2 = 1} at x from the
// level-set formula div(grad F / |grad F|).
double ellipsoid_mean_curvature(const Vec& axes, const Vec& x) {
  const int n = static_cast<int>(x.size());
  Vec g(n);
  Mat Hs = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    g(i) = 2 * x(i) / (axes(i) * axes(i));
    Hs(i, i) = 2 / (axes(i) * axes(i));
  }
  const double gn = g.norm();
  return (gn * gn * Hs.trace() - g.dot(Hs * g)) / (gn * gn * gn);
}

}  // namespace

TEST_CASE("volumes and perimeters with closed forms") {
  auto ball = ConvexBody::euclidean_ball(3, 1.0, kOrigin);
  auto euc = NormModel::euclidean(3);
  CHECK(volume(ball) == doctest::Approx(4 * M_PI / 3).epsilon(1e-6));
  CHECK(perimeter_aniso(ball, euc) == doctest::Approx(4 * M_PI).epsilon(1e-6));
  auto ell = ConvexBody::ellipsoid(v3(1, 2, 3), kOrigin);
  CHECK(volume(ell) == doctest::Approx(8 * M_PI).epsilon(1e-5));
  CHECK(ell.h(v3(0, 0, 1)) == doctest::Approx(3.0));
  auto wb = wulff_ball(euc, 1.0, kOrigin);
  for (int k = 0; k < 5; ++k) CHECK(wb.h(v3(0.1 * k, 1, -0.3)) == doctest::Approx(v3(0.1 * k, 1, -0.3).norm()));
}

TEST_CASE("wulff ball perimeter is N times its volume") {
  for (const auto& [name, m] : testsupport::smooth_families(3)) {
    CAPTURE(name);
    auto b = wulff_ball(m, 1.0, kOrigin);
    const auto ints = integrate(b, m, default_grid(3));
    CHECK(ints.perimeter == doctest::Approx(3 * ints.volume).epsilon(1e-6));
    CHECK(mixed_volume_vbkk(b, m) == doctest::Approx(ints.volume).epsilon(1e-6));
    CHECK(mixed_volume_vbbk(b, m) == doctest::Approx(ints.volume).epsilon(1e-6));
  }
}

TEST_CASE("anisotropic mean curvature") {
  Rng rng(1);
  auto euc = NormModel::euclidean(3);
  auto ball = ConvexBody::euclidean_ball(3, 1.0, kOrigin);
  for (int s = 0; s < 20; ++s) {
    const Vec th = testsupport::random_unit(rng, 3);
    CHECK(mean_curvature_aniso(ball, euc, th) == doctest::Approx(2.0).epsilon(1e-12));
  }
  CHECK(mean_curvature_aniso(ball, euc, v3(0, 0, 1)) == doctest::Approx(2.0).epsilon(1e-12));
  for (const auto& [name, m] : testsupport::smooth_families(3)) {
    CAPTURE(name);
    auto b = wulff_ball(m, 2.5, v3(0.3, -1, 2));
    for (int s = 0; s < 20; ++s)
      CHECK(mean_curvature_aniso(b, m, testsupport::random_unit(rng, 3)) == doctest::Approx(2.0 / 2.5).epsilon(1e-9));
  }
  const Vec axes = v3(1, 1, 2);
  auto ell = ConvexBody::ellipsoid(axes, kOrigin);
  CHECK(mean_curvature_aniso(ell, euc, v3(0, 0, 1)) == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(mean_curvature_aniso(ell, euc, v3(1, 0, 0)) == doctest::Approx(1.25).epsilon(1e-6));
  for (int s = 0; s < 50; ++s) {
    const Vec th = testsupport::random_unit(rng, 3);
    const double oracle = ellipsoid_mean_curvature(axes, ell.boundary_point(th));
    CHECK(mean_curvature_aniso(ell, euc, th) == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("mixed volumes of a ball of radius 2") {
  auto euc = NormModel::euclidean(3);
  auto b = ConvexBody::euclidean_ball(3, 2.0, kOrigin);
  CHECK(mixed_volume_vbkk(b, euc) == doctest::Approx(16 * M_PI / 3).epsilon(1e-6));
  CHECK(mixed_volume_vbbk(b, euc) == doctest::Approx(8 * M_PI / 3).epsilon(1e-6));
}

TEST_CASE("minkowski inequality") {
  auto euc = NormModel::euclidean(3);
  for (double r : {0.5, 1.0, 2.0}) {
    auto rep = minkowski_inequality_check(ConvexBody::euclidean_ball(3, r, kOrigin), euc);
    CHECK(rep.lhs == doctest::Approx(16 * M_PI * M_PI * std::pow(r, 4)).epsilon(1e-6));
    CHECK(rep.rhs == doctest::Approx(16 * M_PI * M_PI * std::pow(r, 4)).epsilon(1e-6));
    CHECK(rep.equality);
  }
  for (const auto& [name, m] : testsupport::smooth_families(3)) {
    CAPTURE(name);
    auto rep = minkowski_inequality_check(wulff_ball(m, 1.7, v3(1, 0, 0)), m);
    CHECK(std::abs(rep.rel_slack) < 1e-6);
    CHECK(rep.equality);
  }
  auto rep = minkowski_inequality_check(ConvexBody::ellipsoid(v3(1, 1, 2), kOrigin), euc);
  CHECK(rep.slack > 1e-3 * rep.lhs);
  CHECK_FALSE(rep.equality);
}

TEST_CASE("minkowski inequality holds on a randomized suite") {
  Rng rng(2);
  auto p4 = reg_p4();
  const auto grid = geom::SphereGrid::product(3, 32, 64);
  for (int s = 0; s < 12; ++s) {
    const Vec axes = v3(rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(0.5, 2));
    auto ell = ConvexBody::ellipsoid(axes, testsupport::random_vec(rng, 3));
    auto wb = wulff_ball(p4, rng.uniform(0.5, 2), kOrigin);
    for (const NormModel& m : {NormModel::euclidean(3), p4}) {
      for (const auto& b : {ell, wb, ConvexBody::minkowski_sum({{1.0, ell}, {rng.uniform(0.2, 2), wb}})}) {
        auto r = minkowski_inequality_check(integrate(b, m, grid), 3);
        CHECK(r.holds);
        CHECK(r.slack >= -1e-8 * r.lhs);
      }
    }
  }
}

TEST_CASE("translation invariance and scaling laws") {
  auto m = reg_p4();
  auto ell = ConvexBody::ellipsoid(v3(1, 1.5, 2), kOrigin);
  auto wb = wulff_ball(NormModel::ellipsoidal(Mat(v3(1, 2, 3).asDiagonal())), 1.0, kOrigin);
  auto sum = ConvexBody::minkowski_sum({{1.0, ell}, {0.5, wb}});
  const auto grid = default_grid(3);
  for (const auto& b : {ell, sum}) {
    CAPTURE(b.label());
    const auto base = integrate(b, m, grid);
    const auto moved = integrate(b.translated(v3(3, -2, 1)), m, grid);
    CHECK(std::abs(moved.volume - base.volume) <= 1e-10 * base.volume);
    CHECK(std::abs(moved.perimeter - base.perimeter) <= 1e-10 * base.perimeter);
    CHECK(std::abs(moved.curvature_integral - base.curvature_integral) <= 1e-10 * base.curvature_integral);
    CHECK(std::abs(moved.minkowski_integral - base.minkowski_integral) <= 1e-10 * base.minkowski_integral);
    const double t = 1.7;
    const auto sc = integrate(b.scaled(t), m, grid);
    CHECK(sc.volume == doctest::Approx(std::pow(t, 3) * base.volume).epsilon(1e-12));
    CHECK(sc.perimeter == doctest::Approx(std::pow(t, 2) * base.perimeter).epsilon(1e-12));
    const Vec th = v3(0.2, -0.5, 0.8).normalized();
    CHECK(mean_curvature_aniso(b.scaled(t), m, th) == doctest::Approx(mean_curvature_aniso(b, m, th) / t).epsilon(1e-12));
    CHECK(mean_curvature_aniso(b.translated(v3(1, 1, 1)), m, th) ==
          doctest::Approx(mean_curvature_aniso(b, m, th)).epsilon(1e-12));
  }
  auto p = wulff_ball(m, 2.0, kOrigin);
  auto q = wulff_ball(m, 1.0, kOrigin);
  CHECK(volume(p) == doctest::Approx(8 * volume(q)).epsilon(1e-3));
}

TEST_CASE("support of a minkowski sum is the sum of supports") {
  Rng rng(3);
  auto a = ConvexBody::ellipsoid(v3(1, 2, 0.5), v3(1, 0, 0));
  auto b = wulff_ball(reg_p4(), 0.7, v3(0, 1, 0));
  auto s = ConvexBody::minkowski_sum({{1.0, a}, {2.0, b}});
  for (int k = 0; k < 100; ++k) {
    const Vec th = testsupport::random_vec(rng, 3);
    CHECK(s.h(th) == a.h(th) + 2.0 * b.h(th));
    CHECK((s.boundary_point(th) - a.boundary_point(th) - 2.0 * b.boundary_point(th)).norm() < 1e-14);
  }
  CHECK((s.center() - v3(1, 2, 0)).norm() < 1e-15);
}

TEST_CASE("anisotropic minkowski-type formula on centered bodies") {
  auto m = reg_p4();
  auto euc = NormModel::euclidean(3);
  for (const auto& b : {ConvexBody::ellipsoid(v3(1, 1, 2), kOrigin), wulff_ball(m, 1.3, kOrigin),
                        ConvexBody::minkowski_sum({{1.0, ConvexBody::ellipsoid(v3(1, 0.5, 1), kOrigin)},
                                                   {1.0, wulff_ball(m, 0.5, kOrigin)}})}) {
    for (const NormModel& model : {euc, m}) {
      const auto r = minkowski_formula_check(b, model);
      CHECK(r.rel_error < 1e-6);
    }
  }
}

TEST_CASE("gauge and level set") {
  Rng rng(4);
  auto m = reg_p4();
  std::vector<ConvexBody> list = {
      ConvexBody::ellipsoid(v3(1, 2, 3), v3(0.5, 0, 0)), wulff_ball(m, 1.5, v3(0, 0, 1)),
      ConvexBody::minkowski_sum({{1.0, ConvexBody::ellipsoid(v3(1, 1, 2), kOrigin)}, {0.5, wulff_ball(m, 1.0, kOrigin)}},
                                v3(0.2, 0.1, 0))};
  for (const auto& b : list) {
    CAPTURE(b.label());
    for (int k = 0; k < 50; ++k) {
      const Vec th = testsupport::random_unit(rng, 3);
      const Vec x = b.boundary_point(th);
      CHECK(b.gauge(x) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(std::abs(b.level_set(b.center())) == doctest::Approx(1.0));
      // gauge gradient is the normal scaled so that <grad g, x - c> = 1
      const Vec g = b.gauge_grad(x);
      CHECK((g.normalized() - th).norm() < 1e-8);
      CHECK(g.dot(x - b.center()) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("validation and certification") {
  auto ell = ConvexBody::ellipsoid(v3(1, 1, 2), kOrigin);
  auto v = validate(ell, default_grid(3));
  CHECK(v.ok);
  CHECK(v.min_tangential_eig > 0.0);
  auto c = certified_integrals(ell, NormModel::euclidean(3), default_grid(3));
  CHECK(c.certified);
  auto e = dual_extent(ell, NormModel::euclidean(3), default_grid(3));
  CHECK(e.inner == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.outer == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("construction errors and dimension limits") {
  CHECK_THROWS_AS(wulff_ball(NormModel::pnorm(3, 4.0), 1.0, kOrigin), ConstructionError);
  CHECK_THROWS_AS(wulff_ball(NormModel::euclidean(3), -1.0, kOrigin), InvalidArgument);
  CHECK_THROWS_AS(ConvexBody::ellipsoid(v3(1, 0, 1), kOrigin), InvalidArgument);
  // Support values of a non-convex shape (a dimpled ball) are rejected.
  auto grid = geom::SphereGrid::product(3, 10, 20);
  std::vector<double> vals;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double z = grid.node_vec(k)(2);
    vals.push_back(1.0 - 0.8 * std::exp(-20 * (1 - z)));
  }
  CHECK_THROWS_AS(ConvexBody::sampled_support(grid, vals, kOrigin), ConstructionError);

  Vec c4 = Vec::Zero(4);
  auto ball4 = ConvexBody::euclidean_ball(4, 1.0, c4);
  CHECK(volume(ball4) == doctest::Approx(M_PI * M_PI / 2).epsilon(1e-8));
  CHECK(perimeter_aniso(ball4, NormModel::euclidean(4)) == doctest::Approx(2 * M_PI * M_PI).epsilon(1e-8));
  Vec ax(4);
  ax << 1, 2, 0.5, 1.5;
  auto ell4 = ConvexBody::ellipsoid(ax, c4);
  CHECK(volume(ell4) == doctest::Approx(M_PI * M_PI / 2 * 1.5).epsilon(1e-6));
  auto r4 = minkowski_inequality_check(ell4, NormModel::euclidean(4));
  CHECK(r4.holds);
  auto p4 = NormModel::regularized(NormModel::pnorm(4, 4.0));
  CHECK_THROWS_AS(perimeter_aniso(ball4, p4), UnsupportedDimension);
  CHECK_THROWS_AS(volume(wulff_ball(p4, 1.0, c4)), UnsupportedDimension);
}

TEST_CASE("sampled support interpolates an ellipsoid") {
  auto grid = geom::SphereGrid::product(3, 16, 32);
  auto ell = ConvexBody::ellipsoid(v3(1, 1.2, 1.5), kOrigin);
  std::vector<double> vals;
  for (std::size_t k = 0; k < grid.size(); ++k) vals.push_back(ell.h(grid.node_vec(k)));
  auto s = ConvexBody::sampled_support(grid, vals, kOrigin);
  CHECK(volume(s) == doctest::Approx(volume(ell)).epsilon(5e-3));
  CHECK(s.kind() == Kind::SampledSupport);
}
