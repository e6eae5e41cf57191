#include <cmath>

#include "doctest.h"
#include "fincap/error.hpp"
#include "fincap/oracles.hpp"
#include "test_support.hpp"

using namespace fincap;
using namespace fincap::oracles;
using bodies::ConvexBody;
using testsupport::Mat;
using testsupport::Vec;
using testsupport::NormModel;

namespace {

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

const Vec kOrigin = Vec::Zero(3);
const std::vector<double> kLambdas{0.0, 0.5, 1.0, 1.5, 2.0};

NormModel reg_p4() { return NormModel::regularized(NormModel::pnorm(3, 4.0), 0.05); }

}  // namespace

TEST_CASE("mixed volume fit on balls") {
  auto unit = ConvexBody::euclidean_ball(3, 1.0, kOrigin);
  const auto f1 = mixed_volumes_by_fit(unit, unit, kLambdas);
  for (double c : {f1.vol_k, f1.v_lkk, f1.v_llk, f1.vol_l}) CHECK(c == doctest::Approx(4 * M_PI / 3).epsilon(1e-6));
  CHECK_FALSE(f1.rescaled);

  auto big = ConvexBody::euclidean_ball(3, 2.0, v3(0.3, -0.1, 0.2));
  const auto f2 = mixed_volumes_by_fit(big, unit, kLambdas);
  CHECK(f2.v_lkk == doctest::Approx(16 * M_PI / 3).epsilon(1e-6));
  CHECK(f2.v_llk == doctest::Approx(8 * M_PI / 3).epsilon(1e-6));
}

TEST_CASE("mixed volume fit agrees with anisotropic quadrature") {
  const auto H = reg_p4();
  auto K = ConvexBody::ellipsoid(v3(1, 1.5, 0.8), kOrigin);
  auto B = bodies::wulff_ball(H, 1.0, kOrigin);
  const auto fit = mixed_volumes_by_fit(K, B, kLambdas);
  CHECK(fit.v_lkk == doctest::Approx(bodies::mixed_volume_vbkk(K, H)).epsilon(1e-2));
  CHECK(fit.v_llk == doctest::Approx(bodies::mixed_volume_vbbk(K, H)).epsilon(1e-2));
}

TEST_CASE("mixed volume fit rescales ill-conditioned lambdas") {
  auto unit = ConvexBody::euclidean_ball(3, 1.0, kOrigin);
  const auto fit = mixed_volumes_by_fit(unit, unit, {0.0, 1000.0, 2000.0, 3000.0, 4000.0});
  CHECK(fit.rescaled);
  CHECK(fit.condition < 1e8);
  CHECK(fit.v_lkk == doctest::Approx(4 * M_PI / 3).epsilon(1e-6));
  CHECK_THROWS_AS(mixed_volumes_by_fit(unit, unit, {0.0, 1.0}), InvalidArgument);
}

TEST_CASE("dual norm by sampling matches closed forms") {
  const auto p4 = NormModel::pnorm(3, 4.0);
  CHECK(dual_norm_by_sampling(p4, v3(1, 1, 1), 4) == doctest::Approx(std::pow(3.0, 0.75)).epsilon(1e-5));

  fincap::Rng rng(17);
  const auto euc = NormModel::euclidean(3);
  const auto ell = NormModel::ellipsoidal(testsupport::random_spd(rng, 3));
  for (int k = 0; k < 10; ++k) {
    const Vec x = testsupport::random_vec(rng, 3);
    CHECK(testsupport::rel(dual_norm_by_sampling(euc, x, 4), x.norm()) < 1e-6);
    CHECK(testsupport::rel(dual_norm_by_sampling(ell, x, 4), ell.h0(x)) < 1e-6);
  }
}

TEST_CASE("dual norm by sampling is monotone in the level") {
  fincap::Rng rng(5);
  const auto H = reg_p4();
  for (int k = 0; k < 5; ++k) {
    const Vec x = testsupport::random_vec(rng, 3);
    double prev = 0.0;
    for (int level = 0; level <= 4; ++level) {
      const double v = dual_norm_by_sampling(H, x, level);
      CHECK(v >= prev);
      CHECK(v <= H.h0(x) * (1 + 1e-12));
      prev = v;
    }
    CHECK(testsupport::rel(prev, H.h0(x)) < 1e-6);
  }
}

TEST_CASE("dual of the dual returns the norm") {
  fincap::Rng rng(23);
  const std::vector<NormModel> models{NormModel::euclidean(3), NormModel::pnorm(3, 3.0, {1.0, 2.0, 0.5}),
                                      NormModel::ellipsoidal(testsupport::random_spd(rng, 3))};
  for (const auto& m : models) {
    CAPTURE(m.label());
    for (int k = 0; k < 4; ++k) {
      const Vec xi = testsupport::random_vec(rng, 3);
      const double hh = dual_norm_by_sampling([&](const Vec& x) { return m.h0(x); }, xi, 4);
      CHECK(testsupport::rel(hh, m.h(xi)) < 1e-6);
    }
  }
}

TEST_CASE("dual norm by sampling in two dimensions") {
  const auto p3 = NormModel::pnorm(2, 3.0);
  const Vec x = Vec::Constant(2, 1.0);
  CHECK(dual_norm_by_sampling(p3, x, 4) == doctest::Approx(p3.h0(x)).epsilon(1e-6));
}

TEST_CASE("monte carlo volumes") {
  const std::vector<std::pair<ConvexBody, double>> cases{
      {ConvexBody::euclidean_ball(3, 1.0, v3(0.5, 0, -1)), 4 * M_PI / 3},
      {ConvexBody::ellipsoid(v3(1, 2, 3), kOrigin), 8 * M_PI},
      {bodies::wulff_ball(reg_p4(), 1.0, kOrigin), bodies::volume(bodies::wulff_ball(reg_p4(), 1.0, kOrigin))},
  };
  for (const auto& [body, exact] : cases) {
    CAPTURE(body.label());
    const auto mc = montecarlo_volume(body, 2'000'000, 99);
    CHECK(mc.total == 2'000'000u);
    CHECK(std::abs(mc.estimate - exact) <= 3 * mc.stderr_);
  }
}

TEST_CASE("monte carlo is reproducible") {
  auto ell = ConvexBody::ellipsoid(v3(1, 0.7, 1.3), kOrigin);
  const auto a = montecarlo_volume(ell, 200'000, 7);
  const auto b = montecarlo_volume(ell, 200'000, 7);
  const auto c = montecarlo_volume(ell, 200'000, 8);
  CHECK(a.inside == b.inside);
  CHECK(a.inside != c.inside);
}

TEST_CASE("mesh perimeter of a spheroid") {
  // Prolate spheroid with semi-axes (1, 1, 2).
  auto phi = [](const Vec& x) { return x(0) * x(0) + x(1) * x(1) + x(2) * x(2) / 4 - 1; };
  const double e = std::sqrt(3.0) / 2;
  const double exact = 2 * M_PI * (1 + 2 / e * std::asin(e));
  const auto euc = NormModel::euclidean(3);
  const double area = mesh_surface_integral(phi, kOrigin, 5.0, [&](const Vec& n) { return euc.h(n); }, 5);
  CHECK(testsupport::rel(area, exact) < 5e-3);

  const auto H = reg_p4();
  auto ell = ConvexBody::ellipsoid(v3(1, 1, 2), kOrigin);
  const double ph = mesh_surface_integral(phi, kOrigin, 5.0, [&](const Vec& n) { return H.h(n); }, 5);
  CHECK(testsupport::rel(ph, bodies::perimeter_aniso(ell, H)) < 5e-3);
}
