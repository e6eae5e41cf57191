#include <cmath>

#include "doctest.h"
#include "fincap/capacity.hpp"
#include "fincap/error.hpp"
#include "test_support.hpp"

using namespace fincap;
using namespace fincap::capacity;
using bodies::ConvexBody;
using testsupport::Vec;

namespace {

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

CapacityOptions small(int grid = 32) {
  CapacityOptions o;
  o.exterior.grid = grid;
  o.flux_pol = 16;
  return o;
}

CapacityReport synthetic(double cv, double slack, double r1, double r2) {
  CapacityReport r;
  r.flux.cv = cv;
  r.minkowski_slack = slack;
  r.r1 = r1;
  r.r2 = r2;
  return r;
}

}  // namespace

TEST_CASE("verdict rule") {
  const Thresholds t;
  CHECK(symmetry_verdict(synthetic(0.01, 1e-5, 0.01, 0.01), t) == Verdict::WulffConsistent);
  CHECK(symmetry_verdict(synthetic(0.06, 1e-5, 0.01, 0.01), t) == Verdict::Inconclusive);
  CHECK(symmetry_verdict(synthetic(0.01, 2e-3, 0.01, 0.01), t) == Verdict::Inconclusive);
  CHECK(symmetry_verdict(synthetic(0.01, 1e-5, 0.09, 0.01), t) == Verdict::Inconclusive);
  // a single grid never concludes not-wulff
  CHECK(symmetry_verdict(synthetic(0.5, 0.1, 0.5, 0.5), t) == Verdict::Inconclusive);
  const auto big = synthetic(0.2, 0.1, 0.3, 0.3), mid = synthetic(0.07, 0.1, 0.3, 0.3);
  CHECK(symmetry_verdict({big, big}, t) == Verdict::NotWulff);
  CHECK(symmetry_verdict({mid, big}, t) == Verdict::Inconclusive);
  CHECK(symmetry_verdict({big, synthetic(0.01, 1e-5, 0.01, 0.01)}, t) == Verdict::WulffConsistent);
  CHECK_THROWS_AS(symmetry_verdict(std::vector<CapacityReport>{}, t), InvalidArgument);
  CHECK(std::string(verdict_name(Verdict::NotWulff)) == "not-wulff");
}

TEST_CASE("Euclidean unit ball on a small grid") {
  const auto m = NormModel::euclidean(3);
  const auto ball = ConvexBody::wulff_ball(m, 1.0, Vec::Zero(3));
  CapacityArtifacts art;
  const auto r = compute_capacity(ball, m, small(), &art);
  CHECK(r.c_formula == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.volume == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-6));
  CHECK(r.perimeter == doctest::Approx(4.0 * M_PI).epsilon(1e-6));
  CHECK(r.cap_value > r.cap_extrapolated);
  CHECK(r.cap_extrapolated == doctest::Approx(4.0 * M_PI).epsilon(0.1));
  CHECK(r.flux.cv >= 0.0);
  CHECK(r.r1 >= 0.0);
  CHECK(r.r2 >= 0.0);
  const auto [r1, r2] = check_appendix_a(r);
  CHECK(r1 == r.r1);
  CHECK(r2 == r.r2);
  CHECK(r.minkowski_slack < 1e-6);
  CHECK(r.decay.samples > 0);
  CHECK(r.decay.a_ratio() < 3.0);
  CHECK(r.decay.b_ratio() < 3.0);
  CHECK(art.flux.values.size() == r.flux.samples);
  CHECK(art.exterior.field.values.size() == art.exterior.field.domain->size());

  const auto j = to_json(r);
  for (const char* key : {"problem", "norm", "body", "grid", "cap_value", "cap_extrapolated", "flux", "C_formula",
                          "residuals", "verdict", "convergence"})
    CHECK(j.contains(key));
  CHECK(j["flux"].contains("cv"));
  CHECK(j["residuals"].contains("r2"));
  CHECK(j["convergence"].contains("final_grad"));
}

TEST_CASE("capacity scales, translates and is monotone in the body") {
  const auto m = NormModel::ellipsoidal(v3(1, 2, 3).asDiagonal().toDenseMatrix());
  const auto o = small(28);
  const auto base = ConvexBody::wulff_ball(m, 1.0, Vec::Zero(3));
  const auto r1 = compute_capacity(base, m, o);
  const auto r2 = compute_capacity(base.scaled(2.0), m, o);
  CHECK(r2.cap_value == doctest::Approx(2.0 * r1.cap_value).epsilon(1e-6));
  CHECK(r2.cap_extrapolated == doctest::Approx(2.0 * r1.cap_extrapolated).epsilon(1e-6));

  const auto r3 = compute_capacity(base.translated(v3(0.3, -1.1, 2.0)), m, o);
  CHECK(r3.cap_value == doctest::Approx(r1.cap_value).epsilon(1e-6));
  CHECK(r3.verdict == r1.verdict);

  const auto bigger = ConvexBody::ellipsoid(v3(1.3, 1.6, 2.0), Vec::Zero(3));
  const auto r4 = compute_capacity(bigger, m, o);
  CHECK(r4.cap_extrapolated >= r1.cap_extrapolated);
}

TEST_CASE("capacity rejects other dimensions") {
  const auto m = NormModel::euclidean(2);
  const auto disc = ConvexBody::euclidean_ball(2, 1.0, Vec::Zero(2));
  CHECK_THROWS_AS(compute_capacity(disc, m), UnsupportedDimension);
}
