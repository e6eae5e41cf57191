#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "fincap/error.hpp"
#include "fincap/field_io.hpp"
#include "fincap/pde.hpp"
#include "test_support.hpp"

using namespace fincap;
using namespace fincap::pde;
using testsupport::Mat;
using testsupport::Vec;

namespace {

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

NormModel ell123() { return NormModel::ellipsoidal(v3(1, 2, 3).asDiagonal().toDenseMatrix()); }
NormModel reg_p4() { return NormModel::regularized(NormModel::pnorm(3, 4.0), 0.05); }

std::shared_ptr<VoxelDomain> box_domain(int n) {
  const auto ax = uniform_axis(n, -1.0, 1.0);
  return std::make_shared<VoxelDomain>(std::array{ax, ax, ax}, LevelSet{}, [](const double*) { return -1.0; });
}

// Region 1 < H_0(x) < 2.
std::shared_ptr<VoxelDomain> annulus(const NormModel& m, int n) {
  double ext = 0.0;
  for (int a = 0; a < 3; ++a) {
    Vec e = Vec::Zero(3);
    e(a) = 1.0;
    ext = std::max(ext, 2.0 * m.h(e));
  }
  const auto ax = uniform_axis(n, -1.05 * ext, 1.05 * ext);
  return std::make_shared<VoxelDomain>(
      std::array{ax, ax, ax}, [m](const double* x) { return m.h0(x) - 1.0; },
      [m](const double* x) { return m.h0(x) - 2.0; });
}

ScalarField analytic(std::shared_ptr<const VoxelDomain> d, const std::function<double(const double*)>& f) {
  ScalarField out{d, std::vector<double>(d->size()), {}};
  for (std::size_t i = 0; i < d->size(); ++i) {
    const auto p = d->point(i);
    out.values[i] = f(p.data());
  }
  return out;
}

double annulus_error(const ScalarField& u, const NormModel& m) {
  double err = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (u.domain->kind(i) == NodeKind::Outside) continue;
    const auto p = u.domain->point(i);
    err = std::max(err, std::abs(u.values[i] - (2.0 / m.h0(p.data()) - 1.0)));
  }
  return err;
}

kernels::Problem problem_of(const ScalarField& f, const NormModel& m) {
  kernels::Problem p;
  p.domain = f.domain.get();
  p.model = &m;
  p.bc[1] = f.meta.bc_inner;
  p.bc[2] = f.meta.bc_outer;
  p.source = f.meta.source;
  return p;
}

}  // namespace

TEST_CASE("axes") {
  const auto u = uniform_axis(5, -1.0, 1.0);
  CHECK(u.front() == -1.0);
  CHECK(u.back() == 1.0);
  CHECK(u[2] == doctest::Approx(0.0));

  const auto g = graded_axis(60, -10.0, 10.0, -1.5, 1.5);
  REQUIRE(g.size() == 60);
  CHECK(g.front() == -10.0);
  CHECK(g.back() == 10.0);
  double core_h = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    REQUIRE(g[i] > g[i - 1]);
    if (g[i - 1] >= -1.5 - 1e-12 && g[i] <= 1.5 + 1e-12) {
      if (core_h == 0.0) core_h = g[i] - g[i - 1];
      CHECK(g[i] - g[i - 1] == doctest::Approx(core_h).epsilon(1e-9));
    }
    if (i >= 2) {
      const double r = (g[i] - g[i - 1]) / (g[i - 1] - g[i - 2]);
      CHECK(r <= 1.2 + 1e-9);
      CHECK(r >= 1.0 / 1.2 - 1e-9);
    }
  }
  CHECK(core_h > 0.0);
  CHECK(core_h < 20.0 / 59.0);
}

TEST_CASE("domain classification") {
  const auto m = NormModel::euclidean(3);
  const auto d = annulus(m, 24);
  const auto rep = d->report();
  CHECK(rep.ok);
  CHECK(rep.boundary_clear);
  CHECK(rep.active > 0);
  CHECK(rep.cut_edges > 0);
  CHECK(rep.min_theta >= 0.01);
  CHECK(rep.min_levelset_slope > 0.5);
  for (std::size_t i = 0; i < d->size(); ++i) {
    const auto p = d->point(i);
    const double r = m.h0(p.data());
    if (d->kind(i) == NodeKind::Outside) {
      CHECK(d->side(i) == (r <= 1.0 ? Side::Inner : Side::Outer));
    } else {
      CHECK(r >= 1.0 - 1e-12);
      CHECK(r <= 2.0 + 1e-12);
    }
  }
  CHECK_FALSE(box_domain(5)->report().boundary_clear);
}

TEST_CASE("energy of simple fields") {
  const auto d = box_domain(9);
  const auto m = NormModel::euclidean(3);
  ScalarField c = analytic(d, [](const double*) { return 0.7; });
  CHECK(std::abs(energy(c, m)) < 1e-15);
  const auto g = energy_gradient(c, m);
  for (double x : g.values) CHECK(std::abs(x) < 1e-14);

  // |box| = 8, so J = 4
  ScalarField lin = analytic(d, [](const double* x) { return x[0]; });
  CHECK(energy(lin, m) == doctest::Approx(4.0).epsilon(1e-13));

  // V(Du) for an ellipsoidal norm with linear u is constant: <A e1, e1>/2
  CHECK(energy(lin, ell123()) == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("energy gradient matches central differences") {
  Rng rng(11);
  for (const auto& m : {NormModel::euclidean(3), ell123(), reg_p4()}) {
    const auto d = annulus(m, 14);
    ScalarField u = analytic(d, [&](const double* x) { return 2.0 / m.h0(x) - 1.0; });
    u.meta.bc_inner = 1.0;
    u.meta.bc_outer = 0.0;
    u.meta.source = 0.3;
    for (std::size_t i = 0; i < u.values.size(); ++i)
      if (d->kind(i) == NodeKind::Active) u.values[i] += 0.05 * rng.normal();
    const auto g = energy_gradient(u, m);
    std::vector<double> dir(u.values.size(), 0.0);
    for (std::size_t i = 0; i < dir.size(); ++i)
      if (d->kind(i) == NodeKind::Active) dir[i] = rng.normal();
    double analytic_dd = 0.0;
    for (std::size_t i = 0; i < dir.size(); ++i) analytic_dd += g.values[i] * dir[i];
    const double eps = 1e-5;
    ScalarField up = u, um = u;
    for (std::size_t i = 0; i < dir.size(); ++i) {
      up.values[i] += eps * dir[i];
      um.values[i] -= eps * dir[i];
    }
    const double fd = (energy(up, m) - energy(um, m)) / (2 * eps);
    CHECK(testsupport::rel(analytic_dd, fd) < 1e-6);
    for (std::size_t i = 0; i < dir.size(); ++i)
      if (d->kind(i) != NodeKind::Active) CHECK(g.values[i] == 0.0);
  }
}

TEST_CASE("serial and parallel kernels agree") {
  Rng rng(12);
  for (const auto& m : {ell123(), reg_p4()}) {
    const auto d = annulus(m, 30);
    ScalarField u = analytic(d, [&](const double* x) { return 2.0 / m.h0(x) - 1.0 + 0.01 * std::sin(7 * x[0]); });
    u.meta.bc_inner = 1.0;
    u.meta.source = 0.5;
    for (std::size_t i = 0; i < u.values.size(); ++i)
      if (d->kind(i) == NodeKind::Active) u.values[i] += 0.01 * rng.normal();
    const auto p = problem_of(u, m);
    std::vector<double> gs(d->size()), gp(d->size());
    const double es = kernels::energy_gradient_serial(p, u.values.data(), gs.data());
    const double ep = kernels::energy_gradient_parallel(p, u.values.data(), gp.data());
    CHECK(es == ep);
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < gs.size(); ++i) {
      scale = std::max(scale, std::abs(gs[i]));
      diff = std::max(diff, std::abs(gs[i] - gp[i]));
    }
    CHECK(diff <= 1e-13 * scale);
    CHECK(kernels::energy_gradient_parallel(p, u.values.data(), nullptr) == ep);
  }
}

TEST_CASE("equal boundary values give a constant") {
  const auto m = reg_p4();
  const auto u = solve_dirichlet(annulus(m, 20), m, 0.4, 0.4);
  for (double x : u.values) CHECK(x == doctest::Approx(0.4).epsilon(1e-10));
}

TEST_CASE("annulus closed form converges") {
  for (const auto& m : {NormModel::euclidean(3), ell123()}) {
    SolveStats s1, s2;
    const auto u1 = solve_dirichlet(annulus(m, 24), m, 1.0, 0.0, {}, &s1);
    const auto u2 = solve_dirichlet(annulus(m, 48), m, 1.0, 0.0, {}, &s2);
    const double e1 = annulus_error(u1, m), e2 = annulus_error(u2, m);
    INFO(m.label() << " errors " << e1 << " " << e2);
    CHECK(e2 < e1);
    CHECK(e2 < 0.03);
    CHECK(s1.max_principle_violation <= 1e-10);
    CHECK(s2.max_principle_violation <= 1e-10);
  }
}

TEST_CASE("comparison and maximum principles") {
  const auto m = reg_p4();
  const auto d = annulus(m, 22);
  SolveStats st;
  const auto lo = solve_dirichlet(d, m, 1.0, 0.0, {}, &st);
  const auto hi = solve_dirichlet(d, m, 1.5, 0.2);
  for (std::size_t i = 0; i < lo.values.size(); ++i) {
    CHECK(lo.values[i] <= hi.values[i] + 1e-10);
    CHECK(lo.values[i] >= -1e-10);
    CHECK(lo.values[i] <= 1.0 + 1e-10);
  }
  CHECK(st.max_principle_violation <= 1e-10);
}

TEST_CASE("solver rejects bad input") {
  const auto d = box_domain(5);
  CHECK_THROWS_AS(solve_dirichlet(d, NormModel::euclidean(2), 1.0, 0.0), UnsupportedDimension);
  CHECK_THROWS_AS(solve_dirichlet(d, NormModel::euclidean(3), std::nan(""), 0.0), InvalidArgument);
  CHECK_THROWS_AS(solve_dirichlet(nullptr, NormModel::euclidean(3), 1.0, 0.0), InvalidArgument);
  const auto m = NormModel::euclidean(3);
  const auto ball = bodies::ConvexBody::wulff_ball(m, 1.0, Vec::Zero(3));
  ExteriorOptions o;
  o.grid = 24;
  o.r_out = {1.01};
  CHECK_THROWS_AS(solve_exterior_capacity(ball, m, o), InvalidArgument);
}

TEST_CASE("exterior capacity on a small grid") {
  const auto m = ell123();
  const auto ball = bodies::ConvexBody::wulff_ball(m, 1.0, v3(0.1, -0.2, 0.05));
  ExteriorOptions o;
  o.grid = 40;
  const auto r = solve_exterior_capacity(ball, m, o);
  REQUIRE(r.capacity.size() == 2);
  CHECK(r.r_out[0] < r.r_out[1]);
  CHECK(r.capacity[0] > r.capacity[1]);
  CHECK(r.capacity[1] > r.cap_extrapolated);
  CHECK(r.monotonicity_violation <= 1e-8);
  // N (N - 2) |B_{H_0}(1)| with |B_{H_0}(1)| = (4 pi / 3) sqrt(det A)
  const double exact = 4.0 * M_PI * std::sqrt(6.0);
  CHECK(r.cap_extrapolated == doctest::Approx(exact).epsilon(0.1));
  CHECK(r.far_constant == doctest::Approx(1.0).epsilon(0.1));
  for (std::size_t i = 0; i < r.field.values.size(); ++i) {
    if (r.field.domain->kind(i) != NodeKind::Active) continue;
    CHECK(r.field.values[i] > 0.0);
    CHECK(r.field.values[i] < 1.0);
  }
  const auto flux = boundary_flux(r.extrapolated, m, ball, true, 12);
  CHECK(flux.mean == doctest::Approx(1.0).epsilon(0.15));
  CHECK(flux.cv < 0.05);
}

TEST_CASE("torsion of a Wulff ball") {
  for (const auto& m : {NormModel::euclidean(3), ell123()}) {
    const auto ball = bodies::ConvexBody::wulff_ball(m, 1.0, Vec::Zero(3));
    TorsionOptions o;
    o.grid = 40;
    SolveStats st;
    const auto psi = solve_torsion(ball, m, o, &st);
    double err = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
      if (psi.domain->kind(i) == NodeKind::Outside) continue;
      const auto p = psi.domain->point(i);
      const double h0 = m.h0(p.data());
      err = std::max(err, std::abs(psi.values[i] - (h0 * h0 - 1.0) / 6.0));
      if (psi.domain->kind(i) == NodeKind::Active) CHECK(psi.values[i] < 0.0);
    }
    CHECK(err / (1.0 / 6.0) < 0.05);
  }
}

TEST_CASE("finsler laplacian of closed forms") {
  const auto m = ell123();
  const auto d = annulus(m, 40);
  const auto fund = finsler_laplacian_apply(analytic(d, [&](const double* x) { return 1.0 / m.h0(x); }), m);
  const auto quad = finsler_laplacian_apply(analytic(d, [&](const double* x) {
                                              const double r = m.h0(x);
                                              return 0.5 * r * r;
                                            }), m);
  REQUIRE(fund.evaluated > 100);
  REQUIRE(quad.evaluated > 100);
  double fmax = 0.0, qerr = 0.0;
  for (std::size_t i = 0; i < d->size(); ++i) {
    if (std::isnan(fund.value.values[i])) continue;
    fmax = std::max(fmax, std::abs(fund.value.values[i]));
    qerr = std::max(qerr, std::abs(quad.value.values[i] - 3.0));
  }
  // the individual terms of Delta_H (1/H_0) are of order 2 / H_0^3 >= 0.25
  CHECK(fmax < 0.05);
  CHECK(qerr < 1e-8);
}

TEST_CASE("curvature decomposition on Wulff spheres") {
  const auto m = ell123();
  const auto d = annulus(m, 40);
  const auto u = analytic(d, [&](const double* x) { return 1.0 / m.h0(x); });
  const auto rep = curvature_decomposition_check(u, m, 1.0 / 1.5);
  REQUIRE(rep.nodes > 50);
  CHECK(rep.max_residual < 0.05 * rep.max_laplacian + 0.05);
  CHECK(rep.mean_residual < rep.max_residual + 1e-15);
}

TEST_CASE("decay brackets of the fundamental solution") {
  const auto m = ell123();
  const auto d = annulus(m, 40);
  ScalarField u = analytic(d, [&](const double* x) { return 1.0 / m.h0(x); });
  const auto rep = decay_brackets(u, m, Vec::Zero(3), 1.2, 1.8);
  REQUIRE(rep.samples > 100);
  CHECK(rep.a_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.a_ratio() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.b_ratio() < 1.05);
}

TEST_CASE("field sampling") {
  const auto d = box_domain(11);
  const auto f = analytic(d, [](const double* x) { return 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[2]; });
  const double p[3] = {0.13, -0.41, 0.77};
  bool clean = false;
  CHECK(f.sample(p, &clean) == doctest::Approx(1.0 + 0.26 + 0.41 + 0.385).epsilon(1e-13));
  CHECK(clean);
}

TEST_CASE("field files round trip") {
  const auto m = NormModel::euclidean(3);
  const auto ax = graded_axis(20, -4.0, 4.0, -1.2, 1.2);
  const auto d = std::make_shared<VoxelDomain>(
      std::array{ax, ax, ax}, [m](const double* x) { return m.h0(x) - 1.0; },
      [m](const double* x) { return m.h0(x) - 3.5; });
  ScalarField f = analytic(d, [](const double* x) { return std::sin(x[0]) + x[1] * x[2] / 3.0; });
  f.meta = {"exterior-capacity", "euclidean", "ball", 1.0, 0.0, 0.0};
  const auto path = (std::filesystem::temp_directory_path() / "fincap_field_roundtrip.bin").string();
  write_field(f, path);
  const auto g = read_field(path);
  CHECK(g.dims == std::array<long long, 3>{20, 20, 20});
  CHECK(g.origin[0] == -4.0);
  CHECK(g.values == f.values);
  CHECK(g.axes[1] == ax);
  CHECK(g.meta.problem == "exterior-capacity");
  CHECK(g.meta.bc_inner == 1.0);
  CHECK(std::filesystem::exists(path + ".json"));
  std::ofstream(path, std::ios::binary | std::ios::trunc) << "garbage";
  CHECK_THROWS_AS(read_field(path), InvalidArgument);
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}
