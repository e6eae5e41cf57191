#include "fincap/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "fincap/bodies.hpp"
#include "fincap/capacity.hpp"
#include "fincap/norms.hpp"
#include "fincap/oracles.hpp"
#include "fincap/pde.hpp"
#include "fincap/symfun.hpp"

namespace fincap::acceptance {

namespace {

using bodies::ConvexBody;
using capacity::CapacityReport;
using capacity::Verdict;
using geom::Mat;
using geom::Vec;
using json = nlohmann::json;
using norms::NormModel;

// Pinned tolerances, one block per criterion.
constexpr double kRadialSup = 0.03;
constexpr double kSolveSeconds = 600.0;
constexpr double kFluxBand = 0.05;
constexpr double kFluxCv = 0.02;
constexpr double kIdentity = 0.05;
constexpr double kCFormula = 1e-6;
constexpr double kAnnulusSup = 0.02;
constexpr double kAnnulusRatio = 1.7;
constexpr double kNewtonIdentity = 1e-12;
constexpr double kMinkowskiHolds = 1e-8;
constexpr double kMinkowskiEq = 1e-4;
constexpr double kMixedRel = 0.01;
constexpr double kMixedExact = 1e-6;
constexpr double kDuality = 1e-6;
constexpr double kDualitySeconds = 1.0;
constexpr double kTorsionSup = 0.03;
constexpr double kTorsionVolume = 0.05;
constexpr double kMinkowskiFormula = 0.02;
constexpr double kDecayRatio = 3.0;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Mat diag3(double a, double b, double c) { return v3(a, b, c).asDiagonal().toDenseMatrix(); }

NormModel ell123() { return NormModel::ellipsoidal(diag3(1, 2, 3)); }
NormModel reg_p4() { return NormModel::regularized(NormModel::pnorm(3, 4.0), 0.05); }
NormModel ell_tilted() {
  Mat A(3, 3);
  A << 2.0, 0.4, 0.1, 0.4, 1.0, 0.2, 0.1, 0.2, 1.5;
  return NormModel::ellipsoidal(A);
}

const Vec kOrigin = Vec::Zero(3);

std::string fmt(double x, const char* spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, x);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

struct Named {
  std::string name;
  NormModel model;
};

struct TestBody {
  std::string name;
  ConvexBody body;
  int wulff_of;  // index into the norm list, -1 when not a Wulff ball
};

// Norms and bodies shared by the convex-geometry criteria.
std::vector<Named> geometry_norms() { return {{"euclidean", NormModel::euclidean(3)}, {"ellipsoidal", ell_tilted()}, {"reg-p4", reg_p4()}}; }

std::vector<TestBody> geometry_bodies(const std::vector<Named>& n) {
  const auto ball = ConvexBody::euclidean_ball(3, 1.0, kOrigin);
  const auto e112 = ConvexBody::ellipsoid(v3(1, 1, 2), kOrigin);
  const auto e123 = ConvexBody::ellipsoid(v3(1, 2, 3), kOrigin);
  const auto e211 = ConvexBody::ellipsoid(v3(2, 1, 1), kOrigin);
  const auto e121 = ConvexBody::ellipsoid(v3(1, 2, 1), kOrigin);
  const auto w_ell = ConvexBody::wulff_ball(n[1].model, 1.0, kOrigin);
  const auto w_p4 = ConvexBody::wulff_ball(n[2].model, 1.0, kOrigin);
  using T = std::vector<std::pair<double, ConvexBody>>;
  return {
      {"wulff euclidean r=1", ConvexBody::wulff_ball(n[0].model, 1.0, kOrigin), 0},
      {"wulff euclidean r=2 shifted", ConvexBody::wulff_ball(n[0].model, 2.0, v3(0.5, -1, 2)), 0},
      {"euclidean ball r=1.3", ConvexBody::euclidean_ball(3, 1.3, v3(-0.2, 0, 0.4)), 0},
      {"wulff ellipsoidal r=1", w_ell, 1},
      {"wulff ellipsoidal r=1.7 shifted", ConvexBody::wulff_ball(n[1].model, 1.7, v3(1, 1, -1)), 1},
      {"wulff reg-p4 r=1", w_p4, 2},
      {"wulff reg-p4 r=0.6 shifted", ConvexBody::wulff_ball(n[2].model, 0.6, v3(0, 2, 0)), 2},
      {"ellipsoid (1,1,2)", e112, -1},
      {"ellipsoid (1,2,3)", e123, -1},
      {"ellipsoid (0.5,1,1)", ConvexBody::ellipsoid(v3(0.5, 1, 1), kOrigin), -1},
      {"ellipsoid (2,1,1.5) shifted", ConvexBody::ellipsoid(v3(2, 1, 1.5), v3(3, 0, 1)), -1},
      {"ellipsoid (1,1.2,1.4)", ConvexBody::ellipsoid(v3(1, 1.2, 1.4), kOrigin), -1},
      {"ellipsoid (3,1,1)", ConvexBody::ellipsoid(v3(3, 1, 1), kOrigin), -1},
      {"ball + ellipsoid (1,1,2)", ConvexBody::minkowski_sum(T{{1.0, ball}, {1.0, e112}}), -1},
      {"ellipsoid (1,2,3) + ellipsoid (2,1,1)", ConvexBody::minkowski_sum(T{{1.0, e123}, {1.0, e211}}), -1},
      {"wulff reg-p4 + ball", ConvexBody::minkowski_sum(T{{1.0, w_p4}, {1.0, ball}}), -1},
      {"wulff ellipsoidal + ellipsoid (1,1,2)", ConvexBody::minkowski_sum(T{{1.0, w_ell}, {1.0, e112}}), -1},
      {"0.5 ball + wulff reg-p4 shifted", ConvexBody::minkowski_sum(T{{0.5, ball}, {1.0, w_p4}}, v3(1, 0, 0)), -1},
      {"ellipsoid (1,1,2) + ellipsoid (1,2,1)", ConvexBody::minkowski_sum(T{{1.0, e112}, {2.0, e121}}), -1},
      {"wulff ellipsoidal + wulff reg-p4", ConvexBody::minkowski_sum(T{{1.0, w_ell}, {1.0, w_p4}}), -1},
  };
}

struct Run {
  CapacityReport report;
  double seconds = 0.0;
  double sup_error = kNaN;  // against 1/H_0 for H_0 <= 3 (Wulff balls of radius 1)
  double raw_error = kNaN;  // same for the truncated field at the largest radius
};

// Exterior runs shared between criteria within one pass.
class Runs {
 public:
  explicit Runs(const SuiteOptions& o) : opts_(o) {}

  const Run& get(const std::string& key, const ConvexBody& body, const NormModel& m, int grid, bool radial) {
    const std::string full = key + " @" + std::to_string(grid);
    auto it = cache_.find(full);
    if (it != cache_.end()) return it->second;
    if (opts_.log) opts_.log("  exterior solve: " + full);
    capacity::CapacityOptions co;
    co.exterior.grid = grid;
    capacity::CapacityArtifacts art;
    Run r;
    const Stopwatch sw;
    r.report = capacity::compute_capacity(body, m, co, &art);
    r.seconds = sw.seconds();
    if (radial) {
      r.sup_error = radial_error(art.exterior.extrapolated, m, body.center());
      r.raw_error = radial_error(art.exterior.field, m, body.center());
    }
    return cache_.emplace(full, std::move(r)).first->second;
  }

  const std::map<std::string, Run>& all() const { return cache_; }

 private:
  static double radial_error(const pde::ScalarField& f, const NormModel& m, const Vec& c) {
    const auto& d = *f.domain;
    double err = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.kind(i) == pde::NodeKind::Outside) continue;
      const auto p = d.point(i);
      const double y[3] = {p[0] - c(0), p[1] - c(1), p[2] - c(2)};
      const double rho = m.h0(y);
      if (rho > 3.0) continue;
      err = std::max(err, std::abs(f.values[i] - 1.0 / rho));
    }
    return err;
  }

  const SuiteOptions& opts_;
  std::map<std::string, Run> cache_;
};

std::vector<Named> radial_norms() { return {{"euclidean", NormModel::euclidean(3)}, {"ellipsoidal diag(1,2,3)", ell123()}}; }

const Run& radial_run(Runs& runs, const Named& n, int grid) {
  return runs.get("B_H0(1) under " + n.name, ConvexBody::wulff_ball(n.model, 1.0, kOrigin), n.model, grid, true);
}

class Suite {
 public:
  explicit Suite(const SuiteOptions& o) : opts_(o), runs_(o) {}

  std::vector<CriterionResult> run() {
    std::vector<CriterionResult> out;
    const std::vector<CriterionResult (Suite::*)()> steps = {
        &Suite::radial,   &Suite::flux,     &Suite::constant_c, &Suite::annulus,  &Suite::newton,   &Suite::minkowski,
        &Suite::mixed,    &Suite::duality,  &Suite::torsion,    &Suite::symmetry, &Suite::decay};
    for (auto step : steps) {
      const Stopwatch sw;
      CriterionResult c = (this->*step)();
      c.seconds = sw.seconds();
      if (opts_.log) opts_.log(format_line(c));
      out.push_back(std::move(c));
    }
    return out;
  }

 private:
  bool det() const { return opts_.deterministic; }

  CriterionResult radial() {
    CriterionResult c{1, "radial exact solution outside B_H0(1)", true, "", json::array()};
    for (const auto& n : radial_norms()) {
      const Run& r = radial_run(runs_, n, opts_.grid);
      const bool ok = r.sup_error <= kRadialSup && r.seconds <= kSolveSeconds;
      c.pass = c.pass && ok;
      json v = {{"norm", n.name},
                {"grid", opts_.grid},
                {"r_out", r.report.r_out},
                {"sup_error", r.sup_error},
                {"raw_truncated_error", r.raw_error},
                {"iterations", r.report.iterations}};
      if (!det()) v["seconds_all_radii"] = r.seconds;
      c.values.push_back(v);
      c.summary += n.name + " err=" + fmt(r.sup_error);
      if (!det()) c.summary += " (" + fmt(r.seconds, "%.0f") + " s)";
      c.summary += "; ";
    }
    return c;
  }

  CriterionResult flux() {
    CriterionResult c{2, "boundary flux constancy on Wulff balls", true, "", json::array()};
    for (const auto& n : radial_norms()) {
      const auto& f = radial_run(runs_, n, opts_.grid).report.flux;
      const bool ok = std::abs(f.mean - 1.0) <= kFluxBand && f.cv <= kFluxCv;
      c.pass = c.pass && ok;
      c.values.push_back({{"norm", n.name}, {"mean", f.mean}, {"cv", f.cv}, {"min", f.min}, {"max", f.max}});
      c.summary += n.name + " mean=" + fmt(f.mean, "%.4f") + " cv=" + fmt(f.cv) + "; ";
    }
    return c;
  }

  CriterionResult constant_c() {
    CriterionResult c{3, "constant C identities", true, "", json::object()};
    c.values["runs"] = json::array();
    for (const auto& n : radial_norms()) {
      const auto& r = radial_run(runs_, n, opts_.grid).report;
      const auto [r1, r2] = capacity::check_appendix_a(r);
      c.pass = c.pass && r1 <= kIdentity && r2 <= kIdentity;
      c.values["runs"].push_back({{"norm", n.name}, {"r1", r1}, {"r2", r2}, {"cap", r.cap_extrapolated}});
      c.summary += n.name + " r1=" + fmt(r1) + " r2=" + fmt(r2) + "; ";
    }
    const auto ints =
        bodies::integrate(ConvexBody::euclidean_ball(3, 1.0, kOrigin), NormModel::euclidean(3), bodies::default_grid(3));
    const double cf = (3.0 - 2.0) / 3.0 * ints.perimeter / ints.volume;
    c.pass = c.pass && std::abs(cf - 1.0) <= kCFormula;
    c.values["C_formula_unit_ball"] = cf;
    c.summary += "C_formula(unit ball)-1=" + fmt(cf - 1.0);
    return c;
  }

  CriterionResult annulus() {
    CriterionResult c{4, "annulus closed form and refinement", true, "", json::array()};
    for (const auto& n : radial_norms()) {
      const auto coarse = annulus_run(n.model, opts_.coarse_grid);
      const auto fine = annulus_run(n.model, opts_.grid);
      const double ratio = coarse.first / fine.first;
      c.pass = c.pass && fine.first <= kAnnulusSup && ratio >= kAnnulusRatio;
      c.values.push_back({{"norm", n.name},
                          {"coarse_grid", opts_.coarse_grid},
                          {"coarse_error", coarse.first},
                          {"fine_grid", opts_.grid},
                          {"fine_error", fine.first},
                          {"ratio", ratio},
                          {"inner_flux_mean", fine.second},
                          {"inner_flux_exact", 2.0}});
      c.summary += n.name + " err=" + fmt(fine.first) + " ratio=" + fmt(ratio) + "; ";
    }
    return c;
  }

  // Sup error against 2/H_0 - 1 on 1 <= H_0 <= 2, and the mean of H(Du) on
  // the inner sphere (exactly 2).
  std::pair<double, double> annulus_run(const NormModel& m, int grid) {
    std::array<std::vector<double>, 3> axes;
    for (int a = 0; a < 3; ++a) {
      Vec e = Vec::Zero(3);
      e(a) = 1.0;
      const double w = 1.05 * 2.0 * m.h(e);
      axes[static_cast<std::size_t>(a)] = pde::uniform_axis(grid, -w, w);
    }
    const auto d = std::make_shared<pde::VoxelDomain>(
        axes, [m](const double* x) { return m.h0(x) - 1.0; }, [m](const double* x) { return m.h0(x) - 2.0; });
    const auto u = pde::solve_dirichlet(d, m, 1.0, 0.0);
    double err = 0.0;
    for (std::size_t i = 0; i < d->size(); ++i) {
      if (d->kind(i) == pde::NodeKind::Outside) continue;
      const auto p = d->point(i);
      err = std::max(err, std::abs(u.values[i] - (2.0 / m.h0(p.data()) - 1.0)));
    }
    const auto fs = pde::boundary_flux(u, m, ConvexBody::wulff_ball(m, 1.0, kOrigin), true);
    return {err, fs.mean};
  }

  CriterionResult newton() {
    CriterionResult c{5, "generalized Newton inequality sweep", true, "", json::array()};
    long violations = 0;
    for (const auto& sw : symfun::newton_sweep(2, 6, opts_.newton_trials, opts_.seed)) {
      const bool eq = sw.equality_flagged && sw.equality_identity_residual <= kNewtonIdentity;
      c.pass = c.pass && sw.violations == 0 && eq;
      violations += sw.violations;
      c.values.push_back({{"n", sw.n},
                          {"trials", sw.trials},
                          {"violations", sw.violations},
                          {"min_relative_slack", sw.min_relative_slack},
                          {"equality_flagged", sw.equality_flagged},
                          {"equality_identity_residual", sw.equality_identity_residual}});
    }
    c.summary = "violations=" + std::to_string(violations) + " over " + std::to_string(5L * opts_.newton_trials) +
                " pairs";
    return c;
  }

  CriterionResult minkowski() {
    CriterionResult c{6, "anisotropic Minkowski inequality", true, "", json::array()};
    const auto norms = geometry_norms();
    const auto bodies = geometry_bodies(norms);
    double worst = std::numeric_limits<double>::infinity(), wulff_max = 0.0,
           other_min = std::numeric_limits<double>::infinity();
    int mismatches = 0;
    for (const auto& b : bodies)
      for (std::size_t k = 0; k < norms.size(); ++k) {
        const auto r = bodies::minkowski_inequality_check(b.body, norms[k].model, kMinkowskiEq);
        const bool expected = b.wulff_of == static_cast<int>(k);
        const double rs = r.slack / r.lhs;
        worst = std::min(worst, rs);
        if (expected)
          wulff_max = std::max(wulff_max, std::abs(rs));
        else
          other_min = std::min(other_min, rs);
        const bool ok = rs >= -kMinkowskiHolds && r.equality == expected;
        mismatches += !ok;
        c.values.push_back({{"body", b.name},
                            {"norm", norms[k].name},
                            {"relative_slack", rs},
                            {"equality", r.equality},
                            {"wulff_of_norm", expected}});
      }
    c.pass = mismatches == 0;
    c.summary = std::to_string(bodies.size()) + " bodies x " + std::to_string(norms.size()) +
                " norms, min slack=" + fmt(worst) + ", Wulff max |slack|=" + fmt(wulff_max) +
                ", others min slack=" + fmt(other_min) + ", mismatches=" + std::to_string(mismatches);
    return c;
  }

  CriterionResult mixed() {
    CriterionResult c{7, "mixed volumes against the polynomial-fit oracle", true, "", json::object()};
    const std::vector<double> lambdas{0.0, 0.5, 1.0, 1.5, 2.0};
    const auto euc = NormModel::euclidean(3);
    const auto tilted = ell_tilted();
    const auto p4 = reg_p4();
    const auto ell = ell123();
    using T = std::vector<std::pair<double, ConvexBody>>;
    struct Pair {
      std::string name;
      ConvexBody K;
      NormModel H;
    };
    const std::vector<Pair> pairs = {
        {"unit ball / euclidean", ConvexBody::euclidean_ball(3, 1.0, kOrigin), euc},
        {"ball r=2 / euclidean", ConvexBody::euclidean_ball(3, 2.0, v3(0.3, -0.1, 0.2)), euc},
        {"ellipsoid (1,1,2) / reg-p4", ConvexBody::ellipsoid(v3(1, 1, 2), kOrigin), p4},
        {"ellipsoid (1,2,3) / euclidean", ConvexBody::ellipsoid(v3(1, 2, 3), kOrigin), euc},
        {"ellipsoid (1,2,3) / ellipsoidal", ConvexBody::ellipsoid(v3(1, 2, 3), kOrigin), ell},
        {"wulff reg-p4 / euclidean", ConvexBody::wulff_ball(p4, 1.0, kOrigin), euc},
        {"wulff ellipsoidal r=1.5 / reg-p4", ConvexBody::wulff_ball(ell, 1.5, kOrigin), p4},
        {"ball + ellipsoid (1,1,2) / tilted ellipsoidal",
         ConvexBody::minkowski_sum(T{{1.0, ConvexBody::euclidean_ball(3, 1.0, kOrigin)},
                                     {1.0, ConvexBody::ellipsoid(v3(1, 1, 2), kOrigin)}}),
         tilted},
        {"ellipsoid (0.5,1,1.5) shifted / reg-p4", ConvexBody::ellipsoid(v3(0.5, 1, 1.5), v3(1, -2, 0.5)), p4},
        {"wulff reg-p4 + ellipsoid (1,2,1) / tilted ellipsoidal",
         ConvexBody::minkowski_sum(T{{1.0, ConvexBody::wulff_ball(p4, 1.0, kOrigin)},
                                     {1.0, ConvexBody::ellipsoid(v3(1, 2, 1), kOrigin)}}),
         tilted},
    };
    double worst = 0.0;
    c.values["pairs"] = json::array();
    for (const auto& p : pairs) {
      const auto L = ConvexBody::wulff_ball(p.H, 1.0, kOrigin);
      const auto fit = oracles::mixed_volumes_by_fit(p.K, L, lambdas);
      const double q1 = bodies::mixed_volume_vbkk(p.K, p.H), q2 = bodies::mixed_volume_vbbk(p.K, p.H);
      const double vk = bodies::volume(p.K);
      const double e = std::max({rel(q1, fit.v_lkk), rel(q2, fit.v_llk), rel(vk, fit.vol_k)});
      worst = std::max(worst, e);
      c.values["pairs"].push_back({{"pair", p.name},
                                   {"V_BKK", q1},
                                   {"V_BKK_oracle", fit.v_lkk},
                                   {"V_BBK", q2},
                                   {"V_BBK_oracle", fit.v_llk},
                                   {"volume", vk},
                                   {"volume_oracle", fit.vol_k},
                                   {"max_relative_difference", e}});
    }
    // Exact cases: all coefficients of |B + lambda B| are 4 pi / 3; for
    // K = 2B they are 16 pi / 3 and 8 pi / 3.
    const double b = 4.0 * M_PI / 3.0;
    const auto unit = ConvexBody::euclidean_ball(3, 1.0, kOrigin);
    const auto f1 = oracles::mixed_volumes_by_fit(unit, unit, lambdas);
    const auto f2 = oracles::mixed_volumes_by_fit(pairs[1].K, unit, lambdas);
    const double exact = std::max({rel(f1.vol_k, b), rel(f1.v_lkk, b), rel(f1.v_llk, b), rel(f1.vol_l, b),
                                   rel(bodies::mixed_volume_vbkk(unit, euc), b),
                                   rel(bodies::mixed_volume_vbbk(unit, euc), b), rel(f2.v_lkk, 4 * b),
                                   rel(f2.v_llk, 2 * b)});
    c.values["exact_cases_max_relative_error"] = exact;
    c.pass = worst <= kMixedRel && exact <= kMixedExact;
    c.summary = "10 pairs max rel diff=" + fmt(worst) + ", exact cases err=" + fmt(exact);
    return c;
  }

  CriterionResult duality() {
    CriterionResult c{8, "duality identities", true, "", json::array()};
    const std::vector<Named> fams = {{"euclidean", NormModel::euclidean(3)},
                                     {"ellipsoidal", ell_tilted()},
                                     {"pnorm p=3 weighted", NormModel::pnorm(3, 3.0, {1.0, 1.5, 2.0})},
                                     {"pnorm p=4", NormModel::pnorm(3, 4.0)},
                                     {"regularized p=4", reg_p4()}};
    const Stopwatch sw;
    double worst = 0.0;
    std::uint64_t k = 0;
    for (const auto& f : fams) {
      const auto r = norms::check_duality_identities(f.model, static_cast<std::size_t>(opts_.duality_samples),
                                                     opts_.seed + 101 * ++k);
      worst = std::max(worst, r.max_residual());
      c.values.push_back({{"family", f.name},
                          {"samples", r.samples},
                          {"h0_of_grad_h", r.h0_of_grad_h},
                          {"h_of_grad_h0", r.h_of_grad_h0},
                          {"inverse_map", r.inverse_map},
                          {"hessian_product", r.hessian_product}});
    }
    const double t = sw.seconds();
    c.pass = worst <= kDuality && t <= kDualitySeconds;
    c.summary = "max residual=" + fmt(worst);
    if (!det()) c.summary += " in " + fmt(t, "%.2f") + " s";
    return c;
  }

  CriterionResult torsion() {
    CriterionResult c{9, "torsion pipeline", true, "", json::object()};
    c.values["torsion"] = json::array();
    for (const auto& n : radial_norms()) {
      const auto body = ConvexBody::wulff_ball(n.model, 1.0, kOrigin);
      pde::TorsionOptions to;
      to.grid = opts_.grid;
      const auto psi = pde::solve_torsion(body, n.model, to);
      const auto& d = *psi.domain;
      double err = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.kind(i) == pde::NodeKind::Outside) continue;
        const auto p = d.point(i);
        const double h0 = n.model.h0(p.data());
        err = std::max(err, std::abs(psi.values[i] - (h0 * h0 - 1.0) / 6.0));
      }
      err /= 1.0 / 6.0;
      const auto fs = pde::boundary_flux(psi, n.model, body, false);
      double integral = 0.0;
      for (std::size_t q = 0; q < fs.values.size(); ++q) integral += fs.weights[q] * fs.normal_h[q] * fs.values[q];
      const double vol = bodies::volume(body);
      const double verr = rel(integral, vol);
      c.pass = c.pass && err <= kTorsionSup && verr <= kTorsionVolume;
      c.values["torsion"].push_back({{"norm", n.name},
                                     {"relative_sup_error", err},
                                     {"flux_integral", integral},
                                     {"volume", vol},
                                     {"volume_identity_error", verr}});
      c.summary += n.name + " psi err=" + fmt(err) + " vol id=" + fmt(verr) + "; ";
    }
    const auto norms = geometry_norms();
    double worst = 0.0;
    for (const auto& b : geometry_bodies(norms))
      for (const auto& n : norms) worst = std::max(worst, bodies::minkowski_formula_check(b.body, n.model).rel_error);
    c.values["minkowski_formula_max_relative_error"] = worst;
    c.pass = c.pass && worst <= kMinkowskiFormula;
    c.summary += "Minkowski formula err=" + fmt(worst);
    return c;
  }

  CriterionResult symmetry() {
    CriterionResult c{10, "overdetermined problem verdicts", true, "", json::array()};
    const auto ell = ell123();
    const auto euc = NormModel::euclidean(3);
    struct Case {
      std::string key;
      ConvexBody body;
      NormModel model;
      Verdict expected;
    };
    const std::vector<Case> cases = {
        {"B_H0(1) under ellipsoidal diag(1,2,3)", ConvexBody::wulff_ball(ell, 1.0, kOrigin), ell,
         Verdict::WulffConsistent},
        {"euclidean unit ball under ellipsoidal diag(1,2,3)", ConvexBody::euclidean_ball(3, 1.0, kOrigin), ell,
         Verdict::NotWulff},
        {"ellipsoid (1,1,2) under euclidean", ConvexBody::ellipsoid(v3(1, 1, 2), kOrigin), euc, Verdict::NotWulff},
    };
    const capacity::Thresholds th;
    for (const auto& cs : cases) {
      std::vector<CapacityReport> reps;
      for (int g : {opts_.coarse_grid, opts_.grid}) reps.push_back(runs_.get(cs.key, cs.body, cs.model, g, false).report);
      const Verdict v = capacity::symmetry_verdict(reps, th);
      c.pass = c.pass && v == cs.expected;
      json grids = json::array();
      for (const auto& r : reps) grids.push_back(capacity::to_json(r));
      c.values.push_back({{"case", cs.key},
                          {"expected", capacity::verdict_name(cs.expected)},
                          {"verdict", capacity::verdict_name(v)},
                          {"reports", grids}});
      c.summary += std::string(capacity::verdict_name(v)) + " (cv " + fmt(reps.front().flux.cv) + ", " +
                   fmt(reps.back().flux.cv) + "); ";
    }
    return c;
  }

  CriterionResult decay() {
    CriterionResult c{11, "decay brackets", true, "", json::array()};
    double amax = 0.0, bmax = 0.0;
    for (const auto& [key, run] : runs_.all()) {
      if (run.report.grid != opts_.grid) continue;
      const auto& d = run.report.decay;
      const bool finite = d.samples > 0 && d.a_min > 0 && d.b_min > 0 && std::isfinite(d.a_max) &&
                          std::isfinite(d.b_max);
      c.pass = c.pass && finite && d.a_ratio() <= kDecayRatio && d.b_ratio() <= kDecayRatio;
      amax = std::max(amax, d.a_ratio());
      bmax = std::max(bmax, d.b_ratio());
      c.values.push_back({{"run", key},
                          {"r_lo", run.report.decay_r_lo},
                          {"r_hi", run.report.decay_r_hi},
                          {"samples", d.samples},
                          {"A1", d.a_min},
                          {"A2", d.a_max},
                          {"B1", d.b_min},
                          {"B2", d.b_max}});
    }
    c.pass = c.pass && !c.values.empty();
    c.summary = std::to_string(c.values.size()) + " runs, max A2/A1=" + fmt(amax) + " max B2/B1=" + fmt(bmax);
    return c;
  }

  const SuiteOptions& opts_;
  Runs runs_;
};

json criterion_json(const CriterionResult& c, bool deterministic) {
  json j = {{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"summary", c.summary}, {"values", c.values}};
  if (!deterministic) j["seconds"] = c.seconds;
  return j;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

bool SuiteResult::pass() const {
  for (const auto& c : criteria)
    if (!c.pass) return false;
  return !criteria.empty();
}

std::string format_line(const CriterionResult& c) {
  std::ostringstream os;
  os << (c.pass ? "[PASS] " : "[FAIL] ") << (c.id < 10 ? " " : "") << c.id << "  " << c.title << ": " << c.summary;
  return os.str();
}

SuiteResult run_suite(const SuiteOptions& opts) {
  SuiteResult res;
  std::vector<std::string> dumps;
  // Each pass is compared through its deterministic serialization.
  const auto comparable = [&](const std::vector<CriterionResult>& cs) {
    json j = json::array();
    for (const auto& c : cs) j.push_back(criterion_json(c, true));
    return j.dump();
  };
  for (int pass = 0; pass < std::max(1, opts.repeats); ++pass) {
    if (opts.log) opts.log("acceptance pass " + std::to_string(pass + 1));
    auto cs = Suite(opts).run();
    dumps.push_back(comparable(cs));
    if (pass == 0) res.criteria = std::move(cs);
  }

  CriterionResult det{12, "determinism of repeated runs", false, "", json::object()};
  json hashes = json::array();
  for (const auto& d : dumps) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(d)));
    hashes.push_back(buf);
  }
  bool same = dumps.size() >= 2;
  for (std::size_t i = 1; i < dumps.size(); ++i) same = same && dumps[i] == dumps[0];
  det.pass = same;
  det.values = {{"runs", dumps.size()}, {"bytes", dumps.front().size()}, {"fnv1a", hashes}};
  det.summary = dumps.size() < 2 ? "needs two runs"
                                 : std::to_string(dumps.size()) + " runs, " + std::to_string(dumps.front().size()) +
                                       " bytes, " + (same ? "identical" : "different");
  if (opts.log) opts.log(format_line(det));
  res.criteria.push_back(det);

  res.report = {{"suite", "fincap acceptance"},
                {"grid", opts.grid},
                {"coarse_grid", opts.coarse_grid},
                {"seed", opts.seed},
                {"pass", res.pass()},
                {"criteria", json::array()}};
  for (const auto& c : res.criteria) res.report["criteria"].push_back(criterion_json(c, opts.deterministic));
  return res;
}

}  // namespace fincap::acceptance
