#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "fincap/acceptance.hpp"
#include "fincap/bodies.hpp"
#include "fincap/capacity.hpp"
#include "fincap/error.hpp"
#include "fincap/field_io.hpp"
#include "fincap/oracles.hpp"
#include "fincap/pde.hpp"
#include "fincap/reduce.hpp"
#include "fincap/symfun.hpp"

namespace {

using namespace fincap;
using json = nlohmann::json;
using geom::Vec;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerics = 2;
constexpr int kExitAcceptance = 3;

struct Globals {
  std::string config;
  std::string out;
  int grid = 0;  // 0 keeps the config value
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool deterministic = true;
  int threads = 0;
  std::vector<double> r_out;
};

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ValidationError("not a number: \"" + tok + "\"");
    v.push_back(x);
  }
  return v;
}

Vec vec_of(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

class Runner {
 public:
  explicit Runner(const Globals& g) : g_(g), start_(std::chrono::steady_clock::now()) {
    cfg_ = cli::load_config(g.config);
    if (g.grid > 0) cfg_.grid = g.grid;
    if (g.seed_set) cfg_.seed = g.seed;
    if (!g.r_out.empty()) cfg_.r_out = g.r_out;
    if (g.threads > 0) set_threads(g.threads);
  }

  const cli::Config& cfg() const { return cfg_; }

  capacity::CapacityOptions capacity_options(int grid) const {
    capacity::CapacityOptions o;
    o.exterior.grid = grid;
    o.exterior.r_out = cfg_.r_out;
    o.exterior.solver = cfg_.solver;
    o.flux_pol = cfg_.flux_pol;
    o.thresholds = cfg_.thresholds;
    return o;
  }

  /// Writes the result to --out or stdout.
  void emit(json j) const {
    if (!g_.deterministic) {
      const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
      std::ostringstream ts;
      ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
      j["timestamp"] = ts.str();
      j["elapsed_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      j["threads"] = max_threads();
    }
    const std::string text = j.dump(2) + "\n";
    if (g_.out.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(g_.out);
    if (!f) throw InvalidArgument("cannot write " + g_.out);
    f << text;
  }

 private:
  Globals g_;
  cli::Config cfg_;
  std::chrono::steady_clock::time_point start_;
};

json norm_check(const Runner& r, std::size_t samples) {
  json out = json::array();
  for (const auto& n : r.cfg().norms) {
    const auto rep = norms::check_duality_identities(
        n.model, samples > 0 ? samples : static_cast<std::size_t>(r.cfg().samples), r.cfg().seed);
    const auto& eq = n.model.equivalence();
    out.push_back({{"name", n.name},
                   {"norm", n.model.label()},
                   {"dim", n.model.dim()},
                   {"samples", rep.samples},
                   {"h0_of_grad_h", rep.h0_of_grad_h},
                   {"h_of_grad_h0", rep.h_of_grad_h0},
                   {"inverse_map", rep.inverse_map},
                   {"hessian_product", rep.hessian_checked ? json(rep.hessian_product) : json(nullptr)},
                   {"max_residual", rep.max_residual()},
                   {"sigma", eq.sigma},
                   {"gamma", eq.gamma},
                   {"uniformly_convex", n.model.uniformly_convex()}});
  }
  if (out.empty()) throw ValidationError("config: empty norm list");
  return {{"problem", "norm-check"}, {"norms", out}};
}

json body_report(const Runner& r) {
  json out = json::array();
  for (const auto& k : r.cfg().require_cases()) {
    const auto& body = r.cfg().body(k.body).body;
    const auto& m = r.cfg().norm(k.norm);
    const auto ints = bodies::integrate(body, m, bodies::default_grid(body.dim()));
    const auto ineq = bodies::minkowski_inequality_check(ints, body.dim(), r.cfg().thresholds.eq);
    const auto mf = bodies::minkowski_formula_check(body, m);
    out.push_back({{"body", k.body},
                   {"norm", k.norm},
                   {"kind", bodies::kind_name(body.kind())},
                   {"volume", ints.volume},
                   {"perimeter", ints.perimeter},
                   {"mh_min", ints.mh_min},
                   {"mh_max", ints.mh_max},
                   {"mh_mean", ints.mh_mean},
                   {"minkowski_lhs", ineq.lhs},
                   {"minkowski_rhs", ineq.rhs},
                   {"minkowski_rel_slack", ineq.rel_slack},
                   {"minkowski_holds", ineq.holds},
                   {"minkowski_equality", ineq.equality},
                   {"minkowski_formula_rel_error", mf.rel_error}});
  }
  return {{"problem", "body-report"}, {"bodies", out}};
}

json mixed_volumes(const Runner& r) {
  json out = json::array();
  for (const auto& k : r.cfg().require_cases()) {
    const auto& body = r.cfg().body(k.body).body;
    const auto& m = r.cfg().norm(k.norm);
    const auto L = bodies::wulff_ball(m, 1.0, Vec::Zero(body.dim()));
    const double vbkk = bodies::mixed_volume_vbkk(body, m);
    const double vbbk = bodies::mixed_volume_vbbk(body, m);
    json row{{"body", k.body}, {"norm", k.norm}, {"v_bkk", vbkk}, {"v_bbk", vbbk}};
    if (body.dim() == 3) {
      const auto fit = oracles::mixed_volumes_by_fit(body, L, r.cfg().lambdas);
      row["oracle"] = {{"v_bkk", fit.v_lkk}, {"v_bbk", fit.v_llk}, {"vol_k", fit.vol_k},
                       {"vol_b", fit.vol_l},  {"condition", fit.condition}, {"rescaled", fit.rescaled}};
      row["rel_diff_bkk"] = std::abs(vbkk - fit.v_lkk) / std::abs(fit.v_lkk);
      row["rel_diff_bbk"] = std::abs(vbbk - fit.v_llk) / std::abs(fit.v_llk);
    }
    out.push_back(row);
  }
  return {{"problem", "mixed-volumes"}, {"lambdas", r.cfg().lambdas}, {"cases", out}};
}

json newton_sweep(const Runner& r, int n_lo, int n_hi, int trials) {
  const auto rows = symfun::newton_sweep(n_lo, n_hi, trials > 0 ? trials : r.cfg().trials, r.cfg().seed);
  json out = json::array();
  for (const auto& s : rows)
    out.push_back({{"n", s.n},
                   {"trials", s.trials},
                   {"violations", s.violations},
                   {"min_relative_slack", s.min_relative_slack},
                   {"equality_flagged", s.equality_flagged},
                   {"equality_identity_residual", s.equality_identity_residual}});
  return {{"problem", "newton-sweep"}, {"seed", r.cfg().seed}, {"sweep", out}};
}

void write_flux_csv(const std::string& path, const pde::FluxSamples& fs) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write " + path);
  f << "theta_index,x,y,z,H_Du\n" << std::setprecision(12);
  for (std::size_t q = 0; q < fs.values.size(); ++q) {
    const auto& p = fs.points[q];
    f << q << ',' << p(0) << ',' << p(1) << ',' << p(2) << ',' << fs.values[q] << '\n';
  }
}

/// u along the ray from the center in direction e_1, with the closed form
/// (r / H_0)^{N-2} when the body is a Wulff ball of the solve norm.
void write_profile_csv(const std::string& path, const pde::ExteriorResult& ex, const bodies::ConvexBody& body,
                       const norms::NormModel& m) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write " + path);
  const bool wulff = body.wulff_norm() != nullptr && body.wulff_norm()->label() == m.label();
  const Vec c = body.center();
  Vec e = Vec::Zero(c.size());
  e(0) = 1.0;
  const double step = 1.0 / m.h0(e);  // unit H_0 length along e
  const double r_hi = ex.r_out.back();
  constexpr int kSamples = 200;
  f << "H0,u,u_closed_form\n" << std::setprecision(12);
  for (int s = 0; s <= kSamples; ++s) {
    const double t = ex.r_outer + (r_hi - ex.r_outer) * s / kSamples;
    const Vec x = c + t * step * e;
    bool clean = true;
    const double u = ex.extrapolated.sample(x.data(), &clean);
    const double exact = wulff ? std::pow(body.wulff_radius() / t, c.size() - 2.0) : nan();
    f << t << ',' << (clean ? u : nan()) << ',' << exact << '\n';
  }
}

struct SolveFiles {
  std::string flux_csv, profile_csv, field;
};

json solve_capacity(const Runner& r, const SolveFiles& files) {
  const auto& cases = r.cfg().require_cases();
  if (cases.size() > 1 && !(files.flux_csv.empty() && files.profile_csv.empty() && files.field.empty()))
    throw ValidationError("--flux-csv, --profile-csv and --field need a single case");
  json out = json::array();
  for (const auto& k : cases) {
    const auto& body = r.cfg().body(k.body).body;
    const auto& m = r.cfg().norm(k.norm);
    capacity::CapacityArtifacts art;
    auto rep = capacity::compute_capacity(body, m, r.capacity_options(r.cfg().grid), &art);
    rep.body = k.body;
    rep.norm = k.norm;
    if (!files.flux_csv.empty()) write_flux_csv(files.flux_csv, art.flux);
    if (!files.profile_csv.empty()) write_profile_csv(files.profile_csv, art.exterior, body, m);
    if (!files.field.empty()) pde::write_field(art.exterior.extrapolated, files.field);
    out.push_back(capacity::to_json(rep));
  }
  return out.size() == 1 ? out[0] : json{{"problem", "exterior-capacity"}, {"cases", out}};
}

json solve_torsion(const Runner& r, const std::string& field_path) {
  const auto& cases = r.cfg().require_cases();
  if (cases.size() > 1 && !field_path.empty()) throw ValidationError("--field needs a single case");
  json out = json::array();
  for (const auto& k : cases) {
    const auto& body = r.cfg().body(k.body).body;
    const auto& m = r.cfg().norm(k.norm);
    if (body.dim() != 3) throw UnsupportedDimension("grid solves are three-dimensional");
    pde::TorsionOptions to;
    to.grid = r.cfg().grid;
    to.solver = r.cfg().solver;
    pde::SolveStats st;
    const auto psi = pde::solve_torsion(body, m, to, &st);
    if (!field_path.empty()) pde::write_field(psi, field_path);

    json row{{"problem", "torsion"}, {"body", k.body}, {"norm", k.norm}, {"grid", r.cfg().grid},
             {"iterations", st.iterations}, {"final_grad", st.final_grad}, {"energy", st.energy}};
    // psi = (H_0(x - c)^2 - r^2) / (2N) on a Wulff ball of the solve norm.
    if (body.wulff_norm() != nullptr && body.wulff_norm()->label() == m.label()) {
      const double rad = body.wulff_radius();
      const double n = body.dim();
      const auto& d = *psi.domain;
      double err = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.kind(i) == pde::NodeKind::Outside) continue;
        const auto p = d.point(i);
        const Vec x = Eigen::Map<const Vec>(p.data(), 3) - body.center();
        const double h0 = m.h0(x);
        err = std::max(err, std::abs(psi.values[i] - (h0 * h0 - rad * rad) / (2.0 * n)));
      }
      row["relative_sup_error"] = err / (rad * rad / (2.0 * n));
    } else {
      row["relative_sup_error"] = nullptr;
    }
    // int H(D psi) H(nu) over the boundary equals |Omega|.
    const auto fs = pde::boundary_flux(psi, m, body, false, r.cfg().flux_pol);
    double integral = 0.0;
    for (std::size_t q = 0; q < fs.values.size(); ++q) integral += fs.weights[q] * fs.normal_h[q] * fs.values[q];
    const double vol = bodies::volume(body);
    row["flux_integral"] = integral;
    row["volume"] = vol;
    row["volume_identity_error"] = std::abs(integral - vol) / vol;
    row["minkowski_formula_rel_error"] = bodies::minkowski_formula_check(body, m).rel_error;
    out.push_back(row);
  }
  return out.size() == 1 ? out[0] : json{{"problem", "torsion"}, {"cases", out}};
}

json overdet_check(const Runner& r) {
  json out = json::array();
  for (const auto& k : r.cfg().require_cases()) {
    const auto& body = r.cfg().body(k.body).body;
    const auto& m = r.cfg().norm(k.norm);
    std::vector<capacity::CapacityReport> reps;
    json grids = json::array();
    for (int g : {r.cfg().coarse_grid, r.cfg().grid}) {
      auto rep = capacity::compute_capacity(body, m, r.capacity_options(g));
      rep.body = k.body;
      rep.norm = k.norm;
      grids.push_back({{"grid", g},
                       {"flux_cv", rep.flux.cv},
                       {"minkowski_slack", rep.minkowski_slack},
                       {"r1", rep.r1},
                       {"r2", rep.r2},
                       {"verdict", capacity::verdict_name(rep.verdict)}});
      reps.push_back(std::move(rep));
    }
    out.push_back({{"body", k.body},
                   {"norm", k.norm},
                   {"grids", grids},
                   {"verdict", capacity::verdict_name(capacity::symmetry_verdict(reps, r.cfg().thresholds))}});
  }
  return {{"problem", "overdetermined"},
          {"thresholds", {{"cv", r.cfg().thresholds.cv}, {"eq", r.cfg().thresholds.eq}, {"id", r.cfg().thresholds.id}}},
          {"cases", out}};
}

struct OracleArgs {
  std::string kind;
  std::string norm, body, body2;
  std::vector<double> x;
  int levels = 4;
  std::uint64_t points = 1000000;
};

json oracle(const Runner& r, const OracleArgs& a) {
  if (a.kind == "dual") {
    const auto& m = r.cfg().norm(a.norm);
    if (static_cast<int>(a.x.size()) != m.dim()) throw ValidationError("--x needs " + std::to_string(m.dim()) + " entries");
    const Vec x = vec_of(a.x);
    const double s = oracles::dual_norm_by_sampling(m, x, a.levels);
    const double h0 = m.h0(x);
    return {{"oracle", "dual"}, {"norm", a.norm}, {"x", a.x}, {"levels", a.levels},
            {"sampled", s},     {"h0", h0},       {"rel_diff", std::abs(s - h0) / h0}};
  }
  if (a.kind == "mc-volume") {
    const auto& b = r.cfg().body(a.body).body;
    const auto mc = oracles::montecarlo_volume(b, a.points, r.cfg().seed);
    return {{"oracle", "mc-volume"}, {"body", a.body},   {"points", mc.total}, {"inside", mc.inside},
            {"estimate", mc.estimate}, {"stderr", mc.stderr_}, {"quadrature", bodies::volume(b)}};
  }
  if (a.kind == "mixed") {
    const auto& K = r.cfg().body(a.body).body;
    const auto& L = r.cfg().body(a.body2).body;
    const auto fit = oracles::mixed_volumes_by_fit(K, L, r.cfg().lambdas);
    return {{"oracle", "mixed"}, {"k", a.body}, {"l", a.body2}, {"v_lkk", fit.v_lkk}, {"v_llk", fit.v_llk},
            {"vol_k", fit.vol_k}, {"vol_l", fit.vol_l}, {"condition", fit.condition}, {"rescaled", fit.rescaled}};
  }
  throw ValidationError("unknown oracle \"" + a.kind + "\" (dual, mc-volume, mixed)");
}

int acceptance_cmd(const Runner& r, const Globals& g, int coarse) {
  acceptance::SuiteOptions so;
  so.grid = g.grid > 0 ? g.grid : 96;
  so.coarse_grid = coarse > 0 ? coarse : so.grid / 2;
  if (g.seed_set) so.seed = g.seed;
  so.deterministic = g.deterministic;
  so.log = [](const std::string& s) { std::cerr << "  " << s << '\n'; };
  const auto res = acceptance::run_suite(so);
  for (const auto& c : res.criteria) std::cerr << acceptance::format_line(c) << '\n';
  json j = res.report;
  j["pass"] = res.pass();
  r.emit(j);
  return res.pass() ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finsler capacity toolkit: norms, convex bodies, capacitary potentials"};
  app.require_subcommand(1);
  Globals g;
  std::string r_out, seed_text;
  app.add_option("--config", g.config, "JSON configuration")->envname("FINCAP_CONFIG");
  app.add_option("--out", g.out, "write JSON here instead of stdout")->envname("FINCAP_OUT");
  app.add_option("--grid", g.grid, "nodes per axis of the fine grid")->envname("FINCAP_GRID");
  app.add_option("--seed", seed_text, "random seed")->envname("FINCAP_SEED");
  app.add_option("--deterministic", g.deterministic, "leave timestamps and timings out (default true)")
      ->envname("FINCAP_DETERMINISTIC");
  app.add_option("--threads", g.threads, "OpenMP threads")->envname("FINCAP_THREADS");
  app.add_option("--r-out", r_out, "comma-separated truncation radii")->envname("FINCAP_R_OUT");

  std::size_t samples = 0;  // 0: config value
  auto* c_norm = app.add_subcommand("norm-check", "duality identities of every configured norm");
  c_norm->add_option("--samples", samples);
  auto* c_body = app.add_subcommand("body-report", "volume, anisotropic perimeter, curvature and Minkowski checks");
  auto* c_mixed = app.add_subcommand("mixed-volumes", "mixed volumes by quadrature and by polynomial fit");
  int n_lo = 2, n_hi = 6, trials = 0;
  auto* c_newton = app.add_subcommand("newton-sweep", "randomized Newton inequality for S_2");
  c_newton->add_option("--n-min", n_lo);
  c_newton->add_option("--n-max", n_hi);
  c_newton->add_option("--trials", trials);
  SolveFiles files;
  auto* c_cap = app.add_subcommand("solve-capacity", "exterior capacitary potential and capacity");
  c_cap->add_option("--flux-csv", files.flux_csv, "boundary samples of H(Du)");
  c_cap->add_option("--profile-csv", files.profile_csv, "u along a ray against the closed form");
  c_cap->add_option("--field", files.field, "binary field of the extrapolated potential");
  std::string torsion_field;
  auto* c_tor = app.add_subcommand("solve-torsion", "torsion function inside the body");
  c_tor->add_option("--field", torsion_field, "binary field of the torsion function");
  auto* c_over = app.add_subcommand("overdet-check", "Wulff-shape verdict from two grid refinements");
  int coarse = 0;
  auto* c_acc = app.add_subcommand("acceptance", "full acceptance suite");
  c_acc->add_option("--coarse-grid", coarse);
  OracleArgs oa;
  std::string x_text;
  auto* c_or = app.add_subcommand("oracle", "independent reference computations");
  c_or->add_option("kind", oa.kind, "dual | mc-volume | mixed")->required();
  c_or->add_option("--norm", oa.norm);
  c_or->add_option("--body", oa.body);
  c_or->add_option("--body2", oa.body2);
  c_or->add_option("--x", x_text, "comma-separated point");
  c_or->add_option("--levels", oa.levels);
  c_or->add_option("--points", oa.points);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!seed_text.empty()) {
      const auto v = parse_list(seed_text);
      if (v.size() != 1 || v[0] < 0 || v[0] != std::floor(v[0])) throw ValidationError("bad --seed " + seed_text);
      g.seed = static_cast<std::uint64_t>(v[0]);
      g.seed_set = true;
    }
    if (!r_out.empty()) g.r_out = parse_list(r_out);
    if (!x_text.empty()) oa.x = parse_list(x_text);

    Runner r(g);
    if (*c_norm) r.emit(norm_check(r, samples));
    if (*c_body) r.emit(body_report(r));
    if (*c_mixed) r.emit(mixed_volumes(r));
    if (*c_newton) r.emit(newton_sweep(r, n_lo, n_hi, trials));
    if (*c_cap) r.emit(solve_capacity(r, files));
    if (*c_tor) r.emit(solve_torsion(r, torsion_field));
    if (*c_over) r.emit(overdet_check(r));
    if (*c_acc) return acceptance_cmd(r, g, coarse);
    if (*c_or) r.emit(oracle(r, oa));
    return kExitOk;
  } catch (const ConvergenceFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerics;
  } catch (const SolverInconsistency& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerics;
  } catch (const CurvatureSingularity& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerics;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return kExitConfig;
  }
}
