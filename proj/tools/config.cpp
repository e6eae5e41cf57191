#include "config.hpp"

#include <fstream>

#include "fincap/error.hpp"
#include "fincap/sphere.hpp"

namespace fincap::cli {

namespace {

using geom::Mat;
using geom::Vec;
using json = nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw ValidationError("config: " + what); }

Vec vec_of(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) bad(what + " must be a non-empty array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Vec center_of(const json& j, int dim) {
  if (!j.contains("center")) return Vec::Zero(dim);
  Vec c = vec_of(j["center"], "center");
  if (c.size() != dim) bad("center has the wrong dimension");
  return c;
}

norms::NormModel make_norm(const json& j, const std::vector<NamedNorm>& known) {
  const std::string fam = j.value("family", "");
  const int dim = j.value("dim", 3);
  if (fam == "euclidean") return norms::NormModel::euclidean(dim);
  if (fam == "ellipsoidal") {
    if (!j.contains("matrix")) bad("ellipsoidal norm needs \"matrix\"");
    const auto& rows = j["matrix"];
    const auto n = static_cast<Eigen::Index>(rows.size());
    Mat A(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Vec row = vec_of(rows[static_cast<std::size_t>(r)], "matrix row");
      if (row.size() != n) bad("matrix must be square");
      A.row(r) = row.transpose();
    }
    return norms::NormModel::ellipsoidal(A);
  }
  if (fam == "pnorm") {
    std::vector<double> w;
    if (j.contains("weights")) w = j["weights"].get<std::vector<double>>();
    return norms::NormModel::pnorm(dim, j.value("p", 2.0), w);
  }
  if (fam == "regularized") {
    const std::string base = j.value("base", "");
    for (const auto& k : known)
      if (k.name == base) return norms::NormModel::regularized(k.model, j.value("eps", 0.05));
    bad("regularized norm refers to unknown base \"" + base + "\"");
  }
  if (fam == "sampled") {
    const auto grid = geom::SphereGrid::product(dim, j.value("n_pol", 16), j.value("n_az", 32));
    return norms::NormModel::sampled(grid, j.at("values").get<std::vector<double>>(), j.value("kappa", 0.0));
  }
  bad("unknown norm family \"" + fam + "\"");
}

}  // namespace

const norms::NormModel& Config::norm(const std::string& name) const {
  for (const auto& n : norms)
    if (n.name == name) return n.model;
  throw ValidationError("config: unknown norm \"" + name + "\"");
}

const NamedBody& Config::body(const std::string& name) const {
  for (const auto& b : bodies)
    if (b.name == name) return b;
  throw ValidationError("config: unknown body \"" + name + "\"");
}

const std::vector<Case>& Config::require_cases() const {
  if (cases.empty()) throw ValidationError("config: empty body list");
  return cases;
}

Config parse_config(const json& j) {
  if (!j.is_object()) bad("top level must be an object");
  Config c;
  for (const auto& n : j.value("norms", json::array())) {
    const std::string name = n.value("name", "");
    if (name.empty()) bad("every norm needs a name");
    c.norms.push_back({name, make_norm(n, c.norms)});
  }
  for (const auto& b : j.value("bodies", json::array())) {
    const std::string name = b.value("name", "");
    const std::string kind = b.value("kind", "");
    const std::string norm = b.value("norm", "");
    if (name.empty()) bad("every body needs a name");
    const int dim = b.value("dim", 3);
    auto add = [&](bodies::ConvexBody body) { c.bodies.push_back({name, std::move(body), norm}); };
    if (kind == "wulff_ball") {
      const auto& m = c.norm(norm);
      add(bodies::ConvexBody::wulff_ball(m, b.value("radius", 1.0), center_of(b, m.dim())));
    } else if (kind == "euclidean_ball") {
      add(bodies::ConvexBody::euclidean_ball(dim, b.value("radius", 1.0), center_of(b, dim)));
    } else if (kind == "ellipsoid") {
      const Vec axes = vec_of(b.value("semi_axes", json()), "semi_axes");
      add(bodies::ConvexBody::ellipsoid(axes, center_of(b, static_cast<int>(axes.size()))));
    } else if (kind == "minkowski_sum") {
      std::vector<std::pair<double, bodies::ConvexBody>> terms;
      for (const auto& t : b.value("terms", json::array()))
        terms.emplace_back(t.value("weight", 1.0), c.body(t.value("body", "")).body);
      if (terms.empty()) bad("minkowski_sum \"" + name + "\" has no terms");
      const Vec shift = b.contains("translation") ? vec_of(b["translation"], "translation") : Vec();
      add(bodies::ConvexBody::minkowski_sum(terms, shift));
    } else if (kind == "sampled_support") {
      const auto grid = geom::SphereGrid::product(dim, b.value("n_pol", 16), b.value("n_az", 32));
      add(bodies::ConvexBody::sampled_support(grid, b.at("values").get<std::vector<double>>(), center_of(b, dim),
                                              b.value("kappa", 0.0)));
    } else {
      bad("unknown body kind \"" + kind + "\"");
    }
  }
  if (j.contains("cases")) {
    for (const auto& k : j["cases"]) c.cases.push_back({k.value("body", ""), k.value("norm", "")});
  } else {
    for (const auto& b : c.bodies) c.cases.push_back({b.name, b.norm});
  }
  for (const auto& k : c.cases) {
    c.body(k.body);
    if (k.norm.empty()) bad("body \"" + k.body + "\" has no norm to run with");
    c.norm(k.norm);
  }

  const json s = j.value("solver", json::object());
  c.grid = s.value("grid", c.grid);
  c.coarse_grid = s.value("coarse_grid", c.coarse_grid);
  c.r_out = s.value("r_out", c.r_out);
  c.flux_pol = s.value("flux_pol", c.flux_pol);
  c.solver.max_iters = s.value("max_iters", c.solver.max_iters);
  c.solver.tol_g = s.value("tol_g", c.solver.tol_g);
  c.solver.rel_decrement = s.value("rel_decrement", c.solver.rel_decrement);
  c.solver.window = s.value("window", c.solver.window);
  const json t = j.value("thresholds", json::object());
  c.thresholds.cv = t.value("cv", c.thresholds.cv);
  c.thresholds.eq = t.value("eq", c.thresholds.eq);
  c.thresholds.id = t.value("id", c.thresholds.id);
  c.seed = j.value("seed", c.seed);
  c.trials = j.value("trials", c.trials);
  c.samples = j.value("samples", c.samples);
  c.lambdas = j.value("lambdas", c.lambdas);
  if (c.grid < 8 || c.coarse_grid < 8) bad("grids need at least 8 nodes per axis");
  return c;
}

Config load_config(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config: " + path + ": " + e.what());
  }
  return parse_config(j);
}

}  // namespace fincap::cli
