#include "fincap/capacity.hpp"

#include <cmath>

#include "fincap/error.hpp"

namespace fincap::capacity {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::WulffConsistent:
      return "wulff-consistent";
    case Verdict::NotWulff:
      return "not-wulff";
    case Verdict::Inconclusive:
      break;
  }
  return "inconclusive";
}

std::pair<double, double> check_appendix_a(const CapacityReport& r) {
  const double n = r.dim, cap = r.cap_extrapolated, c = r.flux.mean;
  if (!(cap > 0.0)) throw InvalidArgument("check_appendix_a: capacity must be positive");
  return {std::abs(cap - c * r.perimeter) / cap, std::abs((n - 2.0) * cap - c * c * n * r.volume) / cap};
}

Verdict symmetry_verdict(const CapacityReport& r, const Thresholds& t) {
  if (r.flux.cv <= t.cv && r.minkowski_slack <= t.eq && r.r1 <= t.id && r.r2 <= t.id) return Verdict::WulffConsistent;
  return Verdict::Inconclusive;
}

Verdict symmetry_verdict(const std::vector<CapacityReport>& refinements, const Thresholds& t) {
  if (refinements.empty()) throw InvalidArgument("symmetry_verdict: no reports");
  const auto& last = refinements.back();
  if (symmetry_verdict(last, t) == Verdict::WulffConsistent) return Verdict::WulffConsistent;
  if (refinements.size() >= 2 && last.flux.cv >= 2.0 * t.cv &&
      refinements[refinements.size() - 2].flux.cv >= 2.0 * t.cv)
    return Verdict::NotWulff;
  return Verdict::Inconclusive;
}

CapacityReport compute_capacity(const ConvexBody& body, const NormModel& model, const CapacityOptions& opts,
                                CapacityArtifacts* artifacts) {
  if (body.dim() != 3 || model.dim() != 3) throw UnsupportedDimension("compute_capacity: N = 3 only");
  CapacityReport r;
  r.norm = model.label();
  r.body = body.label();
  r.dim = body.dim();
  r.grid = opts.exterior.grid;

  auto ext = pde::solve_exterior_capacity(body, model, opts.exterior);
  r.r_out = ext.r_out;
  r.cap_truncated = ext.capacity;
  r.cap_value = ext.capacity.back();
  r.cap_extrapolated = ext.cap_extrapolated;
  r.far_constant = ext.far_constant;
  r.monotonicity_violation = ext.monotonicity_violation;
  r.r_inner = ext.r_inner;
  r.r_outer = ext.r_outer;
  for (const auto& s : ext.stats) {
    r.iterations += s.iterations;
    r.final_grad = std::max(r.final_grad, s.final_grad);
    r.max_principle_violation = std::max(r.max_principle_violation, s.max_principle_violation);
  }

  const NormModel m = model.uniformly_convex() ? model : NormModel::regularized(model);
  auto fs = pde::boundary_flux(ext.extrapolated, m, body, true, opts.flux_pol);
  r.flux = {fs.mean, fs.stddev, fs.cv, fs.min, fs.max, fs.values.size(), fs.degraded_count};

  const auto ints = bodies::integrate(body, model, bodies::default_grid(3));
  r.volume = ints.volume;
  r.perimeter = ints.perimeter;
  r.c_formula = (r.dim - 2.0) / r.dim * ints.perimeter / ints.volume;
  r.minkowski_slack = std::abs(bodies::minkowski_inequality_check(ints, r.dim).rel_slack);
  std::tie(r.r1, r.r2) = check_appendix_a(r);

  // Far-field brackets between 2 R1 and half the largest truncation radius.
  r.decay_r_lo = 2.0 * ext.r_outer;
  r.decay_r_hi = 0.5 * ext.r_out.back();
  r.decay = pde::decay_brackets(ext.extrapolated, m, body.center(), r.decay_r_lo, r.decay_r_hi);
  if (opts.diagnostics) {
    r.diagnostics = pde::auxiliary_diagnostics(ext.extrapolated, m, body);
    r.has_diagnostics = true;
  }
  r.verdict = symmetry_verdict(r, opts.thresholds);
  if (artifacts) {
    artifacts->exterior = std::move(ext);
    artifacts->flux = std::move(fs);
  }
  return r;
}

nlohmann::json to_json(const CapacityReport& r) {
  nlohmann::json j = {
      {"problem", r.problem},
      {"norm", r.norm},
      {"body", r.body},
      {"grid", r.grid},
      {"cap_value", r.cap_value},
      {"cap_extrapolated", r.cap_extrapolated},
      {"flux",
       {{"mean", r.flux.mean},
        {"cv", r.flux.cv},
        {"min", r.flux.min},
        {"max", r.flux.max},
        {"stddev", r.flux.stddev},
        {"samples", r.flux.samples},
        {"degraded", r.flux.degraded}}},
      {"C_formula", r.c_formula},
      {"residuals", {{"r1", r.r1}, {"r2", r.r2}}},
      {"verdict", verdict_name(r.verdict)},
      {"convergence", {{"iters", r.iterations}, {"final_grad", r.final_grad}}},
      {"r_out", r.r_out},
      {"cap_truncated", r.cap_truncated},
      {"far_constant", r.far_constant},
      {"volume", r.volume},
      {"perimeter", r.perimeter},
      {"minkowski_slack", r.minkowski_slack},
      {"monotonicity_violation", r.monotonicity_violation},
      {"max_principle_violation", r.max_principle_violation},
      {"decay",
       {{"r_lo", r.decay_r_lo},
        {"r_hi", r.decay_r_hi},
        {"samples", r.decay.samples},
        {"A1", r.decay.a_min},
        {"A2", r.decay.a_max},
        {"B1", r.decay.b_min},
        {"B2", r.decay.b_max}}},
  };
  if (r.has_diagnostics) {
    const auto& d = r.diagnostics;
    j["diagnostics"] = {{"nodes", d.nodes},
                        {"s2_min", d.s2_min},
                        {"gamma_mean", d.gamma_mean},
                        {"gamma_spread", d.gamma_spread},
                        {"gamma_vs_potential", d.gamma_vs_potential},
                        {"w_isotropy", d.w_isotropy},
                        {"boundary_nodes", d.boundary_nodes},
                        {"boundary_identity", d.boundary_identity}};
  }
  return j;
}

}  // namespace fincap::capacity
