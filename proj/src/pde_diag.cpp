#include <algorithm>
#include <cmath>
#include <limits>

#include "fincap/error.hpp"
#include "fincap/pde.hpp"
#include "fincap/reduce.hpp"
#include "pde_internal.hpp"

namespace fincap::pde {

Derivatives node_derivatives(const ScalarField& field, int i, int j, int k) {
  Derivatives out;
  const VoxelDomain& d = *field.domain;
  const int p[3] = {i, j, k};
  for (int a = 0; a < 3; ++a)
    if (p[a] < 1 || p[a] > d.n(a) - 2) return out;
  for (int c = -1; c <= 1; ++c)
    for (int b = -1; b <= 1; ++b)
      for (int a = -1; a <= 1; ++a)
        if (d.kind(d.index(i + a, j + b, k + c)) == NodeKind::Outside) return out;
  double w1[3][3], w2[3][3];
  for (int a = 0; a < 3; ++a) detail::fd_weights(d.axis(a), p[a], w1[a], w2[a]);
  auto u = [&](int a, int b, int c) { return field.values[d.index(i + a, j + b, k + c)]; };
  for (int ax = 0; ax < 3; ++ax) {
    double s1 = 0.0, s2 = 0.0;
    for (int o = -1; o <= 1; ++o) {
      const int off[3] = {ax == 0 ? o : 0, ax == 1 ? o : 0, ax == 2 ? o : 0};
      const double v = u(off[0], off[1], off[2]);
      s1 += w1[ax][o + 1] * v;
      s2 += w2[ax][o + 1] * v;
    }
    out.du[ax] = s1;
    out.d2u[4 * ax] = s2;
  }
  for (int a1 = 0; a1 < 3; ++a1)
    for (int a2 = a1 + 1; a2 < 3; ++a2) {
      double s = 0.0;
      for (int o1 = -1; o1 <= 1; ++o1)
        for (int o2 = -1; o2 <= 1; ++o2) {
          int off[3] = {0, 0, 0};
          off[a1] = o1;
          off[a2] = o2;
          s += w1[a1][o1 + 1] * w1[a2][o2 + 1] * u(off[0], off[1], off[2]);
        }
      out.d2u[3 * a1 + a2] = out.d2u[3 * a2 + a1] = s;
    }
  out.ok = true;
  return out;
}

namespace {

double local_spacing(const VoxelDomain& d, const double* x) {
  double h = 0.0;
  for (int a = 0; a < 3; ++a) {
    const auto& xs = d.axis(a);
    auto it = std::upper_bound(xs.begin(), xs.end(), x[a]);
    std::size_t i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - xs.begin(), 1,
                                                                         static_cast<std::ptrdiff_t>(xs.size()) - 1));
    h = std::max(h, xs[i] - xs[i - 1]);
  }
  return h;
}

double trace_prod(const double* A, const double* B) {
  double s = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) s += A[3 * r + c] * B[3 * c + r];
  return s;
}

// div of grad H(D u) by central differences of the nodal vector field.
bool anisotropic_curvature(const ScalarField& f, const NormModel& m, int i, int j, int k, double& mh) {
  const VoxelDomain& d = *f.domain;
  const int p[3] = {i, j, k};
  mh = 0.0;
  for (int ax = 0; ax < 3; ++ax) {
    double w1[3], w2[3];
    detail::fd_weights(d.axis(ax), p[ax], w1, w2);
    for (int o = -1; o <= 1; ++o) {
      int q[3] = {i, j, k};
      q[ax] += o;
      const Derivatives dn = node_derivatives(f, q[0], q[1], q[2]);
      if (!dn.ok) return false;
      if (dn.du[0] == 0.0 && dn.du[1] == 0.0 && dn.du[2] == 0.0) return false;
      double gh[3];
      m.grad_h(dn.du, gh);
      mh += w1[o + 1] * gh[ax];
    }
  }
  return true;
}

}  // namespace

FluxSamples boundary_flux(const ScalarField& field, const NormModel& model, const ConvexBody& body, bool exterior,
                          int n_pol) {
  if (body.dim() != 3) throw UnsupportedDimension("boundary_flux: N = 3 only");
  const VoxelDomain& d = *field.domain;
  const auto grid = geom::SphereGrid::product(3, n_pol, 2 * n_pol);
  FluxSamples fs;
  const double u0 = exterior ? field.meta.bc_inner : field.meta.bc_outer;
  for (std::size_t q = 0; q < grid.size(); ++q) {
    const Vec th = grid.node_vec(q);
    const Vec p = body.boundary_point(th);
    const double area = grid.weight(q) * body.tangential_hessian(th).determinant();
    const Vec dir = exterior ? th : Vec(-th);
    const double delta = 2.0 * local_spacing(d, p.data());
    const Vec p1 = p + delta * dir, p2 = p + 2.0 * delta * dir;
    bool c1 = true, c2 = true;
    const double u1 = field.sample(p1.data(), &c1), u2 = field.sample(p2.data(), &c2);
    const double du = (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * delta);
    const double hn = model.h(th);
    fs.points.push_back(p);
    fs.values.push_back(std::abs(du) * hn);
    fs.weights.push_back(area);
    fs.normal_h.push_back(hn);
    fs.degraded.push_back(!(c1 && c2));
    if (!(c1 && c2)) ++fs.degraded_count;
  }
  const double wsum = ordered_sum(fs.weights);
  std::vector<double> tmp(fs.values.size());
  for (std::size_t q = 0; q < tmp.size(); ++q) tmp[q] = fs.weights[q] * fs.values[q];
  fs.mean = ordered_sum(tmp) / wsum;
  for (std::size_t q = 0; q < tmp.size(); ++q) tmp[q] = fs.weights[q] * (fs.values[q] - fs.mean) * (fs.values[q] - fs.mean);
  fs.stddev = std::sqrt(ordered_sum(tmp) / wsum);
  fs.cv = fs.mean > 0.0 ? fs.stddev / fs.mean : 0.0;
  fs.min = *std::min_element(fs.values.begin(), fs.values.end());
  fs.max = *std::max_element(fs.values.begin(), fs.values.end());
  return fs;
}

LaplacianResult finsler_laplacian_apply(const ScalarField& field, const NormModel& model) {
  if (model.dim() != 3) throw UnsupportedDimension("finsler_laplacian_apply: N = 3 only");
  const VoxelDomain& d = *field.domain;
  LaplacianResult r;
  r.value = ScalarField{field.domain, std::vector<double>(d.size(), std::numeric_limits<double>::quiet_NaN()),
                        field.meta};
  r.value.meta.problem = field.meta.problem + ":finsler-laplacian";
  const double floor = 1e-12 / d.min_spacing();
  for (std::size_t idx = 0; idx < d.size(); ++idx) {
    if (d.kind(idx) == NodeKind::Outside) continue;
    int i, j, k;
    d.ijk(idx, i, j, k);
    const Derivatives dv = node_derivatives(field, i, j, k);
    if (!dv.ok || std::sqrt(dv.du[0] * dv.du[0] + dv.du[1] * dv.du[1] + dv.du[2] * dv.du[2]) <= floor) {
      ++r.skipped;
      continue;
    }
    double hv[9];
    model.hess_v(dv.du, hv);
    r.value.values[idx] = trace_prod(hv, dv.d2u);
    ++r.evaluated;
  }
  return r;
}

DecompositionReport curvature_decomposition_check(const ScalarField& field, const NormModel& model, double level) {
  const VoxelDomain& d = *field.domain;
  DecompositionReport rep;
  double sum = 0.0;
  for (std::size_t idx = 0; idx < d.size(); ++idx) {
    if (d.kind(idx) == NodeKind::Outside) continue;
    int i, j, k;
    d.ijk(idx, i, j, k);
    const auto x = d.point(idx);
    const Derivatives dv = node_derivatives(field, i, j, k);
    if (!dv.ok) continue;
    const double gnorm = std::sqrt(dv.du[0] * dv.du[0] + dv.du[1] * dv.du[1] + dv.du[2] * dv.du[2]);
    if (std::abs(field.values[idx] - level) > gnorm * local_spacing(d, x.data())) continue;
    double mh;
    if (gnorm <= 1e-12 / d.min_spacing() || !anisotropic_curvature(field, model, i, j, k, mh)) {
      ++rep.skipped;
      continue;
    }
    double hv[9], gh[3];
    model.hess_v(dv.du, hv);
    const double H = model.grad_h(dv.du, gh);
    const double lap = trace_prod(hv, dv.d2u);
    double q = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) q += gh[a] * gh[b] * dv.d2u[3 * a + b];
    const double res = std::abs(lap - (mh * H + q));
    rep.max_residual = std::max(rep.max_residual, res);
    rep.max_laplacian = std::max({rep.max_laplacian, std::abs(mh * H), std::abs(q)});
    sum += res;
    ++rep.nodes;
  }
  rep.mean_residual = rep.nodes ? sum / static_cast<double>(rep.nodes) : 0.0;
  return rep;
}

DecayReport decay_brackets(const ScalarField& field, const NormModel& model, const Vec& center, double r_lo,
                           double r_hi) {
  const VoxelDomain& d = *field.domain;
  DecayReport rep;
  rep.a_min = rep.b_min = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < d.size(); ++idx) {
    if (d.kind(idx) != NodeKind::Active) continue;
    const auto x = d.point(idx);
    const double y[3] = {x[0] - center(0), x[1] - center(1), x[2] - center(2)};
    const double rho = model.h0(y);
    if (rho < r_lo || rho > r_hi) continue;
    int i, j, k;
    d.ijk(idx, i, j, k);
    const Derivatives dv = node_derivatives(field, i, j, k);
    if (!dv.ok) continue;
    const double a = field.values[idx] * rho;
    const double b = model.h(dv.du) * rho * rho;
    rep.a_min = std::min(rep.a_min, a);
    rep.a_max = std::max(rep.a_max, a);
    rep.b_min = std::min(rep.b_min, b);
    rep.b_max = std::max(rep.b_max, b);
    ++rep.samples;
  }
  if (rep.samples == 0) rep.a_min = rep.b_min = 0.0;
  return rep;
}

AuxiliaryDiagnostics auxiliary_diagnostics(const ScalarField& u, const NormModel& model, const ConvexBody& body) {
  const VoxelDomain& d = *u.domain;
  ScalarField v = u;
  for (double& x : v.values) x = x > 0.0 ? 1.0 / (x * x) : std::numeric_limits<double>::infinity();
  AuxiliaryDiagnostics out;
  out.s2_min = std::numeric_limits<double>::infinity();
  double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0, gsum = 0.0;
  double pot = 0.0, iso = 0.0;
  const auto grid = bodies::default_grid(3);
  const auto ext = bodies::dual_extent(body, model, grid);
  for (std::size_t idx = 0; idx < d.size(); ++idx) {
    if (d.kind(idx) != NodeKind::Active) continue;
    int i, j, k;
    d.ijk(idx, i, j, k);
    const Derivatives dv = node_derivatives(v, i, j, k);
    if (!dv.ok || !std::isfinite(dv.du[0] + dv.du[1] + dv.du[2])) continue;
    double hv[9], W[9];
    model.hess_v(dv.du, hv);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int t = 0; t < 3; ++t) s += hv[3 * r + t] * dv.d2u[3 * t + c];
        W[3 * r + c] = s;
      }
    const double tr = W[0] + W[4] + W[8];
    const double s2 = 0.5 * (tr * tr - trace_prod(W, W));
    const double gamma = tr / 3.0;
    double gv[3];
    const double V = model.grad_v(dv.du, gv);
    out.s2_min = std::min(out.s2_min, s2);
    gmin = std::min(gmin, gamma);
    gmax = std::max(gmax, gamma);
    gsum += gamma;
    pot = std::max(pot, std::abs(gamma - V / v.values[idx]));
    double dev = 0.0;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) dev = std::max(dev, std::abs(W[3 * r + c] - (r == c ? gamma : 0.0)));
    iso = std::max(iso, dev / std::abs(gamma));
    ++out.nodes;

    // Boundary identity on the first layers outside the body.
    const auto x = d.point(idx);
    if (body.gauge(x.data()) > 1.0 + 3.0 * local_spacing(d, x.data()) / ext.inner) continue;
    double mh;
    if (!anisotropic_curvature(v, model, i, j, k, mh)) continue;
    double lhs = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) lhs += ((a == b ? tr : 0.0) - W[3 * b + a]) * gv[a] * dv.du[b];
    const double H = model.h(dv.du);
    const double rhs = H * H * H * mh;
    out.boundary_identity = std::max(out.boundary_identity, std::abs(lhs - rhs) / std::abs(rhs));
    ++out.boundary_nodes;
  }
  if (out.nodes) {
    out.gamma_mean = gsum / static_cast<double>(out.nodes);
    out.gamma_spread = (gmax - gmin) / std::abs(out.gamma_mean);
    out.gamma_vs_potential = pot / std::abs(out.gamma_mean);
  } else {
    out.s2_min = 0.0;
  }
  out.w_isotropy = iso;
  return out;
}

}  // namespace fincap::pde
