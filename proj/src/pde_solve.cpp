#include <algorithm>
#include <cmath>
#include <limits>

#include "fincap/error.hpp"
#include "fincap/pde.hpp"
#include "fincap/reduce.hpp"

namespace fincap::pde {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  const auto nb = static_cast<std::ptrdiff_t>((n + kReduceBlock - 1) / kReduceBlock);
  std::vector<double> partial(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b_ = 0; b_ < nb; ++b_) {
    const std::size_t lo = static_cast<std::size_t>(b_) * kReduceBlock, hi = std::min(n, lo + kReduceBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    partial[static_cast<std::size_t>(b_)] = s;
  }
  return pairwise_sum(partial);
}

double sup_norm(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// y = x + t d
void axpy_to(std::vector<double>& y, const std::vector<double>& x, double t, const std::vector<double>& d) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + t * d[static_cast<std::size_t>(i)];
}

class Minimizer {
 public:
  Minimizer(const kernels::Problem& p, const SolverOptions& o, double tol_g) : p_(p), o_(o), tol_g_(tol_g) {}

  // Minimises over the active entries of u in place.
  void run(std::vector<double>& u, SolveStats& st) {
    const VoxelDomain& d = *p_.domain;
    const std::size_t n = u.size();
    std::vector<double> g(n), dir(n, 0.0), z(n), ut(n), gt(n), ad(n);
    std::vector<double> prec(n, 0.0);
    std::size_t n_active = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (d.kind(i) == NodeKind::Active) {
        prec[i] = 1.0 / d.stiffness_diagonal()[i];
        ++n_active;
      }
    const bool quadratic = p_.model->is_quadratic();
    const int restart = std::max(10, static_cast<int>(std::sqrt(static_cast<double>(n_active))));
    double E = eval(u, g, st);
    std::vector<double> energies{E};
    for (std::size_t i = 0; i < n; ++i) z[i] = prec[i] * g[i];
    double gz = dot(g, z);
    for (std::size_t i = 0; i < n; ++i) dir[i] = -z[i];
    double t_prev = 1.0;
    int since_restart = 0;
    st.tol_g = tol_g_;
    for (int it = 0;; ++it) {
      const double gsup = sup_norm(g);
      st.history.push_back(gsup);
      st.iterations = it;
      st.energy = E;
      st.final_grad = gsup;
      if (gsup < tol_g_ || n_active == 0) {
        st.stop_reason = "gradient";
        return;
      }
      if (it >= o_.window &&
          energies[static_cast<std::size_t>(it - o_.window)] - E <= o_.rel_decrement * std::abs(E)) {
        st.stop_reason = "energy decrement";
        return;
      }
      if (it >= o_.max_iters)
        throw ConvergenceFailure("solve_dirichlet: no convergence within max_iters", st.history);

      double dphi0 = dot(g, dir);
      if (!(dphi0 < 0.0)) {
        for (std::size_t i = 0; i < n; ++i) dir[i] = -z[i];
        dphi0 = -gz;
        since_restart = 0;
      }
      double t = 0.0;
      if (quadratic) {
        // J is quadratic in u: A d from one evaluation, exact step.
        axpy_to(ut, u, 1.0, dir);
        eval(ut, gt, st);
        const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < nn; ++i)
          ad[static_cast<std::size_t>(i)] = gt[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i)];
        const double dad = dot(dir, ad);
        if (!(dad > 0.0)) throw ConvergenceFailure("solve_dirichlet: lost positive curvature", st.history);
        t = -dphi0 / dad;
        axpy_to(u, u, t, dir);
        if ((it + 1) % 50 == 0) {
          E = eval(u, g, st);
        } else {
          axpy_to(g, g, t, ad);
          E += t * dphi0 + 0.5 * t * t * dad;
        }
      } else {
        double Et = 0.0;
        t = line_search(u, g, dir, E, dphi0, t_prev, ut, gt, Et, st);
        if (t <= 0.0) {
          if (gsup <= 100.0 * tol_g_) {
            st.stop_reason = "line search stalled near tolerance";
            return;
          }
          throw ConvergenceFailure("solve_dirichlet: line search failed", st.history);
        }
        std::swap(u, ut);
        std::swap(g, gt);
        E = Et;
      }
      t_prev = t;
      energies.push_back(E);
      // Polak-Ribiere+ with the Jacobi preconditioner.
      double gz_new = 0.0, gz_cross = 0.0;
      {
        std::vector<double>& znew = ad;  // reuse storage
        for (std::size_t i = 0; i < n; ++i) znew[i] = prec[i] * g[i];
        gz_new = dot(g, znew);
        gz_cross = dot(g, z);
        std::swap(z, znew);
      }
      double beta = std::max(0.0, (gz_new - gz_cross) / gz);
      gz = gz_new;
      if (++since_restart >= restart) {
        beta = 0.0;
        since_restart = 0;
      }
      for (std::size_t i = 0; i < n; ++i) dir[i] = -z[i] + beta * dir[i];
    }
  }

 private:
  double eval(const std::vector<double>& u, std::vector<double>& g, SolveStats& st) {
    ++st.evaluations;
    return o_.parallel ? kernels::energy_gradient_parallel(p_, u.data(), g.data())
                       : kernels::energy_gradient_serial(p_, u.data(), g.data());
  }

  // Safeguarded secant search for phi'(t) = 0 (phi convex), accepting on
  // sufficient decrease plus |phi'(t)| <= 0.1 |phi'(0)|.
  double line_search(const std::vector<double>& u, const std::vector<double>& g, const std::vector<double>& dir,
                     double E0, double dphi0, double t0, std::vector<double>& ut, std::vector<double>& gt, double& Et,
                     SolveStats& st) {
    (void)g;
    double lo = 0.0, dlo = dphi0, hi = -1.0, dhi = 0.0;
    double t = t0;
    double best_t = 0.0, best_E = E0;
    for (int k = 0; k < 30; ++k) {
      axpy_to(ut, u, t, dir);
      const double E = eval(ut, gt, st);
      const double dphi = dot(gt, dir);
      if (E <= E0 + 1e-4 * t * dphi0 && std::abs(dphi) <= 0.1 * std::abs(dphi0)) {
        Et = E;
        return t;
      }
      if (E < best_E) {
        best_E = E;
        best_t = t;
      }
      if (dphi < 0.0 && E <= E0) {
        lo = t;
        dlo = dphi;
      } else {
        hi = t;
        dhi = dphi;
      }
      double next;
      if (hi < 0.0) {
        next = t - dphi * (t - 0.0) / (dphi - dphi0);
        if (!std::isfinite(next) || next <= t) next = 2.0 * t;
        next = std::min(next, 10.0 * t);
      } else {
        next = (dhi > 0.0 && dlo < 0.0) ? lo - dlo * (hi - lo) / (dhi - dlo) : 0.5 * (lo + hi);
        const double w = hi - lo;
        next = std::clamp(next, lo + 0.1 * w, hi - 0.1 * w);
      }
      t = next;
    }
    if (best_t > 0.0) {
      axpy_to(ut, u, best_t, dir);
      Et = eval(ut, gt, st);
      return best_t;
    }
    return 0.0;
  }

  const kernels::Problem& p_;
  const SolverOptions& o_;
  double tol_g_;
};

double max_abs_extent(const VoxelDomain& d) {
  double L = 0.0;
  for (int a = 0; a < 3; ++a) L = std::max(L, 0.5 * (d.axis(a).back() - d.axis(a).front()));
  return L;
}

ScalarField run_solve(std::shared_ptr<const VoxelDomain> domain, const NormModel& model, double bc_in,
                      double bc_out, double source, const SolverOptions& opts, SolveStats* stats,
                      const std::string& problem) {
  if (!domain) throw InvalidArgument("solve: null domain");
  if (model.dim() != 3) throw UnsupportedDimension("PDE solvers are three-dimensional");
  if (!std::isfinite(bc_in) || !std::isfinite(bc_out)) throw InvalidArgument("solve: boundary values must be finite");
  const NormModel m = model.uniformly_convex() ? model : NormModel::regularized(model);
  const VoxelDomain& d = *domain;
  ScalarField f{domain, std::vector<double>(d.size(), 0.0), {}};
  f.meta.problem = problem;
  f.meta.norm = m.label();
  f.meta.bc_inner = bc_in;
  f.meta.bc_outer = bc_out;
  f.meta.source = source;
  const auto n = static_cast<std::ptrdiff_t>(d.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const auto i = static_cast<std::size_t>(s);
    if (d.kind(i) != NodeKind::Active) {
      f.values[i] = f.boundary_value(d.side(i));
      continue;
    }
    const auto x = d.point(i);
    double v;
    if (opts.initial_guess) {
      v = opts.initial_guess(x.data());
    } else if (d.has_inner()) {
      const double a = d.phi_in()(x.data()), b = -d.phi_out()(x.data());
      v = bc_in + (bc_out - bc_in) * a / (a + b);
    } else {
      v = bc_out;
    }
    f.values[i] = v;
  }
  const double h = d.min_spacing();
  const double L = max_abs_extent(d);
  const double jump = std::abs(bc_in - bc_out) + std::abs(source) * L * L;
  const double scale = h * (jump > 0.0 ? jump : 1.0);
  kernels::Problem p;
  p.domain = &d;
  p.model = &m;
  p.bc[static_cast<int>(Side::Inner)] = bc_in;
  p.bc[static_cast<int>(Side::Outer)] = bc_out;
  p.source = source;
  p.grad_floor = 1e-12 * (jump > 0.0 ? jump : 1.0) / h;
  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  st = SolveStats{};
  Minimizer mz(p, opts, opts.tol_g > 0.0 ? opts.tol_g : 1e-9 * scale);
  mz.run(f.values, st);
  if (source == 0.0) {
    const double lo = std::min(bc_in, bc_out), hi = std::max(bc_in, bc_out);
    double viol = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d.kind(i) == NodeKind::Active) viol = std::max({viol, f.values[i] - hi, lo - f.values[i]});
    st.max_principle_violation = viol;
  }
  return f;
}

}  // namespace

ScalarField solve_dirichlet(std::shared_ptr<const VoxelDomain> domain, const NormModel& model, double bc_inner,
                            double bc_outer, const SolverOptions& opts, SolveStats* stats) {
  return run_solve(std::move(domain), model, bc_inner, bc_outer, 0.0, opts, stats, "dirichlet");
}

namespace {

std::array<std::vector<double>, 3> exterior_axes(const ConvexBody& body, const NormModel& model, double r_grid,
                                                 int n, double max_growth) {
  std::array<std::vector<double>, 3> axes;
  const Vec& c = body.center();
  for (int a = 0; a < 3; ++a) {
    Vec e = Vec::Zero(3);
    e(a) = 1.0;
    const double up = body.h(e), down = body.h(Vec(-e));
    const double half = 0.5 * (up + down);
    const double core_lo = -down - 0.15 * half, core_hi = up + 0.15 * half;
    const double reach = 1.03 * r_grid * model.h(e);
    axes[static_cast<std::size_t>(a)] = graded_axis(n, c(a) - reach, c(a) + reach, core_lo, core_hi, max_growth);
  }
  return axes;
}

std::shared_ptr<VoxelDomain> make_exterior(const ConvexBody& body, const NormModel& model,
                                           std::array<std::vector<double>, 3> axes, double r_trunc) {
  const Vec c = body.center();
  LevelSet in = [body](const double* x) { return body.gauge(x) - 1.0; };
  LevelSet out = [model, c, r_trunc](const double* x) {
    const double y[3] = {x[0] - c(0), x[1] - c(1), x[2] - c(2)};
    return model.h0(y) / r_trunc - 1.0;
  };
  auto d = std::make_shared<VoxelDomain>(std::move(axes), in, out);
  const auto rep = d->report();
  if (!rep.ok) throw InvalidArgument("exterior domain: grid does not resolve the region");
  return d;
}

}  // namespace

std::shared_ptr<VoxelDomain> exterior_domain(const ConvexBody& body, const NormModel& model, double r_out,
                                             double r_trunc, int n, double max_growth) {
  if (body.dim() != 3 || model.dim() != 3) throw UnsupportedDimension("exterior_domain: N = 3 only");
  return make_exterior(body, model, exterior_axes(body, model, r_out, n, max_growth), r_trunc);
}

ExteriorResult solve_exterior_capacity(const ConvexBody& body, const NormModel& model, const ExteriorOptions& opts) {
  if (body.dim() != 3 || model.dim() != 3) throw UnsupportedDimension("capacity solver: N = 3 only");
  const NormModel m = model.uniformly_convex() ? model : NormModel::regularized(model);
  ExteriorResult res;
  const auto ext = bodies::dual_extent(body, m, bodies::default_grid(3));
  res.r_inner = ext.inner;
  res.r_outer = ext.outer;
  std::vector<double> radii = opts.r_out;
  if (radii.empty()) radii = {4.0 * ext.outer, 8.0 * ext.outer};
  std::sort(radii.begin(), radii.end());
  for (double r : radii)
    if (!(r > ext.outer * 1.05)) throw InvalidArgument("solve_exterior_capacity: R_out must enclose the body");
  res.r_out = radii;
  const auto axes = exterior_axes(body, m, radii.back(), opts.grid, opts.max_growth);
  const Vec c = body.center();
  std::vector<ScalarField> fields;
  for (double R : radii) {
    auto dom = make_exterior(body, m, axes, R);
    SolverOptions so = opts.solver;
    if (!so.initial_guess)
      so.initial_guess = [body, m, c, R](const double* x) {
        // Harmonic profile in the body gauge: exact for Wulff balls.
        const double q = body.gauge(x);
        const double y[3] = {x[0] - c(0), x[1] - c(1), x[2] - c(2)};
        const double rho = m.h0(y);
        const double qR = R * q / rho;
        return std::clamp((1.0 / q - 1.0 / qR) / (1.0 - 1.0 / qR), 0.0, 1.0);
      };
    SolveStats st;
    ScalarField f = run_solve(dom, m, 1.0, 0.0, 0.0, so, &st, "exterior-capacity");
    f.meta.body = body.label();
    res.capacity.push_back(2.0 * st.energy);
    res.stats.push_back(std::move(st));
    fields.push_back(std::move(f));
  }
  for (std::size_t a = 0; a + 1 < fields.size(); ++a) {
    const VoxelDomain& da = *fields[a].domain;
    double viol = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i)
      if (da.kind(i) != NodeKind::Outside) viol = std::max(viol, fields[a].values[i] - fields[a + 1].values[i]);
    res.monotonicity_violation = std::max(res.monotonicity_violation, viol);
  }
  if (res.monotonicity_violation > 1e-8)
    throw SolverInconsistency("solve_exterior_capacity: truncated solutions not monotone in R_out");

  // 1/Cap_R = a - b s with s = R^{2-N}; least squares over the radii.
  if (radii.size() >= 2) {
    double ss = 0, sy = 0, sss = 0, ssy = 0;
    const double k = static_cast<double>(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const double s = 1.0 / radii[i], y = 1.0 / res.capacity[i];
      ss += s;
      sy += y;
      sss += s * s;
      ssy += s * y;
    }
    const double slope = (k * ssy - ss * sy) / (k * sss - ss * ss);
    const double a = (sy - slope * ss) / k;
    res.cap_extrapolated = 1.0 / a;
    res.far_constant = -slope / a;
  } else {
    res.cap_extrapolated = res.capacity.back();
  }
  res.field = std::move(fields.back());
  res.extrapolated = res.field;
  res.extrapolated.meta.problem = "exterior-capacity:extrapolated";
  const double ms = res.far_constant / radii.back();
  for (std::size_t i = 0; i < res.extrapolated.values.size(); ++i) {
    if (res.field.domain->side(i) == Side::Inner) continue;
    double& v = res.extrapolated.values[i];
    v = v + ms * (1.0 - v);
  }
  res.extrapolated.meta.bc_outer = ms;
  return res;
}

ScalarField solve_torsion(const ConvexBody& body, const NormModel& model, const TorsionOptions& opts,
                          SolveStats* stats) {
  if (body.dim() != 3 || model.dim() != 3) throw UnsupportedDimension("solve_torsion: N = 3 only");
  const NormModel m = model.uniformly_convex() ? model : NormModel::regularized(model);
  std::array<std::vector<double>, 3> axes;
  const Vec& c = body.center();
  for (int a = 0; a < 3; ++a) {
    Vec e = Vec::Zero(3);
    e(a) = 1.0;
    const double up = body.h(e), down = body.h(Vec(-e));
    const double pad = 0.04 * (up + down);
    axes[static_cast<std::size_t>(a)] = uniform_axis(opts.grid, c(a) - down - pad, c(a) + up + pad);
  }
  LevelSet out = [body](const double* x) { return body.gauge(x) - 1.0; };
  auto dom = std::make_shared<VoxelDomain>(std::move(axes), LevelSet{}, out);
  if (!dom->report().ok) throw InvalidArgument("solve_torsion: grid does not resolve the body");
  const auto ext = bodies::dual_extent(body, m, bodies::default_grid(3));
  SolverOptions so = opts.solver;
  if (!so.initial_guess) {
    const double r2 = ext.inner * ext.outer;
    so.initial_guess = [body, r2](const double* x) {
      const double q = body.gauge(x);
      return std::min(0.0, r2 * (q * q - 1.0) / 6.0);
    };
  }
  ScalarField f = run_solve(dom, m, 0.0, 0.0, 1.0, so, stats, "torsion");
  f.meta.body = body.label();
  return f;
}

}  // namespace fincap::pde
