#include <cmath>

#include "fincap/error.hpp"
#include "fincap/pde.hpp"
#include "fincap/reduce.hpp"
#include "pde_internal.hpp"

namespace fincap::pde {

namespace kernels {

namespace {

struct QuadraticEval {
  double A[9];
  explicit QuadraticEval(const NormModel& m) {
    const Mat Q = m.quadratic_matrix();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) A[3 * r + c] = Q(r, c);
  }
  double operator()(const double* g, double* q) const {
    for (int r = 0; r < 3; ++r) q[r] = A[3 * r] * g[0] + A[3 * r + 1] * g[1] + A[3 * r + 2] * g[2];
    return 0.5 * (g[0] * q[0] + g[1] * q[1] + g[2] * q[2]);
  }
};

struct ModelEval {
  const NormModel* m;
  double floor2;
  double operator()(const double* g, double* q) const {
    if (g[0] * g[0] + g[1] * g[1] + g[2] * g[2] <= floor2) {
      q[0] = q[1] = q[2] = 0.0;
      return 0.0;
    }
    return m->grad_v(g, q);
  }
};

template <class Eval>
double cell_pass(const Problem& p, const Eval& ev, const double* u, double* grad, int i, int j, int k) {
  double e = 0.0;
  detail::Corner cn;
  for (int cc = 0; cc < 8; ++cc) {
    if (!detail::corner_geometry(*p.domain, i, j, k, cc & 1, (cc >> 1) & 1, (cc >> 2) & 1, cn)) continue;
    const double u0 = u[cn.node];
    double g[3], inv[3], q[3];
    for (int ax = 0; ax < 3; ++ax) {
      const double val = cn.has_nb[ax] ? u[cn.nb[ax]] : p.bc[static_cast<int>(cn.cut_side[ax])];
      inv[ax] = cn.sgn[ax] * cn.scale[ax] / cn.len[ax];
      g[ax] = (val - u0) * inv[ax];
    }
    const double v = ev(g, q);
    e += cn.weight * (v + p.source * u0);
    if (grad) {
      double s = 0.0;
      for (int ax = 0; ax < 3; ++ax) {
        const double f = cn.weight * q[ax] * inv[ax];
        s += f;
        if (cn.has_nb[ax]) grad[cn.nb[ax]] += f;
      }
      grad[cn.node] += cn.weight * p.source - s;
    }
  }
  return e;
}

std::vector<double>& cell_buffer(std::size_t n) {
  thread_local std::vector<double> buf;
  buf.assign(n, 0.0);
  return buf;
}

void mask(const VoxelDomain& d, double* grad) {
  for (std::size_t idx = 0; idx < d.size(); ++idx)
    if (d.kind(idx) != NodeKind::Active) grad[idx] = 0.0;
}

template <class Eval>
double run_serial(const Problem& p, const Eval& ev, const double* u, double* grad) {
  const VoxelDomain& d = *p.domain;
  const int cx = d.n(0) - 1, cy = d.n(1) - 1, cz = d.n(2) - 1;
  auto& cells = cell_buffer(static_cast<std::size_t>(cx) * cy * cz);
  if (grad) std::fill(grad, grad + d.size(), 0.0);
  for (int k = 0; k < cz; ++k)
    for (int j = 0; j < cy; ++j)
      for (int i = 0; i < cx; ++i)
        cells[static_cast<std::size_t>(i) + static_cast<std::size_t>(cx) * (j + static_cast<std::size_t>(cy) * k)] =
            cell_pass(p, ev, u, grad, i, j, k);
  if (grad) mask(d, grad);
  return ordered_sum(cells);
}

template <class Eval>
double run_parallel(const Problem& p, const Eval& ev, const double* u, double* grad) {
  const VoxelDomain& d = *p.domain;
  const int cx = d.n(0) - 1, cy = d.n(1) - 1, cz = d.n(2) - 1;
  auto& cells = cell_buffer(static_cast<std::size_t>(cx) * cy * cz);
  double* cp = cells.data();
  if (grad) {
    const auto n = static_cast<std::ptrdiff_t>(d.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < n; ++s) grad[s] = 0.0;
  }
  for (int color = 0; color < 8; ++color) {
    const int oi = color & 1, oj = (color >> 1) & 1, ok = (color >> 2) & 1;
    const int nk = (cz - ok + 1) / 2, nj = (cy - oj + 1) / 2;
#pragma omp parallel for collapse(2) schedule(static)
    for (int kk = 0; kk < nk; ++kk)
      for (int jj = 0; jj < nj; ++jj) {
        const int k = ok + 2 * kk, j = oj + 2 * jj;
        for (int i = oi; i < cx; i += 2)
          cp[static_cast<std::size_t>(i) + static_cast<std::size_t>(cx) * (j + static_cast<std::size_t>(cy) * k)] =
              cell_pass(p, ev, u, grad, i, j, k);
      }
  }
  if (grad) {
    const auto n = static_cast<std::ptrdiff_t>(d.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < n; ++s)
      if (d.kind(static_cast<std::size_t>(s)) != NodeKind::Active) grad[s] = 0.0;
  }
  return ordered_sum_parallel(cells);
}

template <bool Parallel>
double dispatch(const Problem& p, const double* u, double* grad) {
  if (!p.domain || !p.model) throw InvalidArgument("energy kernel: incomplete problem");
  if (p.model->dim() != 3) throw UnsupportedDimension("energy kernel: N = 3 only");
  if (p.model->is_quadratic()) {
    const QuadraticEval ev(*p.model);
    return Parallel ? run_parallel(p, ev, u, grad) : run_serial(p, ev, u, grad);
  }
  const ModelEval ev{p.model, p.grad_floor * p.grad_floor};
  return Parallel ? run_parallel(p, ev, u, grad) : run_serial(p, ev, u, grad);
}

}  // namespace

double energy_gradient_serial(const Problem& p, const double* u, double* grad) { return dispatch<false>(p, u, grad); }

double energy_gradient_parallel(const Problem& p, const double* u, double* grad) {
  return dispatch<true>(p, u, grad);
}

}  // namespace kernels

namespace {

kernels::Problem make_problem(const ScalarField& f, const NormModel& model) {
  kernels::Problem p;
  p.domain = f.domain.get();
  p.model = &model;
  p.bc[static_cast<int>(Side::Inner)] = f.meta.bc_inner;
  p.bc[static_cast<int>(Side::Outer)] = f.meta.bc_outer;
  p.source = f.meta.source;
  return p;
}

void check_field(const ScalarField& f) {
  if (!f.domain || f.values.size() != f.domain->size()) throw InvalidArgument("field does not match its domain");
}

}  // namespace

double energy(const ScalarField& field, const NormModel& model) {
  check_field(field);
  return kernels::energy_gradient_parallel(make_problem(field, model), field.values.data(), nullptr);
}

ScalarField energy_gradient(const ScalarField& field, const NormModel& model) {
  check_field(field);
  ScalarField g{field.domain, std::vector<double>(field.values.size(), 0.0), field.meta};
  g.meta.problem = field.meta.problem + ":gradient";
  kernels::energy_gradient_parallel(make_problem(field, model), field.values.data(), g.values.data());
  return g;
}

}  // namespace fincap::pde
