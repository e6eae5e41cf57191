#include <algorithm>
#include <cmath>
#include <limits>

#include "fincap/error.hpp"
#include "fincap/pde.hpp"
#include "pde_internal.hpp"

namespace fincap::pde {

std::vector<double> uniform_axis(int n, double lo, double hi) {
  if (n < 3 || !(hi > lo)) throw InvalidArgument("uniform_axis: need n >= 3 and hi > lo");
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  x.back() = hi;
  return x;
}

namespace {

// Cells of geometric growth g starting after a cell of size h needed to
// cover len.
int growth_cells(double len, double h, double g) {
  if (len <= 0.0) return 0;
  return static_cast<int>(std::ceil(std::log1p(len * (g - 1.0) / (h * g)) / std::log(g) - 1e-12));
}

// Ratio r with h (r + r^2 + ... + r^k) = len.
double fill_ratio(double len, double h, int k) {
  double a = 1e-3, b = 10.0;
  auto sum = [&](double r) {
    double s = 0.0, t = 1.0;
    for (int i = 0; i < k; ++i) s += (t *= r);
    return h * s;
  };
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    (sum(m) < len ? a : b) = m;
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> graded_axis(int n, double lo, double hi, double core_lo, double core_hi, double max_growth) {
  if (n < 3 || !(hi > lo)) throw InvalidArgument("graded_axis: need n >= 3 and hi > lo");
  if (!(max_growth > 1.0)) throw InvalidArgument("graded_axis: growth must exceed 1");
  core_lo = std::max(core_lo, lo);
  core_hi = std::min(core_hi, hi);
  if (!(core_hi > core_lo)) throw InvalidArgument("graded_axis: empty core");
  const double core = core_hi - core_lo, left = core_lo - lo, right = hi - core_hi;
  auto total = [&](double h) {
    return static_cast<int>(std::ceil(core / h - 1e-9)) + growth_cells(left, h, max_growth) +
           growth_cells(right, h, max_growth);
  };
  double a = (hi - lo) * 1e-6, b = hi - lo;
  if (total(b) > n - 1) throw InvalidArgument("graded_axis: too few nodes for the growth limit");
  for (int it = 0; it < 200; ++it) {
    const double m = std::sqrt(a * b);
    (total(m) <= n - 1 ? b : a) = m;
  }
  const int kl = growth_cells(left, b, max_growth), kr = growth_cells(right, b, max_growth);
  const int m = n - 1 - kl - kr;
  const double h = core / m;
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(n));
  if (kl > 0) {
    const double r = fill_ratio(left, h, kl);
    std::vector<double> l;
    double pos = core_lo, step = h;
    for (int i = 0; i < kl; ++i) {
      step *= r;
      pos -= step;
      l.push_back(pos);
    }
    l.back() = lo;
    x.assign(l.rbegin(), l.rend());
  }
  for (int i = 0; i <= m; ++i) x.push_back(core_lo + core * i / m);
  if (kr > 0) {
    const double r = fill_ratio(right, h, kr);
    double pos = core_hi, step = h;
    for (int i = 0; i < kr; ++i) {
      step *= r;
      pos += step;
      x.push_back(pos);
    }
    x.back() = hi;
  }
  return x;
}

VoxelDomain::VoxelDomain(std::array<std::vector<double>, 3> axes, LevelSet phi_in, LevelSet phi_out, double snap)
    : axes_(std::move(axes)), phi_in_(std::move(phi_in)), phi_out_(std::move(phi_out)) {
  if (!phi_out_) throw InvalidArgument("VoxelDomain: outer level set is required");
  min_spacing_ = std::numeric_limits<double>::infinity();
  for (const auto& x : axes_) {
    if (x.size() < 3) throw InvalidArgument("VoxelDomain: each axis needs at least 3 nodes");
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (!(x[i] > x[i - 1])) throw InvalidArgument("VoxelDomain: axes must be increasing");
      min_spacing_ = std::min(min_spacing_, x[i] - x[i - 1]);
    }
  }
  const std::size_t total = axes_[0].size() * axes_[1].size() * axes_[2].size();
  kind_.assign(total, NodeKind::Outside);
  side_.assign(total, Side::None);
  cut_index_.assign(total, -1);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(total); ++s) {
    const auto idx = static_cast<std::size_t>(s);
    const auto x = point(idx);
    if (phi_in_ && !(phi_in_(x.data()) > 0.0)) {
      side_[idx] = Side::Inner;
    } else if (!(phi_out_(x.data()) < 0.0)) {
      side_[idx] = Side::Outer;
    } else {
      kind_[idx] = NodeKind::Active;
    }
  }

  // Cut fractions by bisection on the level set of the side crossed.
  const int nn[3] = {n(0), n(1), n(2)};
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (kind_[idx] == NodeKind::Outside) continue;
    int ijk_[3];
    ijk(idx, ijk_[0], ijk_[1], ijk_[2]);
    CutRecord rec;
    bool any = false;
    for (int dir = 0; dir < 6; ++dir) {
      const int ax = dir / 2;
      int q[3] = {ijk_[0], ijk_[1], ijk_[2]};
      q[ax] += (dir % 2 == 0) ? -1 : 1;
      if (q[ax] < 0 || q[ax] >= nn[ax]) continue;
      const std::size_t m = index(q[0], q[1], q[2]);
      if (kind_[m] != NodeKind::Outside) continue;
      const auto xa = point(idx), xb = point(m);
      const Side sd = side_[m];
      auto phi = [&](double t) {
        double y[3];
        for (int d = 0; d < 3; ++d) y[d] = xa[static_cast<std::size_t>(d)] + t * (xb[static_cast<std::size_t>(d)] - xa[static_cast<std::size_t>(d)]);
        return sd == Side::Inner ? -phi_in_(y) : phi_out_(y);
      };
      double a = 0.0, b = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (a + b);
        (phi(mid) < 0.0 ? a : b) = mid;
      }
      rec.theta[static_cast<std::size_t>(dir)] = 0.5 * (a + b);
      rec.side[static_cast<std::size_t>(dir)] = sd;
      any = true;
    }
    if (any) {
      cut_index_[idx] = static_cast<std::int32_t>(cuts_.size());
      cuts_.push_back(rec);
    }
  }
  for (std::size_t idx = 0; idx < total; ++idx) {
    const CutRecord* c = cut(idx);
    if (!c) continue;
    double tmin = 1.0;
    Side sd = Side::None;
    for (int dir = 0; dir < 6; ++dir)
      if (c->side[static_cast<std::size_t>(dir)] != Side::None && c->theta[static_cast<std::size_t>(dir)] < tmin) {
        tmin = c->theta[static_cast<std::size_t>(dir)];
        sd = c->side[static_cast<std::size_t>(dir)];
      }
    if (tmin < snap) {
      kind_[idx] = NodeKind::Fixed;
      side_[idx] = sd;
    }
  }

  // Level-set slope at the cut points (central differences).
  min_slope_ = std::numeric_limits<double>::infinity();
  const double eps = 1e-3 * min_spacing_;
  for (std::size_t idx = 0; idx < total; ++idx) {
    const CutRecord* c = cut(idx);
    if (!c) continue;
    int ijk_[3];
    ijk(idx, ijk_[0], ijk_[1], ijk_[2]);
    const auto xa = point(idx);
    for (int dir = 0; dir < 6; ++dir) {
      const Side sd = c->side[static_cast<std::size_t>(dir)];
      if (sd == Side::None) continue;
      const int ax = dir / 2;
      const auto& xs = axes_[static_cast<std::size_t>(ax)];
      const int i0 = ijk_[ax];
      const int i1 = i0 + ((dir % 2 == 0) ? -1 : 1);
      double y[3] = {xa[0], xa[1], xa[2]};
      y[ax] += c->theta[static_cast<std::size_t>(dir)] * (xs[static_cast<std::size_t>(i1)] - xs[static_cast<std::size_t>(i0)]);
      const LevelSet& f = sd == Side::Inner ? phi_in_ : phi_out_;
      double g2 = 0.0;
      for (int d = 0; d < 3; ++d) {
        double yp[3] = {y[0], y[1], y[2]}, ym[3] = {y[0], y[1], y[2]};
        yp[d] += eps;
        ym[d] -= eps;
        const double gd = (f(yp) - f(ym)) / (2 * eps);
        g2 += gd * gd;
      }
      min_slope_ = std::min(min_slope_, std::sqrt(g2));
    }
  }
  if (!std::isfinite(min_slope_)) min_slope_ = 0.0;

  // Euclidean stiffness diagonal and lumped nodal volumes.
  diag_.assign(total, 0.0);
  mass_.assign(total, 0.0);
  detail::Corner cn;
  for (int k = 0; k + 1 < nn[2]; ++k)
    for (int j = 0; j + 1 < nn[1]; ++j)
      for (int i = 0; i + 1 < nn[0]; ++i)
        for (int cc = 0; cc < 8; ++cc) {
          if (!detail::corner_geometry(*this, i, j, k, cc & 1, (cc >> 1) & 1, (cc >> 2) & 1, cn)) continue;
          mass_[cn.node] += cn.weight;
          for (int ax = 0; ax < 3; ++ax) {
            const double c2 = cn.weight * cn.scale[ax] * cn.scale[ax] / (cn.len[ax] * cn.len[ax]);
            diag_[cn.node] += c2;
            if (cn.has_nb[ax]) diag_[cn.nb[ax]] += c2;
          }
        }
}

std::array<double, 3> VoxelDomain::point(std::size_t idx) const {
  int i, j, k;
  ijk(idx, i, j, k);
  return {axes_[0][static_cast<std::size_t>(i)], axes_[1][static_cast<std::size_t>(j)],
          axes_[2][static_cast<std::size_t>(k)]};
}

void VoxelDomain::ijk(std::size_t idx, int& i, int& j, int& k) const {
  const std::size_t nx = axes_[0].size(), ny = axes_[1].size();
  i = static_cast<int>(idx % nx);
  j = static_cast<int>((idx / nx) % ny);
  k = static_cast<int>(idx / (nx * ny));
}

DomainReport VoxelDomain::report() const {
  DomainReport r;
  for (std::size_t idx = 0; idx < size(); ++idx) {
    switch (kind_[idx]) {
      case NodeKind::Active: ++r.active; break;
      case NodeKind::Fixed: ++r.fixed; break;
      default: ++r.outside; break;
    }
    if (kind_[idx] != NodeKind::Outside) {
      int i, j, k;
      ijk(idx, i, j, k);
      if (i == 0 || j == 0 || k == 0 || i == n(0) - 1 || j == n(1) - 1 || k == n(2) - 1) r.boundary_clear = false;
    }
  }
  for (const auto& c : cuts_)
    for (int d = 0; d < 6; ++d)
      if (c.side[static_cast<std::size_t>(d)] != Side::None) {
        ++r.cut_edges;
        r.min_theta = std::min(r.min_theta, c.theta[static_cast<std::size_t>(d)]);
      }
  r.min_levelset_slope = min_slope_;
  r.ok = r.active > 0 && r.boundary_clear && (r.cut_edges == 0 || min_slope_ > 1e-6);
  return r;
}

double ScalarField::sample(const double* x, bool* clean) const {
  const VoxelDomain& d = *domain;
  int c[3];
  double t[3];
  for (int ax = 0; ax < 3; ++ax) {
    const auto& xs = d.axis(ax);
    auto it = std::upper_bound(xs.begin(), xs.end(), x[ax]);
    int i = static_cast<int>(it - xs.begin()) - 1;
    i = std::clamp(i, 0, static_cast<int>(xs.size()) - 2);
    c[ax] = i;
    t[ax] = std::clamp((x[ax] - xs[static_cast<std::size_t>(i)]) /
                           (xs[static_cast<std::size_t>(i + 1)] - xs[static_cast<std::size_t>(i)]),
                       0.0, 1.0);
  }
  double v = 0.0;
  bool ok = true;
  for (int cc = 0; cc < 8; ++cc) {
    const int a = cc & 1, b = (cc >> 1) & 1, e = (cc >> 2) & 1;
    const std::size_t idx = d.index(c[0] + a, c[1] + b, c[2] + e);
    const double w = (a ? t[0] : 1 - t[0]) * (b ? t[1] : 1 - t[1]) * (e ? t[2] : 1 - t[2]);
    if (w > 0.0 && d.kind(idx) == NodeKind::Outside) ok = false;
    v += w * values[idx];
  }
  if (clean) *clean = ok;
  return v;
}

}  // namespace fincap::pde
