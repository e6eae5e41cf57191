#pragma once

#include <algorithm>
#include <cmath>

#include "fincap/pde.hpp"

namespace fincap::pde::detail {

// One corner term of the energy: node `node` of cell (i, j, k) at local
// position (a, b, c). For each axis the corner gradient uses the cell edge
// leaving the node; when that edge leaves the region the far end is the
// cut point, carrying the boundary value of `cut_side`, and the component
// is scaled by sqrt(2 theta): for the Euclidean norm this is the symmetric
// cut-edge stencil, whose edge energy is (du / (theta h))^2 theta h^3 / 2.
struct Corner {
  std::size_t node = 0;
  std::size_t nb[3] = {0, 0, 0};
  bool has_nb[3] = {false, false, false};
  Side cut_side[3] = {Side::None, Side::None, Side::None};
  double len[3] = {0, 0, 0};
  double sgn[3] = {0, 0, 0};
  double scale[3] = {1, 1, 1};
  double weight = 0.0;
};

inline bool corner_geometry(const VoxelDomain& d, int i, int j, int k, int a, int b, int c, Corner& out) {
  const int p[3] = {i + a, j + b, k + c};
  const int loc[3] = {a, b, c};
  const int cell[3] = {i, j, k};
  out.node = d.index(p[0], p[1], p[2]);
  if (d.kind(out.node) == NodeKind::Outside) return false;
  const CutRecord* cut = d.cut(out.node);
  double vol = 1.0;
  for (int ax = 0; ax < 3; ++ax) {
    const auto& x = d.axis(ax);
    const double h = x[static_cast<std::size_t>(cell[ax] + 1)] - x[static_cast<std::size_t>(cell[ax])];
    vol *= h;
    int q[3] = {p[0], p[1], p[2]};
    q[ax] = cell[ax] + 1 - loc[ax];
    out.sgn[ax] = loc[ax] == 0 ? 1.0 : -1.0;
    const std::size_t m = d.index(q[0], q[1], q[2]);
    if (d.kind(m) != NodeKind::Outside) {
      out.nb[ax] = m;
      out.has_nb[ax] = true;
      out.cut_side[ax] = Side::None;
      out.len[ax] = h;
      out.scale[ax] = 1.0;
    } else {
      const int dir = 2 * ax + (loc[ax] == 0 ? 1 : 0);
      const double theta = std::max(cut->theta[static_cast<std::size_t>(dir)], 1e-12);
      out.has_nb[ax] = false;
      out.cut_side[ax] = cut->side[static_cast<std::size_t>(dir)];
      out.len[ax] = theta * h;
      out.scale[ax] = std::sqrt(2.0 * theta);
    }
  }
  out.weight = vol / 8.0;
  return true;
}

// Central-difference weights on a nonuniform axis around node i:
// first derivative (w1) and second derivative (w2) for nodes i-1, i, i+1.
inline void fd_weights(const std::vector<double>& x, int i, double w1[3], double w2[3]) {
  const double hm = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i - 1)];
  const double hp = x[static_cast<std::size_t>(i + 1)] - x[static_cast<std::size_t>(i)];
  w1[0] = -hp / (hm * (hm + hp));
  w1[1] = (hp - hm) / (hm * hp);
  w1[2] = hm / (hp * (hm + hp));
  w2[0] = 2.0 / (hm * (hm + hp));
  w2[1] = -2.0 / (hm * hp);
  w2[2] = 2.0 / (hp * (hm + hp));
}

}  // namespace fincap::pde::detail
