#include "fincap/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "fincap/error.hpp"
#include "fincap/rng.hpp"

namespace fincap::oracles {

using geom::Mat;

namespace {

// Subdivided icosahedron with faces and vertex adjacency. Kept separate from
// the quadrature helpers on purpose.
struct IcoMesh {
  std::vector<Eigen::Vector3d> v;
  std::vector<std::array<int, 3>> f;
  std::vector<std::vector<int>> adj;
};

IcoMesh build_icomesh(int level) {
  IcoMesh m;
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  m.v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : m.v) p.normalize();
  m.f = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
         {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
         {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      if (auto it = mid.find(key); it != mid.end()) return it->second;
      m.v.push_back((m.v[static_cast<std::size_t>(a)] + m.v[static_cast<std::size_t>(b)]).normalized());
      const int id = static_cast<int>(m.v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& fc : m.f) {
      const int a = midpoint(fc[0], fc[1]), b = midpoint(fc[1], fc[2]), c = midpoint(fc[2], fc[0]);
      next.push_back({fc[0], a, c});
      next.push_back({fc[1], b, a});
      next.push_back({fc[2], c, b});
      next.push_back({a, b, c});
    }
    m.f = std::move(next);
  }
  m.adj.assign(m.v.size(), {});
  for (const auto& fc : m.f)
    for (int e = 0; e < 3; ++e) {
      auto& row = m.adj[static_cast<std::size_t>(fc[e])];
      for (int o : {fc[(e + 1) % 3], fc[(e + 2) % 3]})
        if (std::find(row.begin(), row.end(), o) == row.end()) row.push_back(o);
    }
  return m;
}

}  // namespace

MixedFit mixed_volumes_by_fit(const bodies::ConvexBody& K, const bodies::ConvexBody& L, std::vector<double> lambdas) {
  if (K.dim() != 3 || L.dim() != 3) throw UnsupportedDimension("mixed_volumes_by_fit: N = 3 only");
  if (lambdas.size() < 4) throw InvalidArgument("mixed_volumes_by_fit: need at least 4 lambdas");
  for (double l : lambdas)
    if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidArgument("mixed_volumes_by_fit: lambdas must be >= 0");
  MixedFit out;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto m = static_cast<Eigen::Index>(lambdas.size());
    Mat V(m, 4);
    Vec y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double l = lambdas[static_cast<std::size_t>(i)];
      V(i, 0) = 1.0;
      V(i, 1) = 3.0 * l;
      V(i, 2) = 3.0 * l * l;
      V(i, 3) = l * l * l;
      y(i) = l == 0.0 ? bodies::volume(K) : bodies::volume(bodies::ConvexBody::minkowski_sum({{1.0, K}, {l, L}}));
    }
    Eigen::JacobiSVD<Mat> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    out.condition = s(0) / s(s.size() - 1);
    if (out.condition > 1e8 && attempt == 0) {
      const double lmax = *std::max_element(lambdas.begin(), lambdas.end());
      if (lmax > 0.0)
        for (double& l : lambdas) l *= 1.5 / lmax;
      out.rescaled = true;
      continue;
    }
    const Vec c = svd.solve(y);
    out.vol_k = c(0);
    out.v_lkk = c(1);
    out.v_llk = c(2);
    out.vol_l = c(3);
    break;
  }
  return out;
}

double dual_norm_by_sampling(const std::function<double(const Vec&)>& F, const Vec& x, int refinement_levels) {
  const int n = static_cast<int>(x.size());
  if (x.norm() == 0.0) throw InvalidArgument("dual_norm_by_sampling: x must be nonzero");
  constexpr std::size_t kGlobal = 4096;
  std::vector<Vec> dirs = n == 3 ? geom::fibonacci_sphere(kGlobal) : geom::random_directions(n, kGlobal, 0xD0A1ULL);
  auto q = [&](const Vec& th) { return x.dot(th) / F(th); };
  Vec best = dirs.front();
  double qbest = q(best);
  for (const auto& d : dirs) {
    const double v = q(d);
    if (v > qbest) {
      qbest = v;
      best = d;
    }
  }
  // Zoom windows shrink by 4 per level; the stencil spacing of a level is a
  // third of the next window half-width, so the maximiser stays inside.
  constexpr int kHalf = 6;
  double delta = 2.0 * std::pow(geom::sphere_area(n) / kGlobal, 1.0 / (n - 1));
  for (int level = 0; level < refinement_levels; ++level) {
    const Mat E = geom::tangent_frame(best);
    const int m = n - 1;
    std::vector<int> idx(static_cast<std::size_t>(m), -kHalf);
    Vec center = best;
    while (true) {
      Vec p = center;
      for (int c = 0; c < m; ++c) p += delta * idx[static_cast<std::size_t>(c)] / kHalf * E.col(c);
      p.normalize();
      const double v = q(p);
      if (v > qbest) {
        qbest = v;
        best = p;
      }
      int c = 0;
      while (c < m && ++idx[static_cast<std::size_t>(c)] > kHalf) idx[static_cast<std::size_t>(c++)] = -kHalf;
      if (c == m) break;
    }
    delta /= 4.0;
  }
  return qbest;
}

double dual_norm_by_sampling(const norms::NormModel& model, const Vec& x, int refinement_levels) {
  return dual_norm_by_sampling([&](const Vec& v) { return model.h(v); }, x, refinement_levels);
}

MonteCarloVolume montecarlo_volume(const bodies::ConvexBody& body, std::uint64_t n_points, std::uint64_t seed) {
  if (body.dim() != 3) throw UnsupportedDimension("montecarlo_volume: N = 3 only");
  if (n_points == 0) throw InvalidArgument("montecarlo_volume: need at least one point");
  static const IcoMesh mesh = build_icomesh(6);
  const std::size_t nv = mesh.v.size();
  constexpr std::size_t kCoarse = 162;  // the level-2 vertices come first
  std::vector<double> dir(3 * nv), hv(nv);
  double hmax = 0.0;
  for (std::size_t k = 0; k < nv; ++k) {
    for (int d = 0; d < 3; ++d) dir[3 * k + d] = mesh.v[k](d);
    hv[k] = body.h(Vec(mesh.v[k]));
    hmax = std::max(hmax, std::abs(hv[k]));
  }
  Eigen::Vector3d lo, hi;
  for (int d = 0; d < 3; ++d) {
    Vec e = Vec::Zero(3);
    e(d) = 1.0;
    hi(d) = body.h(e);
    lo(d) = -body.h(Vec(-e));
  }
  const double box = (hi - lo).prod();
  // Polish band: distance from the tabulated polytope to the body is at
  // most ~ R * spacing^2 for this table.
  const double spacing = std::sqrt(4.0 * M_PI / static_cast<double>(nv)) * 1.2;
  const double band = 2.0 * hmax * spacing * spacing;

  auto f_at = [&](const double* x, std::size_t k) {
    return x[0] * dir[3 * k] + x[1] * dir[3 * k + 1] + x[2] * dir[3 * k + 2] - hv[k];
  };
  auto inside = [&](const double* x) {
    std::size_t kb = 0;
    double fb = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < kCoarse; ++k) {
      const double f = f_at(x, k);
      if (f > 0.0) return false;
      if (f > fb) {
        fb = f;
        kb = k;
      }
    }
    while (true) {
      std::size_t next = kb;
      for (int o : mesh.adj[kb]) {
        const double f = f_at(x, static_cast<std::size_t>(o));
        if (f > 0.0) return false;
        if (f > fb) {
          fb = f;
          next = static_cast<std::size_t>(o);
        }
      }
      if (next == kb) break;
      kb = next;
    }
    if (fb < -band) return true;
    // Continuous pattern search of <x, theta> - h(theta) near the boundary.
    const Vec xv = Eigen::Map<const Vec>(x, 3);
    Vec th = mesh.v[kb];
    double best = fb;
    double step = spacing;
    while (step > 1e-7) {
      bool improved = false;
      const Mat E = geom::tangent_frame(th);
      for (int c = 0; c < 2 && !improved; ++c)
        for (double s : {step, -step}) {
          const Vec t2 = (th + s * E.col(c)).normalized();
          const double f = xv.dot(t2) - body.h(t2);
          if (f > 0.0) return false;
          if (f > best) {
            best = f;
            th = t2;
            improved = true;
            break;
          }
        }
      if (!improved) step *= 0.5;
    }
    return true;
  };

  constexpr std::uint64_t kShards = 64;
  std::vector<std::uint64_t> counts(kShards, 0), sizes(kShards, 0);
  std::vector<std::uint64_t> seeds(kShards);
  std::uint64_t state = seed;
  for (auto& s : seeds) s = splitmix64(state);
  for (std::uint64_t s = 0; s < kShards; ++s) sizes[s] = n_points / kShards + (s < n_points % kShards ? 1 : 0);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(kShards); ++s) {
    Rng rng(seeds[static_cast<std::size_t>(s)]);
    std::uint64_t c = 0;
    double x[3];
    for (std::uint64_t i = 0; i < sizes[static_cast<std::size_t>(s)]; ++i) {
      for (int d = 0; d < 3; ++d) x[d] = rng.uniform(lo(d), hi(d));
      c += inside(x) ? 1 : 0;
    }
    counts[static_cast<std::size_t>(s)] = c;
  }
  MonteCarloVolume out;
  for (auto c : counts) out.inside += c;
  out.total = n_points;
  const double p = static_cast<double>(out.inside) / static_cast<double>(n_points);
  out.estimate = box * p;
  out.stderr_ = box * std::sqrt(p * (1.0 - p) / static_cast<double>(n_points));
  return out;
}

double mesh_surface_integral(const std::function<double(const Vec&)>& phi, const Vec& center, double r_max,
                             const std::function<double(const Vec&)>& F, int level) {
  if (center.size() != 3) throw UnsupportedDimension("mesh_surface_integral: N = 3 only");
  if (phi(center) >= 0.0) throw InvalidArgument("mesh_surface_integral: center must be inside");
  const IcoMesh mesh = build_icomesh(level);
  std::vector<Eigen::Vector3d> pts(mesh.v.size());
  const Eigen::Vector3d c = center;
  for (std::size_t k = 0; k < mesh.v.size(); ++k) {
    double a = 0.0, b = r_max;
    if (phi(Vec(c + b * mesh.v[k])) <= 0.0) throw InvalidArgument("mesh_surface_integral: r_max too small");
    for (int it = 0; it < 80; ++it) {
      const double m = 0.5 * (a + b);
      (phi(Vec(c + m * mesh.v[k])) < 0.0 ? a : b) = m;
    }
    pts[k] = c + 0.5 * (a + b) * mesh.v[k];
  }
  std::vector<double> terms(mesh.f.size());
  for (std::size_t t = 0; t < mesh.f.size(); ++t) {
    const auto& fc = mesh.f[t];
    const Eigen::Vector3d& p0 = pts[static_cast<std::size_t>(fc[0])];
    Eigen::Vector3d a = 0.5 * (pts[static_cast<std::size_t>(fc[1])] - p0).cross(pts[static_cast<std::size_t>(fc[2])] - p0);
    const Eigen::Vector3d centroid = (p0 + pts[static_cast<std::size_t>(fc[1])] + pts[static_cast<std::size_t>(fc[2])]) / 3.0;
    if (a.dot(centroid - c) < 0.0) a = -a;
    const double area = a.norm();
    terms[t] = area > 0.0 ? area * F(Vec(a / area)) : 0.0;
  }
  double s = 0.0;
  for (double v : terms) s += v;
  return s;
}

}  // namespace fincap::oracles
