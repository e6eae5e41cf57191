#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fincap/bodies.hpp"
#include "fincap/norms.hpp"

namespace fincap::oracles {

using geom::Vec;

/// Coefficients of |K + lambda L| = |K| + 3 lambda V(L,K,K) + 3 lambda^2 V(L,L,K) + lambda^3 |L|
/// fitted from volumes of Minkowski combinations (N = 3).
struct MixedFit {
  double v_lkk = 0.0;
  double v_llk = 0.0;
  double vol_k = 0.0;
  double vol_l = 0.0;
  double condition = 0.0;  // of the final Vandermonde system
  bool rescaled = false;   // lambdas were rescaled after an ill-conditioned fit
};

MixedFit mixed_volumes_by_fit(const bodies::ConvexBody& K, const bodies::ConvexBody& L,
                              std::vector<double> lambdas);

/// sup <x, xi> / F(xi) over a global direction set followed by
/// `refinement_levels` nested local zooms around the incumbent; the
/// incumbent is kept, so values never decrease with the level.
double dual_norm_by_sampling(const std::function<double(const Vec&)>& F, const Vec& x, int refinement_levels);
double dual_norm_by_sampling(const norms::NormModel& model, const Vec& x, int refinement_levels);

struct MonteCarloVolume {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::uint64_t inside = 0;
  std::uint64_t total = 0;
};

/// Hit-or-miss volume in the support-function bounding box. Membership
/// is x in Omega iff <x, theta> <= h(theta) for all directions, tested on a
/// tabulated icosphere (level 6) with a continuous polish near the boundary.
/// Points come from fixed per-shard seeds and shards merge in order. N = 3.
MonteCarloVolume montecarlo_volume(const bodies::ConvexBody& body, std::uint64_t n_points, std::uint64_t seed);

/// Surface integral of F(n) over a triangulation of the zero level set of
/// phi (negative inside), built by ray bisection from center along
/// icosphere vertices of the given subdivision level. N = 3.
double mesh_surface_integral(const std::function<double(const Vec&)>& phi, const Vec& center, double r_max,
                             const std::function<double(const Vec&)>& F, int level);

}  // namespace fincap::oracles
