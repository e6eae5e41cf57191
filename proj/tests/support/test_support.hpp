#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "fincap/norms.hpp"
#include "fincap/rng.hpp"

namespace testsupport {

using fincap::geom::Mat;
using fincap::geom::Vec;
using fincap::norms::NormModel;

inline Vec random_vec(fincap::Rng& rng, int n, double scale = 1.0) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * rng.normal();
  return v;
}

inline Vec random_unit(fincap::Rng& rng, int n) {
  Vec v = random_vec(rng, n);
  return v / v.norm();
}

inline Mat random_spd(fincap::Rng& rng, int n, double floor = 0.3) {
  Mat M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = rng.normal();
  return M * M.transpose() / n + floor * Mat::Identity(n, n);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct NamedNorm {
  std::string name;
  NormModel model;
};

/// One instance of every smooth family in dimension n.
inline std::vector<NamedNorm> smooth_families(int n) {
  Mat A = Mat::Identity(n, n);
  for (int i = 0; i < n; ++i) A(i, i) = 1.0 + i;
  A(0, 1) = A(1, 0) = 0.3;
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = 1.0 + 0.5 * i;
  return {
      {"euclidean", NormModel::euclidean(n)},
      {"ellipsoidal", NormModel::ellipsoidal(A)},
      {"pnorm2", NormModel::pnorm(n, 2.0, w)},
      {"reg-p4", NormModel::regularized(NormModel::pnorm(n, 4.0), 0.1)},
      {"reg-p3-weighted", NormModel::regularized(NormModel::pnorm(n, 3.0, w), 0.05)},
      {"reg-ellipsoidal", NormModel::regularized(NormModel::ellipsoidal(A), 0.2)},
  };
}

}  // namespace testsupport
