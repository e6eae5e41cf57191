#include "fincap/sphere.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "fincap/error.hpp"
#include "fincap/rng.hpp"

namespace fincap::geom {

double sphere_area(int dim) {
  return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw InvalidArgument("gauss_legendre: order must be positive");
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(n - 1 - i)] = wi;
  }
}

void gauss_gegenbauer(int n, double lambda, std::vector<double>& x, std::vector<double>& w) {
  if (lambda == 0.0) {
    gauss_legendre(n, x, w);
    return;
  }
  if (n < 1 || lambda <= -1.0) throw InvalidArgument("gauss_gegenbauer: bad parameters");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double a = lambda;
    const double b2 = k * (k + 2.0 * a) / ((2.0 * k + 2.0 * a + 1.0) * (2.0 * k + 2.0 * a - 1.0));
    J(k, k - 1) = J(k - 1, k) = std::sqrt(b2);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::sqrt(M_PI) * std::tgamma(lambda + 1.0) / std::tgamma(lambda + 1.5);
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    w[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
}

SphereGrid SphereGrid::product(int dim, int n_pol, int n_az) {
  if (dim < 2) throw InvalidArgument("SphereGrid: dimension must be >= 2");
  if (n_az < 1 || (dim > 2 && n_pol < 1)) throw InvalidArgument("SphereGrid: orders must be positive");
  SphereGrid g;
  g.dim_ = dim;
  g.n_pol_ = dim > 2 ? n_pol : 0;
  g.n_az_ = n_az;
  const double dphi = 2.0 * M_PI / n_az;

  if (dim == 2) {
    for (int k = 0; k < n_az; ++k) {
      const double phi = k * dphi;
      g.nodes_.push_back(std::cos(phi));
      g.nodes_.push_back(std::sin(phi));
      g.weights_.push_back(dphi);
    }
    return g;
  }

  if (dim == 3) {
    std::vector<double> t, wt;
    gauss_legendre(n_pol, t, wt);
    for (int i = 0; i < n_pol; ++i) {
      const double ct = t[static_cast<std::size_t>(i)];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int k = 0; k < n_az; ++k) {
        const double phi = k * dphi;
        g.nodes_.push_back(st * std::cos(phi));
        g.nodes_.push_back(st * std::sin(phi));
        g.nodes_.push_back(ct);
        g.weights_.push_back(wt[static_cast<std::size_t>(i)] * dphi);
      }
    }
    return g;
  }

  // Hyperspherical angles theta_1..theta_{N-2} in [0, pi], Jacobian
  // sin^{N-1-j}(theta_j); the last angle is the azimuth.
  const int nang = dim - 2;
  std::vector<std::vector<double>> tx(static_cast<std::size_t>(nang)), tw(static_cast<std::size_t>(nang));
  for (int j = 0; j < nang; ++j) {
    const int m = dim - 2 - j;  // sin exponent for angle j (0-based)
    gauss_gegenbauer(n_pol, 0.5 * (m - 1), tx[static_cast<std::size_t>(j)], tw[static_cast<std::size_t>(j)]);
  }
  std::vector<int> idx(static_cast<std::size_t>(nang), 0);
  while (true) {
    double weight = 1.0;
    double sprod = 1.0;
    std::vector<double> p(static_cast<std::size_t>(dim));
    for (int j = 0; j < nang; ++j) {
      const double c = tx[static_cast<std::size_t>(j)][static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
      weight *= tw[static_cast<std::size_t>(j)][static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
      p[static_cast<std::size_t>(j)] = sprod * c;
      sprod *= std::sqrt(std::max(0.0, 1.0 - c * c));
    }
    for (int k = 0; k < n_az; ++k) {
      const double phi = k * dphi;
      for (int j = 0; j < nang; ++j) g.nodes_.push_back(p[static_cast<std::size_t>(j)]);
      g.nodes_.push_back(sprod * std::cos(phi));
      g.nodes_.push_back(sprod * std::sin(phi));
      g.weights_.push_back(weight * dphi);
    }
    int j = nang - 1;
    while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == n_pol) {
      idx[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return g;
}

SphereGrid SphereGrid::from_points(int dim, std::vector<double> nodes, std::vector<double> weights) {
  if (dim < 2) throw InvalidArgument("SphereGrid: dimension must be >= 2");
  if (nodes.size() != weights.size() * static_cast<std::size_t>(dim))
    throw InvalidArgument("SphereGrid: nodes/weights size mismatch");
  SphereGrid g;
  g.dim_ = dim;
  g.nodes_ = std::move(nodes);
  g.weights_ = std::move(weights);
  for (std::size_t k = 0; k < g.weights_.size(); ++k) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) r2 += g.nodes_[k * dim + d] * g.nodes_[k * dim + d];
    const double r = std::sqrt(r2);
    if (!(r > 0.0)) throw InvalidArgument("SphereGrid: zero direction");
    for (int d = 0; d < dim; ++d) g.nodes_[k * dim + d] /= r;
  }
  return g;
}

Vec SphereGrid::node_vec(std::size_t k) const {
  auto s = node(k);
  return Eigen::Map<const Vec>(s.data(), dim_);
}

SphereGrid SphereGrid::refined() const {
  if (n_az_ == 0) throw InvalidArgument("SphereGrid::refined: not a product grid");
  return product(dim_, 2 * n_pol_, 2 * n_az_);
}

Mat tangent_frame(const Vec& theta) {
  const int n = static_cast<int>(theta.size());
  Mat E(n, n - 1);
  if (n == 2) {
    E(0, 0) = -theta(1);
    E(1, 0) = theta(0);
    return E;
  }
  if (n == 3) {
    const double rho = std::hypot(theta(0), theta(1));
    if (rho < 1e-14) {
      E.col(0) << 1.0, 0.0, 0.0;
      E.col(1) << 0.0, (theta(2) >= 0.0 ? 1.0 : -1.0), 0.0;
      return E;
    }
    const double cp = theta(0) / rho, sp = theta(1) / rho;
    E.col(0) << theta(2) * cp, theta(2) * sp, -rho;
    E.col(1) << -sp, cp, 0.0;
    return E;
  }
  Vec v = theta;
  v(n - 1) -= 1.0;
  const double vv = v.squaredNorm();
  Mat H = Mat::Identity(n, n);
  if (vv > 1e-28) H -= (2.0 / vv) * v * v.transpose();
  return H.leftCols(n - 1);
}

std::vector<Vec> fibonacci_sphere(std::size_t count) {
  std::vector<Vec> out;
  out.reserve(count);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    Vec v(3);
    v << r * std::cos(phi), r * std::sin(phi), z;
    out.push_back(v);
  }
  return out;
}

std::vector<Vec> icosphere(int level) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
      {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      verts.push_back((verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)]).normalized());
      const int id = static_cast<int>(verts.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces = std::move(next);
  }
  std::vector<Vec> out;
  out.reserve(verts.size());
  for (const auto& v : verts) out.push_back(Vec(v));
  return out;
}

std::vector<Vec> random_directions(int dim, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec> out;
  out.reserve(count);
  while (out.size() < count) {
    Vec v(dim);
    for (int d = 0; d < dim; ++d) v(d) = rng.normal();
    const double r = v.norm();
    if (r > 1e-12) out.push_back(v / r);
  }
  return out;
}

std::vector<Vec> seed_directions(int dim, std::size_t approx_count) {
  if (dim == 3) {
    int level = 0;
    std::size_t n = 12;
    while (n < approx_count && level < 6) {
      ++level;
      n = 10 * (std::size_t{1} << (2 * level)) + 2;
    }
    return icosphere(level);
  }
  if (dim == 2) {
    std::vector<Vec> out;
    for (std::size_t k = 0; k < approx_count; ++k) {
      const double phi = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(approx_count);
      Vec v(2);
      v << std::cos(phi), std::sin(phi);
      out.push_back(v);
    }
    return out;
  }
  return random_directions(dim, approx_count, 0x5EEDULL + static_cast<std::uint64_t>(dim));
}

}  // namespace fincap::geom
