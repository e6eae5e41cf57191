#include <cmath>

#include "doctest.h"
#include "fincap/sphere.hpp"
#include "test_support.hpp"

using namespace fincap::geom;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  std::vector<double> x, w;
  gauss_legendre(6, x, w);
  for (int deg = 0; deg <= 11; ++deg) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], deg);
    const double exact = (deg % 2 == 1) ? 0.0 : 2.0 / (deg + 1);
    CHECK(s == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("gegenbauer rule matches the weight's moments") {
  // int (1-t^2)^lambda t^2 dt = mu0 / (2 lambda + 3)
  for (double lambda : {0.5, 1.0, 1.5}) {
    std::vector<double> x, w;
    gauss_gegenbauer(5, lambda, x, w);
    double m0 = 0.0, m2 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      m0 += w[i];
      m1 += w[i] * x[i];
      m2 += w[i] * x[i] * x[i];
    }
    const double mu0 = std::sqrt(M_PI) * std::tgamma(lambda + 1) / std::tgamma(lambda + 1.5);
    CHECK(m0 == doctest::Approx(mu0).epsilon(1e-13));
    CHECK(std::abs(m1) < 1e-14);
    CHECK(m2 == doctest::Approx(mu0 / (2 * lambda + 3)).epsilon(1e-12));
  }
}

TEST_CASE("product grid weights sum to the sphere area") {
  for (int dim : {2, 3, 4, 5}) {
    const int npol = dim == 2 ? 0 : 8;
    auto g = SphereGrid::product(dim, npol, 16);
    double s = 0.0;
    for (double w : g.weights()) s += w;
    CHECK(s == doctest::Approx(sphere_area(dim)).epsilon(1e-10));
  }
  CHECK(sphere_area(3) == doctest::Approx(4 * M_PI));
}

TEST_CASE("odd moments cancel and second moments equal area/N") {
  for (int dim : {3, 4}) {
    auto g = SphereGrid::product(dim, 10, 20);
    Vec first = Vec::Zero(dim);
    Mat second = Mat::Zero(dim, dim);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Vec t = g.node_vec(k);
      CHECK(t.norm() == doctest::Approx(1.0).epsilon(1e-14));
      first += g.weight(k) * t;
      second += g.weight(k) * t * t.transpose();
    }
    CHECK(first.norm() < 1e-12);
    const Mat expect = Mat::Identity(dim, dim) * sphere_area(dim) / dim;
    CHECK((second - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("refined grid doubles both orders") {
  auto g = SphereGrid::product(3, 8, 16).refined();
  CHECK(g.n_pol() == 16);
  CHECK(g.n_az() == 32);
  CHECK(g.size() == 512u);
}

TEST_CASE("tangent frames are orthonormal and orthogonal to theta, poles included") {
  fincap::Rng rng(3);
  for (int dim : {2, 3, 4, 6}) {
    std::vector<Vec> dirs;
    for (int k = 0; k < 50; ++k) dirs.push_back(testsupport::random_unit(rng, dim));
    Vec e = Vec::Zero(dim);
    e(dim - 1) = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
    for (const auto& t : dirs) {
      const Mat E = tangent_frame(t);
      CHECK((E.transpose() * E - Mat::Identity(dim - 1, dim - 1)).cwiseAbs().maxCoeff() < 1e-13);
      CHECK((E.transpose() * t).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("direction sets") {
  CHECK(icosphere(0).size() == 12u);
  CHECK(icosphere(2).size() == 162u);
  for (const auto& v : icosphere(2)) CHECK(v.norm() == doctest::Approx(1.0));
  auto fib = fibonacci_sphere(100);
  Vec c = Vec::Zero(3);
  for (const auto& v : fib) c += v;
  CHECK(c.norm() / 100 < 0.02);
  auto r1 = random_directions(5, 10, 42), r2 = random_directions(5, 10, 42);
  for (std::size_t i = 0; i < 10; ++i) CHECK(r1[i] == r2[i]);
}
