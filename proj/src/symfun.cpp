#include "fincap/symfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fincap/error.hpp"
#include "fincap/rng.hpp"

namespace fincap::symfun {

namespace {

void require_square(const Mat& A, int k) {
  if (A.rows() != A.cols() || A.rows() == 0) throw InvalidArgument("S_k: matrix must be square and non-empty");
  if (k < 1 || k > A.rows()) throw InvalidArgument("S_k: k out of range");
}

double inf_norm(const Mat& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

bool symmetric(const Mat& M) {
  return M.rows() == M.cols() && inf_norm(M - M.transpose()) <= 1e-12 * std::max(1.0, inf_norm(M));
}

double s_j_or_one(const Mat& A, int j) { return j == 0 ? 1.0 : s_k(A, j); }

}  // namespace

MatrixFn MatrixFn::plain(Mat a) {
  if (a.rows() != a.cols()) throw InvalidArgument("MatrixFn: matrix must be square");
  return MatrixFn{std::move(a), std::nullopt, std::nullopt};
}

MatrixFn MatrixFn::factored(const Mat& b, const Mat& c) {
  if (b.rows() != c.rows() || b.cols() != c.cols() || b.rows() != b.cols())
    throw InvalidArgument("MatrixFn: factors must be square and of equal size");
  if (!symmetric(b) || !symmetric(c)) throw InvalidArgument("MatrixFn: factors must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(b, Eigen::EigenvaluesOnly);
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  if (es.eigenvalues().minCoeff() < -1e-12 * scale) throw InvalidArgument("MatrixFn: B is not positive semidefinite");
  return MatrixFn{b * c, b, c};
}

bool MatrixFn::factorization_consistent() const {
  if (!B || !C) return true;
  return inf_norm((*B) * (*C) - A) <= 1e-12 * inf_norm(A);
}

double s_k_minors(const Mat& A, int k) {
  require_square(A, k);
  const int n = static_cast<int>(A.rows());
  if (n > 20) throw InvalidArgument("S_k: minor enumeration limited to n <= 20");
  double sum = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(k));
  Mat sub(k, k);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    int c = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx[static_cast<std::size_t>(c++)] = i;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sub(i, j) = A(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    sum += k == 1 ? sub(0, 0) : sub.partialPivLu().determinant();
  }
  return sum;
}

double s_k_charpoly(const Mat& A, int k) {
  require_square(A, k);
  const int n = static_cast<int>(A.rows());
  // Faddeev-LeVerrier: det(lambda I - A) = sum_j c_j lambda^j, c_n = 1,
  // and S_k = (-1)^k c_{n-k}.
  Mat M = Mat::Zero(n, n);
  const Mat I = Mat::Identity(n, n);
  double c_prev = 1.0;
  double c = 1.0;
  for (int j = 1; j <= k; ++j) {
    M = A * M + c_prev * I;
    c = -(A * M).trace() / j;
    c_prev = c;
  }
  return (k % 2 == 0 ? 1.0 : -1.0) * c;
}

double s_k(const Mat& A, int k) {
  require_square(A, k);
  if (k == 1) return A.trace();
  if (k == 2) return s2(A);
  if (k == A.rows()) return A.partialPivLu().determinant();
  return A.rows() <= 8 ? s_k_minors(A, k) : s_k_charpoly(A, k);
}

double s2(const Mat& A) {
  require_square(A, std::min<int>(2, static_cast<int>(A.rows())));
  const double t = A.trace();
  // tr(A^2) = sum_ij a_ij a_ji
  const double t2 = A.cwiseProduct(A.transpose()).sum();
  return 0.5 * (t * t - t2);
}

Mat s_k_cofactor(const Mat& A, int k) {
  require_square(A, k);
  const int n = static_cast<int>(A.rows());
  // dS_k/dA = sum_{j=0}^{k-1} (-1)^j S_{k-1-j}(A) (A^j)^T
  Mat out = Mat::Zero(n, n);
  Mat Aj = Mat::Identity(n, n);
  for (int j = 0; j < k; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    out += sign * s_j_or_one(A, k - 1 - j) * Aj.transpose();
    Aj = Aj * A;
  }
  return out;
}

double det_directional(const Mat& A, const Mat& B) {
  if (A.rows() != A.cols() || A.rows() != B.rows() || A.cols() != B.cols())
    throw InvalidArgument("det_directional: matrices must be square and of equal size");
  return s_k_cofactor(A, static_cast<int>(A.rows())).cwiseProduct(B).sum();
}

NewtonReport newton_check(const Mat& B, const Mat& C) {
  if (B.rows() != B.cols() || C.rows() != C.cols() || B.rows() != C.rows() || B.rows() == 0)
    throw InvalidArgument("newton_check: B and C must be square and of equal size");
  if (!symmetric(B)) throw InvalidArgument("newton_check: B must be symmetric");
  if (!symmetric(C)) throw InvalidArgument("newton_check: C must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (B + B.transpose()), Eigen::EigenvaluesOnly);
  const double bnorm = es.eigenvalues().cwiseAbs().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin < -1e-12 * bnorm) throw InvalidArgument("newton_check: B must be positive semidefinite");

  NewtonReport r;
  const int n = static_cast<int>(B.rows());
  const Mat A = B * C;
  r.n = n;
  r.trace = A.trace();
  r.lhs = n >= 2 ? s2(A) : 0.0;
  r.bound = (n - 1.0) / (2.0 * n) * r.trace * r.trace;
  r.slack = r.bound - r.lhs;
  const double tol = 1e-10 * std::max(1.0, r.bound);
  r.violation = r.slack < -tol;
  r.equality = std::abs(r.slack) <= tol;
  r.identity_residual = inf_norm(A - (r.trace / n) * Mat::Identity(n, n));
  r.lambda_min_b = lmin;
  if (r.equality && r.trace != 0.0) {
    const double tol_eq = 1e-4 * std::max(1.0, std::abs(r.trace));
    r.rigidity_holds = r.identity_residual <= tol_eq && lmin > 0.0;
  }
  return r;
}

std::vector<NewtonSweep> newton_sweep(int n_lo, int n_hi, int trials, std::uint64_t seed) {
  if (n_lo < 1 || n_hi < n_lo || trials < 0) throw InvalidArgument("newton_sweep: bad range");
  Rng rng(seed);
  std::vector<NewtonSweep> out;
  for (int n = n_lo; n <= n_hi; ++n) {
    NewtonSweep sw;
    sw.n = n;
    sw.trials = trials;
    sw.min_relative_slack = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
      const int rank = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
      Mat M(n, rank), G(n, n);
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < rank; ++k) M(i, k) = rng.normal();
        for (int j = 0; j < n; ++j) G(i, j) = rng.normal();
      }
      const auto r = newton_check(M * M.transpose(), 0.5 * (G + G.transpose()));
      sw.violations += r.violation;
      sw.min_relative_slack = std::min(sw.min_relative_slack, r.slack / std::max(1.0, r.bound));
    }
    for (int t = 0; t < 20; ++t) {
      const double lam = rng.uniform(-5.0, 5.0);
      const auto r = newton_check(Mat::Identity(n, n), lam * Mat::Identity(n, n));
      sw.equality_flagged = sw.equality_flagged && r.equality && r.rigidity_holds;
      sw.equality_identity_residual = std::max(sw.equality_identity_residual, r.identity_residual);
    }
    out.push_back(sw);
  }
  return out;
}

}  // namespace fincap::symfun
