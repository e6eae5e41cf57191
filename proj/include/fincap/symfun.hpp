#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace fincap::symfun {

using Mat = Eigen::MatrixXd;

/// A square matrix, optionally with a factorization A = B C (B symmetric
/// positive semidefinite, C symmetric).
struct MatrixFn {
  Mat A;
  std::optional<Mat> B;
  std::optional<Mat> C;

  static MatrixFn plain(Mat a);
  /// Builds A = B C; throws InvalidArgument if B or C is not symmetric or
  /// B is not positive semidefinite.
  static MatrixFn factored(const Mat& b, const Mat& c);
  /// |BC - A|_inf <= 1e-12 |A|_inf (true when no factorization is stored).
  bool factorization_consistent() const;
};

/// Sum of all k x k principal minors. Uses the minor sum for n <= 8 and
/// characteristic-polynomial coefficients above that.
double s_k(const Mat& A, int k);
double s_k_minors(const Mat& A, int k);
double s_k_charpoly(const Mat& A, int k);
/// S_2 = (tr(A)^2 - tr(A^2)) / 2.
double s2(const Mat& A);

/// Matrix of partial derivatives dS_k / da_ij.
Mat s_k_cofactor(const Mat& A, int k);

/// d/dt det(A + t B) at t = 0.
double det_directional(const Mat& A, const Mat& B);

struct NewtonReport {
  int n = 0;
  double lhs = 0.0;     // S_2(BC)
  double bound = 0.0;   // (n-1)/(2n) tr(BC)^2
  double slack = 0.0;   // bound - lhs
  double trace = 0.0;
  bool violation = false;  // slack < -1e-10 max(1, bound)
  bool equality = false;   // |slack| <= 1e-10 max(1, bound)
  double identity_residual = 0.0;  // |A - tr(A)/n Id|_inf
  double lambda_min_b = 0.0;
  /// Equality implies A = (tr A / n) Id and B positive definite; only
  /// meaningful when equality is set and tr(A) != 0.
  bool rigidity_holds = true;
};

/// Generalized Newton inequality S_2(BC) <= (n-1)/(2n) tr(BC)^2 for B
/// symmetric psd and C symmetric.
NewtonReport newton_check(const Mat& B, const Mat& C);

struct NewtonSweep {
  int n = 0;
  int trials = 0;
  int violations = 0;
  double min_relative_slack = 0.0;  // min slack / max(1, bound)
  bool equality_flagged = true;     // every B = Id, C = lambda Id case
  double equality_identity_residual = 0.0;
};

/// Seeded sweep per n in [n_lo, n_hi]: `trials` pairs with B = M M^T (M of
/// random rank 1..n) and C symmetric Gaussian, plus 20 equality cases.
std::vector<NewtonSweep> newton_sweep(int n_lo, int n_hi, int trials, std::uint64_t seed);

}  // namespace fincap::symfun
