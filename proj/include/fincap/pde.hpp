#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fincap/bodies.hpp"
#include "fincap/norms.hpp"

namespace fincap::pde {

using bodies::ConvexBody;
using geom::Mat;
using geom::Vec;
using norms::NormModel;

/// Level-set function of a point in R^3.
using LevelSet = std::function<double(const double*)>;

std::vector<double> uniform_axis(int n, double lo, double hi);
/// n nodes on [lo, hi]: uniform spacing on [core_lo, core_hi] and
/// geometrically growing cells (ratio at most max_growth) outside it.
/// The core spacing is as small as the node budget allows.
std::vector<double> graded_axis(int n, double lo, double hi, double core_lo, double core_hi,
                                double max_growth = 1.2);

enum class NodeKind : std::uint8_t { Outside, Active, Fixed };
/// Which Dirichlet boundary a node or a cut edge belongs to.
enum class Side : std::uint8_t { None = 0, Inner = 1, Outer = 2 };

/// Cut fractions for the six edges of a node next to the boundary, in the
/// order -x, +x, -y, +y, -z, +z. theta = 1 means the edge is not cut.
struct CutRecord {
  std::array<double, 6> theta{1, 1, 1, 1, 1, 1};
  std::array<Side, 6> side{};
};

struct DomainReport {
  std::size_t active = 0, fixed = 0, outside = 0, cut_edges = 0;
  double min_theta = 1.0;
  double min_levelset_slope = 0.0;  // min |grad phi| at the cut points
  bool boundary_clear = true;       // no solution node on the box faces
  bool ok = false;
};

/// Rectilinear 3-D grid carrying the solution region
/// {phi_in > 0 (when given), phi_out < 0}. Nodes outside the region hold
/// the boundary value of the side they lie on. Region nodes with an edge
/// leaving the region get cut fractions found by bisection; nodes whose
/// cut fraction falls under `snap` become Dirichlet nodes themselves.
class VoxelDomain {
 public:
  VoxelDomain(std::array<std::vector<double>, 3> axes, LevelSet phi_in, LevelSet phi_out, double snap = 0.01);

  int n(int axis) const { return static_cast<int>(axes_[static_cast<std::size_t>(axis)].size()); }
  std::size_t size() const { return kind_.size(); }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n(0)) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(n(1)) * k);
  }
  const std::vector<double>& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
  std::array<double, 3> point(std::size_t idx) const;
  void ijk(std::size_t idx, int& i, int& j, int& k) const;
  /// Smallest cell edge.
  double min_spacing() const { return min_spacing_; }

  NodeKind kind(std::size_t idx) const { return kind_[idx]; }
  Side side(std::size_t idx) const { return side_[idx]; }
  /// Cut record of a region node, or null when none of its edges is cut.
  const CutRecord* cut(std::size_t idx) const {
    const auto c = cut_index_[idx];
    return c < 0 ? nullptr : &cuts_[static_cast<std::size_t>(c)];
  }
  bool has_inner() const { return static_cast<bool>(phi_in_); }
  const LevelSet& phi_in() const { return phi_in_; }
  const LevelSet& phi_out() const { return phi_out_; }

  /// Diagonal of the Euclidean stiffness matrix (Jacobi preconditioner).
  const std::vector<double>& stiffness_diagonal() const { return diag_; }
  /// Lumped nodal volumes of the region.
  const std::vector<double>& nodal_volume() const { return mass_; }

  DomainReport report() const;

 private:
  std::array<std::vector<double>, 3> axes_;
  LevelSet phi_in_, phi_out_;
  double min_spacing_ = 0.0;
  std::vector<NodeKind> kind_;
  std::vector<Side> side_;
  std::vector<std::int32_t> cut_index_;
  std::vector<CutRecord> cuts_;
  std::vector<double> diag_, mass_;
  double min_slope_ = 0.0;
};

struct FieldMeta {
  std::string problem;
  std::string norm;
  std::string body;
  double bc_inner = 0.0;
  double bc_outer = 0.0;
  double source = 0.0;  // f in the energy sum V(Du) + f u
};

/// Nodal values on a VoxelDomain, x fastest. Nodes outside the region hold
/// the boundary value of their side.
struct ScalarField {
  std::shared_ptr<const VoxelDomain> domain;
  std::vector<double> values;
  FieldMeta meta;

  double boundary_value(Side s) const { return s == Side::Inner ? meta.bc_inner : meta.bc_outer; }
  /// Trilinear interpolation; `clean` is cleared when a stencil node lies
  /// outside the solution region.
  double sample(const double* x, bool* clean = nullptr) const;
};

/// Discrete energy sum_cells sum_corners w V(D_c u) + sum_nodes m f u, with
/// V = H^2/2 and D_c the one-sided gradient at a cell corner. Cut edges use
/// the boundary value at the cut point, with that gradient component scaled
/// by sqrt(2 theta).
double energy(const ScalarField& field, const NormModel& model);
/// Exact differential of energy(); zero at non-active nodes.
ScalarField energy_gradient(const ScalarField& field, const NormModel& model);

namespace kernels {

struct Problem {
  const VoxelDomain* domain = nullptr;
  const NormModel* model = nullptr;
  double bc[3] = {0.0, 0.0, 0.0};  // indexed by Side
  double source = 0.0;
  double grad_floor = 0.0;         // |D_c u| below this skips the norm
};

/// Reference implementation: one pass over cells in storage order.
double energy_gradient_serial(const Problem& p, const double* u, double* grad);
/// Eight-colour cell passes (cells of one colour share no node), parallel
/// within a colour; cell energies are reduced in a fixed order.
double energy_gradient_parallel(const Problem& p, const double* u, double* grad);

}  // namespace kernels

struct SolverOptions {
  int max_iters = 20000;
  double tol_g = 0.0;            // sup-norm gradient tolerance; 0 means 1e-9 * scale
  double rel_decrement = 1e-12;  // over `window` iterations
  int window = 10;
  bool parallel = true;
  /// Starting values at active nodes; empty means a blend of the two level sets.
  std::function<double(const double*)> initial_guess;
};

struct SolveStats {
  int iterations = 0;
  int evaluations = 0;
  double energy = 0.0;
  double final_grad = 0.0;
  double tol_g = 0.0;
  std::string stop_reason;
  std::vector<double> history;  // gradient sup-norm per iteration
  double max_principle_violation = 0.0;
};

/// Minimiser of the discrete energy with u = bc_inner on the inner boundary
/// and bc_outer on the outer one (Jacobi-preconditioned nonlinear
/// conjugate gradients, Polak-Ribiere+). Norms that are not uniformly
/// convex are replaced by their regularized version.
ScalarField solve_dirichlet(std::shared_ptr<const VoxelDomain> domain, const NormModel& model, double bc_inner,
                            double bc_outer, const SolverOptions& opts = {}, SolveStats* stats = nullptr);

/// Grid over the box holding B_{H_0}(center, r_out), refined around the body.
std::shared_ptr<VoxelDomain> exterior_domain(const ConvexBody& body, const NormModel& model, double r_out,
                                             double r_trunc, int n, double max_growth = 1.2);

struct ExteriorOptions {
  int grid = 96;
  /// Truncation radii in H_0 about the body center; empty means
  /// {4 R1, 8 R1} with R1 the outer H_0 extent of the body.
  std::vector<double> r_out;
  SolverOptions solver;
  double max_growth = 1.2;
};

struct ExteriorResult {
  ScalarField field;         // solution for the largest radius
  ScalarField extrapolated;  // u + m s (1 - u), s = R^{2-N}
  std::vector<double> r_out;
  std::vector<double> capacity;  // int H(Du)^2 per radius
  double cap_extrapolated = 0.0;
  double far_constant = 0.0;     // m in u ~ m H_0^{2-N}
  double monotonicity_violation = 0.0;
  double r_inner = 0.0, r_outer = 0.0;  // H_0 extent of the body
  std::vector<SolveStats> stats;
};

/// Truncated exterior problems u = 1 on the body, u = 0 on
/// {H_0(x - c) = R}, all on the grid built for the largest R so the
/// solutions can be compared node by node. 1/Cap_R is linear in R^{2-N};
/// two or more radii give the extrapolated capacity and field.
ExteriorResult solve_exterior_capacity(const ConvexBody& body, const NormModel& model,
                                       const ExteriorOptions& opts = {});

struct FluxSamples {
  std::vector<Vec> points;
  std::vector<double> values;   // H(Du)
  std::vector<double> weights;  // surface measure
  std::vector<double> normal_h; // H(nu)
  std::vector<bool> degraded;
  std::size_t degraded_count = 0;
  double mean = 0.0, stddev = 0.0, cv = 0.0, min = 0.0, max = 0.0;
};

/// H(Du) on the body boundary from a one-sided second-order difference
/// along the normal into the solution region (outward for exterior
/// problems). Area-weighted statistics.
FluxSamples boundary_flux(const ScalarField& field, const NormModel& model, const ConvexBody& body,
                          bool exterior = true, int n_pol = 32);

struct TorsionOptions {
  int grid = 96;
  SolverOptions solver;
};

/// psi with Delta_H psi = 1 in the body and psi = 0 on its boundary
/// (minimiser of sum V(D psi) + psi); psi < 0 inside.
ScalarField solve_torsion(const ConvexBody& body, const NormModel& model, const TorsionOptions& opts = {},
                          SolveStats* stats = nullptr);

/// Second-order central differences at nodes whose 27-point neighbourhood
/// lies in the region; other nodes are NaN.
struct Derivatives {
  bool ok = false;
  double du[3];
  double d2u[9];
};
Derivatives node_derivatives(const ScalarField& field, int i, int j, int k);

struct LaplacianResult {
  ScalarField value;  // NaN where not evaluated
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // stencil or gradient floor
};

/// Delta_H u = tr(hess V(Du) D^2 u) at interior nodes.
LaplacianResult finsler_laplacian_apply(const ScalarField& field, const NormModel& model);

struct DecompositionReport {
  std::size_t nodes = 0, skipped = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double max_laplacian = 0.0;  // scale of the terms
};

/// Delta_H u - [M_H H(Du) + H_i H_j u_ij] at nodes within one cell of
/// {u = level}, with M_H = div(grad H(Du)) taken by central differences of
/// the nodal field grad H(Du) (curvature for the normal Du/|Du|).
DecompositionReport curvature_decomposition_check(const ScalarField& field, const NormModel& model, double level);

struct DecayReport {
  std::size_t samples = 0;
  double a_min = 0.0, a_max = 0.0;  // u H_0^{N-2}
  double b_min = 0.0, b_max = 0.0;  // H(Du) H_0^{N-1}
  double a_ratio() const { return a_min > 0 ? a_max / a_min : 0.0; }
  double b_ratio() const { return b_min > 0 ? b_max / b_min : 0.0; }
};

/// Brackets over nodes with r_lo <= H_0(x - center) <= r_hi.
DecayReport decay_brackets(const ScalarField& field, const NormModel& model, const Vec& center, double r_lo,
                           double r_hi);

/// Quantities of the auxiliary function v = u^{-2/(N-2)} for an exterior
/// capacity potential u: W = hess V(Dv) D^2 v, S_2(W), gamma = tr W / N
/// against V(Dv)/v, and near the boundary
/// S^2_ij(W) V_i(Dv) v_j - H(Dv)^3 M_H. Reported, not asserted.
struct AuxiliaryDiagnostics {
  std::size_t nodes = 0;
  double s2_min = 0.0;                 // S_2(W) should be >= 0
  double gamma_mean = 0.0;
  double gamma_spread = 0.0;           // (max - min) / mean of gamma
  double gamma_vs_potential = 0.0;     // max |gamma - V(Dv)/v| / mean gamma
  double w_isotropy = 0.0;             // max |W - gamma Id| / gamma
  std::size_t boundary_nodes = 0;
  double boundary_identity = 0.0;      // max relative residual near the boundary
};

AuxiliaryDiagnostics auxiliary_diagnostics(const ScalarField& u, const NormModel& model, const ConvexBody& body);

}  // namespace fincap::pde
