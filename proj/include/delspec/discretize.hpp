#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <vector>

#include "delspec/grids.hpp"
#include "delspec/problems.hpp"

namespace delspec {

enum class Method { Collocation, WeightedResiduals, PiecewiseCollocation };

struct DiscConfig {
    int M = 0;                   // X-grid index
    int N = 0;                   // X+-grid index
    double h = 1.0;              // step
    double s = 0.0;              // initial time
    Method method = Method::Collocation;
    std::vector<double> pieces;  // breakpoints of [0, h] for PiecewiseCollocation
    int quad_order = 0;          // 0: max(2(N+1), 32) points per smooth panel
};

/// Which one-sided limit to take when an evaluation point sits on a
/// breakpoint (piece interface, or the t=0 kink of the RE state).
enum class Side { Auto, Below, Above };

/// Piecewise nodal basis on a union of adjacent intervals. gidx maps
/// (piece, local node) to the global scalar dof; shared interfaces collapse
/// the two endpoint nodes into one dof, duplicated interfaces keep both.
struct PieceMesh {
    std::vector<NodeSet> pieces;             // ascending intervals
    std::vector<std::vector<int>> gidx;      // per piece: local node -> global dof
    std::vector<double> dof_point;           // global dof -> coordinate
    std::vector<std::pair<int, int>> dof_home;  // global dof -> canonical (piece, node)
    bool shared = false;

    int size() const { return static_cast<int>(dof_point.size()); }
    double lo() const { return pieces.front().a; }
    double hi() const { return pieces.back().b; }
    std::vector<double> interior_breaks() const;

    int piece_of(double x, Side side) const;
    /// Global cardinal row (l_j(x))_j, evaluated in the piece selected by
    /// `side` (ties go to the left piece under Auto).
    Eigen::VectorXd cardinal_row(double x, Side side = Side::Auto) const;
};

PieceMesh single_piece_mesh(NodeSet ns);
/// Per-piece Chebyshev extrema of the given degree; continuous piecewise
/// polynomials (interface values shared).
PieceMesh shared_mesh(const std::vector<double>& breaks, int degree);
/// Per-piece Chebyshev extrema with duplicated interface values.
PieceMesh duplicated_mesh(const std::vector<double>& breaks, int degree);

/// X+ reduction basis on [0, h]: nodal collocation meshes, or the orthonormal
/// Legendre family for the weighted-residuals method.
struct XPlusBasis {
    bool modal = false;
    double h = 1.0;
    PieceMesh mesh;                                 // nodal case
    int legendre_count = 0;                         // modal case: N+1
    std::vector<Eigen::MatrixXd> antider_coeffs;    // nodal: per-piece transform
    std::vector<Eigen::VectorXd> full_piece_rows;   // nodal: scattered integral over piece p

    int size() const;
    Eigen::VectorXd values_at(double t, Side side = Side::Auto) const;
    Eigen::VectorXd antider_at(double t) const;     // (int_0^t b_j)_j, continuous
    std::vector<double> interior_breaks() const;
};

/// Everything a discretization needs: the validated problem, the
/// configuration, the X and X+ grids, and the cached quadrature rule.
struct DiscContext {
    ProblemSpec prob;
    DiscConfig cfg;
    PieceMesh x_mesh;     // on [-tau, 0]
    XPlusBasis xplus;     // on [0, h]
    int quad_pts = 32;
    QuadRule cc_ref;      // Clenshaw-Curtis reference rule on [0, 1]
};

/// Grid setup. X+ = Chebyshev zeros on [0,h] (Legendre basis for weighted
/// residuals); X = Chebyshev extrema on [-tau,0] when h >= tau, or the
/// piecewise grid on [-qh, -(q-1)h] pieces with Q = ceil(tau/h) when h < tau.
/// PiecewiseCollocation delegates to piecewise_partition.
DiscContext build_context(const ProblemSpec& p, const DiscConfig& cfg);

/// Continuous piecewise polynomial spaces on a partition of [0, h] (degree =
/// cfg.N per piece on X+, cfg.M per piece on X, interface values shared); the
/// X partition is the X+ partition translated by -h, clipped to [-tau, 0].
DiscContext piecewise_partition(const ProblemSpec& p, const DiscConfig& cfg, int degree,
                                const std::vector<double>& pieces);

/// A linear functional with values in R^d, represented against the X and X+
/// coefficient vectors: value = phi * Phi + z * Z, blocked in d x d cells.
struct RowPair {
    Eigen::MatrixXd phi;  // d x (d * nx)
    Eigen::MatrixXd z;    // d x (d * nz)
};

/// Row of the solution-reconstruction operator V at x in [-tau, h].
RowPair v_row(const DiscContext& ctx, double x, Side side = Side::Auto);

/// Row of F_s V at t in [0, h]: the right-hand side functional applied to the
/// reconstructed segment, with quadrature panels split at every delay
/// breakpoint, piece boundary, and the kink theta = -t.
RowPair fs_row(const DiscContext& ctx, double t);

struct Blocks {
    Eigen::MatrixXd T1, T2, U1, U2;
    DiscConfig config;
    std::shared_ptr<const DiscContext> context;
};

/// Collocation assembly: row i of [T1|T2] = v_row(h + theta_i) over the X
/// dofs, row n of [U1|U2] = fs_row(t_n) over the X+ nodes.
Blocks assemble_blocks(const DiscContext& ctx);

/// Weighted-residuals assembly (RFDE only): X+ reduction by orthonormal
/// Legendre projection, U rows assembled with Gauss-Legendre panels.
Blocks assemble_weighted_residuals(const DiscContext& ctx);

/// Method dispatch.
Blocks assemble(const DiscContext& ctx);

struct EvolutionMatrix {
    Eigen::MatrixXd data;
    DiscConfig config;
    double condition_estimate = 0.0;  // 1-norm estimate for (I - U2)
    std::vector<std::string> warnings;
};

/// T = T1 + T2 (I - U2)^{-1} U1 via row-pivoted LU; throws
/// SingularOperatorError when (I - U2) is singular to 1e-12 * ||I - U2||_1.
EvolutionMatrix solve_reduced(const Blocks& b);

/// build_context + assemble + solve_reduced.
EvolutionMatrix reduce(const ProblemSpec& p, const DiscConfig& cfg);

// --- scalar restriction / prolongation helpers (tests, check command) ---

/// Scalar function with a one-sided limit selector (the Side is meaningful
/// only on piece interfaces and at the t=0 kink).
using SidedFn = std::function<double(double, Side)>;

/// R^+_N applied to a scalar function (nodal: node values; modal: Legendre
/// projections with Gauss panels split at the supplied kinks).
Eigen::VectorXd restrict_xplus(const DiscContext& ctx, const SidedFn& f,
                               const std::vector<double>& kinks = {});
/// R_M applied to a scalar function, sampling each dof on its home piece.
Eigen::VectorXd restrict_x(const DiscContext& ctx, const SidedFn& f);
/// (P^+_N Z)(t) for scalar coefficients.
double prolong_xplus(const DiscContext& ctx, const Eigen::VectorXd& z, double t,
                     Side side = Side::Auto);
/// (P_M Phi)(theta) for scalar coefficients.
double prolong_x(const DiscContext& ctx, const Eigen::VectorXd& phi, double theta,
                 Side side = Side::Auto);

}  // namespace delspec
