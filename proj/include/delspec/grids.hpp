#pragma once

#include <Eigen/Core>
#include <vector>

#include "delspec/errors.hpp"

namespace delspec {

enum class NodeFamily { ChebyshevZeros, ChebyshevExtrema, Custom };

/// Ordered interpolation nodes on [a, b] with barycentric weights.
/// Nodes are strictly ascending; weights are the standard barycentric weights
/// w_j = 1 / prod_{k != j}(x_j - x_k), stored up to a common nonzero factor.
struct NodeSet {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> nodes;
    std::vector<double> weights;
    NodeFamily family = NodeFamily::Custom;

    int count() const { return static_cast<int>(nodes.size()); }
    int degree() const { return count() - 1; }
};

/// N+1 zeros of the Chebyshev polynomial of degree N+1 mapped to [a, b]:
/// ((b-a)/2)(1 - cos((2n+1)pi / (2(N+1)))) + a, ascending.
NodeSet chebyshev_zeros(int N, double a, double b);

/// M+1 Chebyshev extrema ((b-a)/2)(1 - cos(m pi / M)) + a, ascending; the
/// first and last nodes equal the interval endpoints exactly.
NodeSet chebyshev_extrema(int M, double a, double b);

/// Arbitrary strictly ascending nodes; barycentric weights computed directly.
NodeSet custom_nodes(std::vector<double> nodes, double a, double b);

/// Cardinal (Lagrange basis) values l_j(x), barycentric second form.
/// When x falls within 1e-14*(b-a) of a node the exact unit vector is
/// returned, avoiding the 0/0 of the barycentric form.
Eigen::VectorXd cardinal_values(const NodeSet& ns, double x);

/// Barycentric interpolation of vector data (values: d x (n+1), one column
/// per node). Exact at nodes.
Eigen::VectorXd lagrange_eval(const NodeSet& ns, const Eigen::MatrixXd& values, double x);
double lagrange_eval(const NodeSet& ns, const Eigen::VectorXd& values, double x);

/// Chebyshev-series coefficients of the antiderivatives of all cardinal
/// functions: column j holds the coefficients of x -> int_a^x l_j, degree
/// n+1, exact for the polynomial basis.
Eigen::MatrixXd cardinal_antiderivative_coeffs(const NodeSet& ns);

/// (int_a^x l_j)_{j=0..n}; the overload taking the coefficient matrix skips
/// recomputing the transform.
Eigen::VectorXd cardinal_antiderivatives(const NodeSet& ns, double x);
Eigen::VectorXd cardinal_antiderivatives(const NodeSet& ns, const Eigen::MatrixXd& coeffs,
                                         double x);

/// Values p_0(x)..p_N(x) of the Legendre polynomials shifted to [a, b] and
/// normalized so that int_a^b p_i p_j = delta_ij.
Eigen::VectorXd legendre_orthonormal(int N, double a, double b, double x);

/// (int_a^x p_i)_{i=0..N} via the three-term recurrence.
Eigen::VectorXd legendre_orthonormal_antiderivatives(int N, double a, double b, double x);

struct QuadRule {
    std::vector<double> points;
    std::vector<double> weights;
    double a = 0.0;
    double b = 1.0;
};

/// K-point Clenshaw-Curtis rule on [a, b]; exact for degree <= K-1, positive
/// weights. Weights are the exact integrals of the cardinal functions on the
/// Chebyshev-extrema grid.
QuadRule clenshaw_curtis(int K, double a, double b);

/// K-point Gauss-Legendre rule on [a, b] (Golub-Welsch).
QuadRule gauss_legendre(int K, double a, double b);

/// Lower bound for the Lebesgue constant: max of sum_j |l_j(x)| over a
/// uniform probe grid with probe_density*(n+1)+1 points.
double lebesgue_constant(const NodeSet& ns, int probe_density = 30);

}  // namespace delspec
