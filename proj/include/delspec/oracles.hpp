#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "delspec/problems.hpp"

namespace delspec {

/// Rectangle in the complex plane scanned by the characteristic-root search.
struct RootSearchRegion {
    double re_min = -2.0;
    double re_max = 1.0;
    double im_min = 0.0;
    double im_max = 4.0;
    int n_re = 8;  // grid start counts
    int n_im = 8;
};

/// Characteristic roots of an autonomous problem: Newton iteration on
/// det Delta(lambda) from every grid start (derivative by central
/// differences, step 1e-7 (1+|lambda|)), converged when
/// |det Delta| <= 1e-12 (1+|lambda|)^d; roots outside the region are
/// discarded, duplicates merged within 1e-8, result sorted by descending
/// real part. An empty result is not an error.
std::vector<std::complex<double>> char_roots(const ProblemSpec& p,
                                             const RootSearchRegion& region);

/// Brute-force realization of U(s+h, s) by time integration: one column per
/// Lagrange cardinal history on the M+1 Chebyshev-extrema grid of [-tau, 0]
/// (times each unit vector for d > 1). RFDEs integrate with classical RK4 at
/// step h/steps and cubic-Hermite dense history; REs step the equivalent
/// Volterra form on a uniform grid with trapezoidal memory sums. The result
/// is restricted to the shifted grid, columns assembling the matrix.
Eigen::MatrixXd monodromy_bruteforce(const ProblemSpec& p, double h, int M, int steps);

}  // namespace delspec
