#pragma once

#include <Eigen/Core>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "delspec/discretize.hpp"

namespace delspec {

/// Eigenvalues of a real dense matrix, sorted by descending modulus (ties:
/// descending real part, then descending imaginary part), each with the
/// explicitly re-verified residual ||A v - mu v||_2 / ||A||_1.
struct Spectrum {
    std::vector<std::complex<double>> eigenvalues;
    std::vector<double> residuals;
    int source_size = 0;
};

Spectrum eig_dense(const Eigen::MatrixXd& A);

struct Cluster {
    std::complex<double> center;
    std::vector<int> members;  // indices into the Spectrum
    int multiplicity() const { return static_cast<int>(members.size()); }
};

/// Greedy modulus-descending clustering; members lie within
/// rel_tol * max(|center|, 1) of their center.
std::vector<Cluster> cluster(const Spectrum& s, double rel_tol = 1e-6);

struct ConvergenceRow {
    int N = 0;
    int M = 0;
    std::complex<double> value{};
    double abs_error = std::numeric_limits<double>::quiet_NaN();
    double cond_estimate = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string message;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::complex<double> reference{};
    std::string reference_provenance;
};

/// For each N (ascending), build and solve with M = N+1 unless overridden,
/// take the eigenvalue closest to the reference, record |mu_N - reference|.
/// Per-N failures are recorded in-row and the sweep continues.
ConvergenceTable convergence_sweep(const ProblemSpec& p, const DiscConfig& tmpl,
                                   const std::vector<int>& n_list,
                                   std::complex<double> reference, std::string provenance,
                                   std::optional<int> m_override = std::nullopt);

/// Least-squares slope of log(error) vs log(N) over the rows above the
/// rounding plateau (error > 1e-14); requires at least three such rows.
double order_estimate(const ConvergenceTable& t);

}  // namespace delspec
