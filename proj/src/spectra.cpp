#include "delspec/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace delspec {

Spectrum eig_dense(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw ConfigError("eig_dense: matrix must be square");
    if (!A.allFinite()) throw NumericalError("eig_dense: matrix has non-finite entries");
    const int n = static_cast<int>(A.rows());
    Spectrum s;
    s.source_size = n;
    if (n == 0) return s;

    Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
        throw NumericalError("eig_dense: QR iteration failed to converge for a " +
                             std::to_string(n) + "x" + std::to_string(n) + " matrix");

    const double norm1 = std::max(A.cwiseAbs().colwise().sum().maxCoeff(), 1e-300);
    const Eigen::MatrixXcd Ac = A.cast<std::complex<double>>();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto& ev = es.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        const double mi = std::abs(ev[i]), mj = std::abs(ev[j]);
        if (mi != mj) return mi > mj;
        if (ev[i].real() != ev[j].real()) return ev[i].real() > ev[j].real();
        return ev[i].imag() > ev[j].imag();
    });
    for (int idx : order) {
        const Eigen::VectorXcd v = es.eigenvectors().col(idx);
        const double res = (Ac * v - ev[idx] * v).norm() / (norm1 * v.norm());
        s.eigenvalues.push_back(ev[idx]);
        s.residuals.push_back(res);
    }
    return s;
}

std::vector<Cluster> cluster(const Spectrum& s, double rel_tol) {
    if (!(rel_tol > 0.0 && rel_tol < 0.5))
        throw ConfigError("cluster: rel_tol must lie in (0, 0.5)");
    std::vector<Cluster> out;
    std::vector<bool> used(s.eigenvalues.size(), false);
    for (size_t i = 0; i < s.eigenvalues.size(); ++i) {
        if (used[i]) continue;
        Cluster c;
        c.center = s.eigenvalues[i];
        const double tol = rel_tol * std::max(std::abs(c.center), 1.0);
        for (size_t j = i; j < s.eigenvalues.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(s.eigenvalues[j] - c.center) <= tol) {
                c.members.push_back(static_cast<int>(j));
                used[j] = true;
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

ConvergenceTable convergence_sweep(const ProblemSpec& p, const DiscConfig& tmpl,
                                   const std::vector<int>& n_list,
                                   std::complex<double> reference, std::string provenance,
                                   std::optional<int> m_override) {
    if (!std::is_sorted(n_list.begin(), n_list.end()))
        throw ConfigError("convergence_sweep: N list must be ascending");
    if (!std::isfinite(reference.real()) || !std::isfinite(reference.imag()))
        throw ConfigError("convergence_sweep: reference must be finite");
    ConvergenceTable t;
    t.reference = reference;
    t.reference_provenance = std::move(provenance);
    for (int N : n_list) {
        ConvergenceRow row;
        row.N = N;
        row.M = m_override.value_or(N + 1);
        try {
            DiscConfig cfg = tmpl;
            cfg.N = N;
            cfg.M = row.M;
            const EvolutionMatrix em = reduce(p, cfg);
            const Spectrum s = eig_dense(em.data);
            if (s.eigenvalues.empty()) throw NumericalError("empty spectrum");
            size_t best = 0;
            for (size_t i = 1; i < s.eigenvalues.size(); ++i)
                if (std::abs(s.eigenvalues[i] - reference) <
                    std::abs(s.eigenvalues[best] - reference))
                    best = i;
            row.value = s.eigenvalues[best];
            row.abs_error = std::abs(row.value - reference);
            row.cond_estimate = em.condition_estimate;
            row.ok = true;
        } catch (const Error& e) {
            row.ok = false;
            row.message = e.what();
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

double order_estimate(const ConvergenceTable& t) {
    std::vector<double> lx, ly;
    for (const auto& row : t.rows) {
        if (!row.ok || !(row.abs_error > 1e-14) || row.N < 1) continue;
        lx.push_back(std::log(static_cast<double>(row.N)));
        ly.push_back(std::log(row.abs_error));
    }
    if (lx.size() < 3)
        throw NumericalError("order_estimate: needs at least 3 rows above the rounding "
                             "plateau (error > 1e-14), got " + std::to_string(lx.size()));
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace delspec
