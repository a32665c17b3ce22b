// Acceptance suite: one pass/fail line per criterion, exit nonzero when any
// criterion fails. All tolerances are pinned here.
#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <vector>

#include "delspec/catalog.hpp"
#include "delspec/config.hpp"
#include "delspec/oracles.hpp"
#include "delspec/runner.hpp"
#include "delspec/spectra.hpp"

using namespace delspec;
using Complex = std::complex<double>;

namespace {

int g_failures = 0;

class Criterion {
public:
    Criterion(int number, std::string name, double time_limit_s)
        : number_(number), name_(std::move(name)), limit_(time_limit_s),
          start_(std::chrono::steady_clock::now()) {}

    void finish(bool pass, const std::string& detail) {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        const bool in_time = elapsed < limit_;
        const bool ok = pass && in_time;
        std::printf("[criterion %02d] %s %s: %s (%.2fs of %.0fs budget)\n", number_,
                    ok ? "PASS" : "FAIL", name_.c_str(), detail.c_str(), elapsed, limit_);
        std::fflush(stdout);
        if (!ok) ++g_failures;
    }

    void fail_with(const std::string& what) { finish(false, "exception: " + what); }

private:
    int number_;
    std::string name_;
    double limit_;
    std::chrono::steady_clock::time_point start_;
};

ProblemSpec problem_of(const std::string& name) {
    return parse_config(catalog_document(name)).problem;
}

DiscConfig colloc(int M, int N, double h) {
    DiscConfig cfg;
    cfg.M = M;
    cfg.N = N;
    cfg.h = h;
    return cfg;
}

double nearest(const std::vector<Complex>& values, Complex target) {
    double best = 1e300;
    for (const auto& v : values) best = std::min(best, std::abs(v - target));
    return best;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

void criterion_1() {
    Criterion c(1, "ODE reduction", 1.0);
    try {
        const Spectrum s = eig_dense(reduce(problem_of("ode"), colloc(11, 10, 1.0)).data);
        const double err = std::abs(s.eigenvalues.front() - Complex(0.36787944117144233, 0.0));
        c.finish(err <= 1e-12, "|mu1 - exp(-1)| = " + fmt(err) + ", tol 1e-12");
    } catch (const std::exception& e) {
        c.fail_with(e.what());
    }
}

void criterion_2() {
    Criterion c(2, "Hayes RFDE dominant pair", 5.0);
    try {
        const ProblemSpec hayes = problem_of("hayes");
        // characteristic roots +-i pi/2 confirmed by the oracle and by substitution
        const auto roots = char_roots(hayes, {-1.0, 1.0, -2.0, 2.0, 8, 8});
        const double root_gap =
            std::max(nearest(roots, Complex(0.0, M_PI / 2)), nearest(roots, Complex(0.0, -M_PI / 2)));
        const double subst = std::abs(characteristic_matrix(hayes, Complex(0.0, M_PI / 2))(0, 0));
        const Spectrum s = eig_dense(reduce(hayes, colloc(21, 20, 1.0)).data);
        const double e1 = nearest({s.eigenvalues[0], s.eigenvalues[1]}, Complex(0.0, 1.0));
        const double e2 = nearest({s.eigenvalues[0], s.eigenvalues[1]}, Complex(0.0, -1.0));
        const bool pass = e1 <= 1e-8 && e2 <= 1e-8 && root_gap <= 1e-9 && subst <= 1e-12;
        c.finish(pass, "|mu - (+-i)| = " + fmt(std::max(e1, e2)) + " (tol 1e-8), oracle root gap " +
                           fmt(root_gap) + ", |Delta(i pi/2)| = " + fmt(subst));
    } catch (const std::exception& e) {
        c.fail_with(e.what());
    }
}

void criterion_3() {
    Criterion c(3, "RE transcritical anchor", 5.0);
    try {
        const Spectrum s = eig_dense(reduce(problem_of("re-basic"), colloc(21, 20, 3.0)).data);
        const double err = nearest(s.eigenvalues, Complex(1.0, 0.0));
        c.finish(err <= 1e-8, "|mu - 1| = " + fmt(err) + ", tol 1e-8");
    } catch (const std::exception& e) {
        c.fail_with(e.what());
    }
}

void criterion_4() {
    Criterion c(4, "spectral order on Hayes", 30.0);
    try {
        const ProblemSpec hayes = problem_of("hayes");
        const auto roots = char_roots(hayes, {-1.0, 1.0, 0.0, 2.0, 8, 8});
        if (roots.empty()) throw NumericalError("oracle found no roots");
        const Complex reference = std::exp(roots.front() * 1.0);
        DiscConfig tmpl;
        tmpl.h = 1.0;
        const ConvergenceTable table =
            convergence_sweep(hayes, tmpl, {5, 10, 15, 20, 25}, reference, "char_roots");
        double min_err = 1e300;
        for (const auto& row : table.rows) {
            if (!row.ok) throw NumericalError("sweep row failed: " + row.message);
            min_err = std::min(min_err, row.abs_error);
        }
        // strictly decreasing until the rounding plateau
        const double plateau = std::max(1e-13, 10.0 * min_err);
        bool decreasing = true;
        for (size_t i = 0; i + 1 < table.rows.size(); ++i) {
            if (table.rows[i].abs_error <= plateau) break;
            decreasing = decreasing && table.rows[i + 1].abs_error < table.rows[i].abs_error;
        }
        const double slope = order_estimate(table);
        c.finish(decreasing && slope < -4.0,
                 "slope = " + fmt(slope) + " (< -4 required), monotone to plateau " +
                     std::string(decreasing ? "yes" : "NO"));
    } catch (const std::exception& e) {
        c.fail_with(e.what());
    }
}

void criterion_5() {
    Criterion c(5, "collocation vs weighted residuals", 10.0);
    try {
        const ProblemSpec hayes = problem_of("hayes");
        const Spectrum sc = eig_dense(reduce(hayes, colloc(21, 20, 1.0)).data);
        DiscConfig wr = colloc(21, 20, 1.0);
        wr.method = Method::WeightedResiduals;
        const Spectrum sw = eig_dense(reduce(hayes, wr).data);
        const auto dominant = cluster(sc, 1e-6).front();
        double worst = 0.0;
        for (int idx : dominant.members)
            worst = std::max(worst, nearest(sw.eigenvalues, sc.eigenvalues[idx]));
        c.finish(worst <= 1e-6, "dominant-cluster max delta = " + fmt(worst) + ", tol 1e-6");
    } catch (const std::exception& e) {
        c.fail_with(e.what());
    }
}

void criterion_6() {
    Criterion c(6, "Appendix-A shift consistency (h < tau)", 10.0);
    try {
        const ProblemSpec hayes = problem_of("hayes");
        const Spectrum half = eig_dense(reduce(hayes, colloc(21, 20, 0.5)).data);  // Q = 2
        const Spectrum full = eig_dense(reduce(hayes, colloc(21, 20, 1.0)).data);
        double worst = 0.0;
        for (int k = 0; k < 2; ++k) {
            const Complex sq = half.eigenvalues[k] * half.eigenvalues[k];
            worst = std::max(worst, nearest(full.eigenvalues, sq));
        }
        c.finish(worst <= 1e-5, "max |T(0.5)^2 eig - T(1) eig| = " + fmt(worst) + ", tol 1e-5");
    } catch (const std::exception& e) {
        c.fail_with(e.what());
    }
}

void criterion_7() {
    Criterion c(7, "semigroup spectral law", 10.0);
    try {
        double worst = 0.0;
        for (const std::string name : {"hayes", "ode", "re-basic"}) {
            const ProblemSpec p = problem_of(name);
            const double h = p.max_delay;
            const Spectrum s1 = eig_dense(reduce(p, colloc(21, 20, h)).data);
            const Spectrum s2 = eig_dense(reduce(p, colloc(21, 20, 2.0 * h)).data);
            for (int k = 0; k < 2; ++k) {
                const Complex sq = s1.eigenvalues[k] * s1.eigenvalues[k];
                worst = std::max(worst, nearest(s2.eigenvalues, sq));
            }
        }
        c.finish(worst <= 1e-6, "max |eig(T(h))^2 - eig(T(2h))| = " + fmt(worst) + ", tol 1e-6");
    } catch (const std::exception& e) {
        c.fail_with(e.what());
    }
}

void criterion_8() {
    Criterion c(8, "periodic oracle cross-check (delayed Mathieu)", 60.0);
    try {
        const ProblemSpec mathieu = problem_of("delayed-mathieu");
        const Spectrum disc = eig_dense(reduce(mathieu, colloc(25, 24, 1.0)).data);
        const Spectrum ref = eig_dense(monodromy_bruteforce(mathieu, 1.0, 24, 4096));
        double worst = 0.0;
        for (int k = 0; k < 2; ++k)
            worst = std::max(worst, nearest(ref.eigenvalues, disc.eigenvalues[k]));
        c.finish(worst <= 1e-4, "dominant multiplier gap vs brute force = " + fmt(worst) +
                                    ", tol 1e-4, |mu1| = " + fmt(std::abs(disc.eigenvalues[0])));
    } catch (const std::exception& e) {
        c.fail_with(e.what());
    }
}

void criterion_9() {
    Criterion c(9, "projection identities and Lebesgue bound", 5.0);
    try {
        std::mt19937_64 rng(20260808ull);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        const ProblemSpec hayes = problem_of("hayes");
        const ProblemSpec re = problem_of("re-basic");

        std::vector<DiscContext> contexts;
        contexts.push_back(build_context(hayes, colloc(11, 10, 1.0)));
        contexts.push_back(build_context(re, colloc(11, 10, 3.0)));
        contexts.push_back(build_context(hayes, colloc(11, 10, 0.4)));  // h < tau
        DiscConfig wr = colloc(11, 10, 1.0);
        wr.method = Method::WeightedResiduals;
        contexts.push_back(build_context(hayes, wr));
        DiscConfig pw = colloc(7, 6, 1.0);
        pw.method = Method::PiecewiseCollocation;
        pw.pieces = {0.0, 0.25, 0.6, 1.0};
        contexts.push_back(build_context(hayes, pw));

        double worst = 0.0;
        for (const auto& ctx : contexts) {
            for (int trial = 0; trial < 100; ++trial) {
                Eigen::VectorXd z(ctx.xplus.size());
                for (int i = 0; i < z.size(); ++i) z[i] = unit(rng);
                const Eigen::VectorXd zz = restrict_xplus(
                    ctx, [&](double t, Side side) { return prolong_xplus(ctx, z, t, side); });
                worst = std::max(worst, (zz - z).cwiseAbs().maxCoeff() /
                                            std::max(1.0, z.cwiseAbs().maxCoeff()));
                Eigen::VectorXd phi(ctx.x_mesh.size());
                for (int i = 0; i < phi.size(); ++i) phi[i] = unit(rng);
                const Eigen::VectorXd pp = restrict_x(
                    ctx, [&](double th, Side side) { return prolong_x(ctx, phi, th, side); });
                worst = std::max(worst, (pp - phi).cwiseAbs().maxCoeff() /
                                            std::max(1.0, phi.cwiseAbs().maxCoeff()));
            }
        }
        bool lebesgue_ok = true;
        double excess = -1e300;
        for (int N = 0; N <= 50; ++N) {
            const double lam = lebesgue_constant(chebyshev_zeros(N, 0.0, 1.0), 30);
            const double bound = 2.0 / M_PI * std::log(N + 1.0) + 1.0;
            lebesgue_ok = lebesgue_ok && lam <= bound;
            excess = std::max(excess, lam - bound);
        }
        c.finish(worst <= 1e-12 && lebesgue_ok,
                 "projection deviation = " + fmt(worst) +
                     " (tol 1e-12), Lebesgue excess over (2/pi)log(N+1)+1 = " + fmt(excess));
    } catch (const std::exception& e) {
        c.fail_with(e.what());
    }
}

void criterion_10() {
    Criterion c(10, "well-posedness gate (I - U2)", 30.0);
    try {
        double worst_cond = 0.0;
        bool all_finite = true;
        for (const std::string name : {"ode", "hayes", "re-basic", "delayed-mathieu"}) {
            const RunSpec spec = parse_config(catalog_document(name));
            for (int N : {10, 14, spec.disc.N}) {
                DiscConfig cfg = spec.disc;
                cfg.N = N;
                cfg.M = N + 1;
                const EvolutionMatrix em = reduce(spec.problem, cfg);
                all_finite = all_finite && std::isfinite(em.condition_estimate);
                worst_cond = std::max(worst_cond, em.condition_estimate);
            }
        }
        c.finish(all_finite, "all solves succeeded, max cond(I-U2) = " + fmt(worst_cond));
    } catch (const std::exception& e) {
        c.fail_with(e.what());
    }
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (g_failures > 0) {
        std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("acceptance: all 10 criteria passed\n");
    return 0;
}
