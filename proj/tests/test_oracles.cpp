#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "delspec/oracles.hpp"
#include "delspec/spectra.hpp"

using namespace delspec;

namespace {

ProblemSpec scalar_ode(double a) {
    ProblemSpec p;
    p.dim = 1;
    p.max_delay = 1.0;
    p.A = CoeffMatrix::constant(Eigen::MatrixXd::Constant(1, 1, a));
    return p;
}

ProblemSpec hayes() {
    ProblemSpec p;
    p.dim = 1;
    p.max_delay = 1.0;
    p.discrete.push_back({1.0, CoeffMatrix::constant(Eigen::MatrixXd::Constant(1, 1, -M_PI / 2))});
    return p;
}

ProblemSpec re_basic() {
    ProblemSpec p;
    p.kind = ProblemSpec::Kind::RE;
    p.dim = 1;
    p.max_delay = 3.0;
    p.kernels.push_back(KernelMatrix::constant(Eigen::MatrixXd::Constant(1, 1, 0.5), -3.0, -1.0));
    return p;
}

double min_gap(const std::vector<std::complex<double>>& values, std::complex<double> target) {
    double best = 1e300;
    for (const auto& v : values) best = std::min(best, std::abs(v - target));
    return best;
}

}  // namespace

TEST_CASE("char_roots: ODE, Hayes, RE anchors") {
    const auto ode = char_roots(scalar_ode(-1.0), {-2.0, 0.0, -1.0, 1.0, 6, 6});
    REQUIRE(!ode.empty());
    CHECK(min_gap(ode, {-1.0, 0.0}) < 1e-10);

    const auto hr = char_roots(hayes(), {-1.0, 1.0, 0.0, 2.0, 8, 8});
    REQUIRE(!hr.empty());
    CHECK(min_gap(hr, {0.0, M_PI / 2}) < 1e-10);

    const auto rr = char_roots(re_basic(), {-0.5, 0.5, -0.5, 0.5, 6, 6});
    REQUIRE(!rr.empty());
    CHECK(min_gap(rr, {0.0, 0.0}) < 1e-10);
}

TEST_CASE("char_roots: empty region is not an error") {
    // Hayes has no roots with Re(lambda) > 1
    const auto none = char_roots(hayes(), {5.0, 6.0, 0.1, 0.5, 4, 4});
    CHECK(none.empty());
}

TEST_CASE("char_roots: sorted by descending real part, conjugate closed") {
    const auto roots = char_roots(hayes(), {-3.0, 1.0, -3.0, 3.0, 12, 12});
    REQUIRE(roots.size() >= 2);
    for (size_t i = 0; i + 1 < roots.size(); ++i)
        CHECK(roots[i].real() >= roots[i + 1].real() - 1e-12);
    for (const auto& r : roots) {
        if (std::abs(r.imag()) < 1e-9) continue;
        CHECK(min_gap(roots, std::conj(r)) < 1e-8);
    }
}

TEST_CASE("char_roots: dedup independent of start-grid resolution") {
    const auto a = char_roots(hayes(), {-1.0, 1.0, 0.0, 2.0, 5, 5});
    const auto b = char_roots(hayes(), {-1.0, 1.0, 0.0, 2.0, 13, 9});
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-8);
}

TEST_CASE("monodromy_bruteforce: ODE flow on constant histories") {
    // constant history 1 maps to the segment x(1+theta) = e^{-(1+theta)};
    // at theta = 0 this is multiplication by e^{-1}
    const Eigen::MatrixXd A = monodromy_bruteforce(scalar_ode(-1.0), 1.0, 8, 512);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(A.cols());
    const Eigen::VectorXd mapped = A * ones;
    const NodeSet grid = chebyshev_extrema(8, -1.0, 0.0);
    for (int i = 0; i < mapped.size(); ++i)
        CHECK(std::abs(mapped[i] - std::exp(-(1.0 + grid.nodes[i]))) < 1e-8);
    CHECK(std::abs(mapped[mapped.size() - 1] - std::exp(-1.0)) < 1e-8);
    const Spectrum s = eig_dense(A);
    CHECK(std::abs(s.eigenvalues[0] - std::complex<double>(std::exp(-1.0), 0.0)) < 1e-8);
}

TEST_CASE("monodromy_bruteforce: Hayes dominant multiplier near i") {
    const Eigen::MatrixXd A = monodromy_bruteforce(hayes(), 1.0, 20, 2048);
    const Spectrum s = eig_dense(A);
    CHECK(std::abs(s.eigenvalues[0] - std::complex<double>(0.0, 1.0)) < 1e-5);
}

TEST_CASE("monodromy_bruteforce: RK4 self-convergence is at least second order") {
    const ProblemSpec p = hayes();
    const Eigen::MatrixXd a1 = monodromy_bruteforce(p, 1.0, 8, 128);
    const Eigen::MatrixXd a2 = monodromy_bruteforce(p, 1.0, 8, 256);
    const Eigen::MatrixXd a4 = monodromy_bruteforce(p, 1.0, 8, 512);
    const double d12 = (a2 - a1).cwiseAbs().maxCoeff();
    const double d24 = (a4 - a2).cwiseAbs().maxCoeff();
    CHECK(d12 / d24 > 3.2);  // halving the step cuts the Cauchy difference >= ~4x
}

TEST_CASE("monodromy_bruteforce: VIE self-convergence is at least second order") {
    const ProblemSpec p = re_basic();
    const Eigen::MatrixXd a1 = monodromy_bruteforce(p, 3.0, 6, 128);
    const Eigen::MatrixXd a2 = monodromy_bruteforce(p, 3.0, 6, 256);
    const Eigen::MatrixXd a4 = monodromy_bruteforce(p, 3.0, 6, 512);
    const double d12 = (a2 - a1).cwiseAbs().maxCoeff();
    const double d24 = (a4 - a2).cwiseAbs().maxCoeff();
    CHECK(d12 / d24 > 3.2);
}

TEST_CASE("monodromy_bruteforce: guard rails") {
    CHECK_THROWS_AS(monodromy_bruteforce(hayes(), 1.0, 8, 32), ConfigError);   // steps < 64
    CHECK_THROWS_AS(monodromy_bruteforce(hayes(), 1.0, 0, 256), ConfigError);  // M < 1
    // h/steps larger than the smallest discrete delay is rejected
    ProblemSpec fast = hayes();
    fast.discrete[0].delay = 1.0;
    fast.max_delay = 1.0;
    CHECK_THROWS_AS(monodromy_bruteforce(fast, 100.0, 4, 64), ConfigError);
}

TEST_CASE("oracle consistency: char roots appear among brute-force multipliers") {
    struct Case {
        ProblemSpec p;
        double h;
        RootSearchRegion region;
    };
    const std::vector<Case> cases{
        {scalar_ode(-1.0), 1.0, {-2.0, 0.5, -1.0, 1.0, 6, 6}},
        {hayes(), 1.0, {-1.0, 1.0, -2.0, 2.0, 8, 8}},
        {re_basic(), 3.0, {-0.5, 0.5, -0.5, 0.5, 6, 6}},
    };
    for (const auto& c : cases) {
        const auto roots = char_roots(c.p, c.region);
        const Spectrum s = eig_dense(monodromy_bruteforce(c.p, c.h, 16, 4096));
        for (const auto& lambda : roots) {
            const auto mu = std::exp(lambda * c.h);
            if (std::abs(mu) < 0.1) continue;
            CHECK(min_gap(s.eigenvalues, mu) < 1e-4);
        }
    }
}

TEST_CASE("monodromy_bruteforce: distributed RFDE kernel against char_roots") {
    ProblemSpec p;
    p.dim = 1;
    p.max_delay = 1.0;
    p.A = CoeffMatrix::constant(Eigen::MatrixXd::Constant(1, 1, -1.0));
    p.kernels.push_back(KernelMatrix::constant(Eigen::MatrixXd::Constant(1, 1, 2.0), -1.0, 0.0));
    const auto roots = char_roots(p, {0.0, 1.0, -0.5, 0.5, 6, 6});
    REQUIRE(!roots.empty());
    const Spectrum s = eig_dense(monodromy_bruteforce(p, 1.0, 12, 1024));
    const auto mu = std::exp(roots.front() * 1.0);
    double best = 1e300;
    for (const auto& v : s.eigenvalues) best = std::min(best, std::abs(v - mu));
    CHECK(best < 1e-5);
}
