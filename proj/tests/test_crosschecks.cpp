// Cross-route consistency on problems that exercise the full coefficient
// generality: time- and theta-dependent kernels, several delayed terms at
// once, and matrix-valued renewal kernels. Each case is anchored by at least
// two independent computations.
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "delspec/oracles.hpp"
#include "delspec/spectra.hpp"

using namespace delspec;
using Complex = std::complex<double>;

namespace {

double nearest(const std::vector<Complex>& values, Complex target) {
    double best = 1e300;
    for (const auto& v : values) best = std::min(best, std::abs(v - target));
    return best;
}

}  // namespace

TEST_CASE("periodic kernel in t and theta: discretization vs brute force vs WR") {
    // x'(t) = -0.8 x(t) + int_{-1}^{0} (0.9 + 0.4 cos(2 pi t))(1 + theta) x(t+theta) dtheta
    ProblemSpec p;
    p.dim = 1;
    p.max_delay = 1.0;
    p.period = 1.0;
    p.A = CoeffMatrix::constant(Eigen::MatrixXd::Constant(1, 1, -0.8));
    KernelMatrix k;
    k.dim = 1;
    k.support_lo = -1.0;
    k.support_hi = 0.0;
    k.entries.push_back(ScalarFunc::parse("(0.9 + 0.4*cos(2*pi*t))*(1 + theta)", true));
    p.kernels.push_back(k);

    DiscConfig cfg;
    cfg.M = 21;
    cfg.N = 20;
    cfg.h = 1.0;
    const Spectrum disc = eig_dense(reduce(p, cfg).data);
    const Spectrum brute = eig_dense(monodromy_bruteforce(p, 1.0, 16, 2048));
    for (int j = 0; j < 3; ++j)
        CHECK(nearest(brute.eigenvalues, disc.eigenvalues[j]) < 1e-8);

    DiscConfig wr = cfg;
    wr.method = Method::WeightedResiduals;
    const Spectrum sw = eig_dense(reduce(p, wr).data);
    CHECK(nearest(sw.eigenvalues, disc.eigenvalues[0]) < 1e-10);
}

TEST_CASE("two discrete delays plus an interior kernel: three routes agree") {
    // x'(t) = -0.3 x - 0.6 x(t-0.4) - 0.5 x(t-1)
    //         + int_{-0.9}^{-0.5} 2 theta^2 x(t+theta) dtheta
    ProblemSpec p;
    p.dim = 1;
    p.max_delay = 1.0;
    p.A = CoeffMatrix::constant(Eigen::MatrixXd::Constant(1, 1, -0.3));
    p.discrete.push_back({0.4, CoeffMatrix::constant(Eigen::MatrixXd::Constant(1, 1, -0.6))});
    p.discrete.push_back({1.0, CoeffMatrix::constant(Eigen::MatrixXd::Constant(1, 1, -0.5))});
    KernelMatrix k;
    k.dim = 1;
    k.support_lo = -0.9;
    k.support_hi = -0.5;
    k.entries.push_back(ScalarFunc::parse("2*theta^2", true));
    p.kernels.push_back(k);

    const auto roots = char_roots(p, {-2.0, 1.0, -8.0, 8.0, 10, 14});
    REQUIRE(roots.size() >= 2);

    DiscConfig cfg;
    cfg.M = 25;
    cfg.N = 24;
    cfg.h = 1.0;
    const Spectrum disc = eig_dense(reduce(p, cfg).data);
    const Spectrum brute = eig_dense(monodromy_bruteforce(p, 1.0, 16, 2048));
    for (const auto& lambda : roots) {
        const Complex mu = std::exp(lambda);
        CHECK(nearest(disc.eigenvalues, mu) < 1e-10);
        CHECK(nearest(brute.eigenvalues, mu) < 1e-10);
    }
}

TEST_CASE("2x2 renewal kernel with theta dependence: VIE brute force converges") {
    ProblemSpec p;
    p.kind = ProblemSpec::Kind::RE;
    p.dim = 2;
    p.max_delay = 2.0;
    KernelMatrix k;
    k.dim = 2;
    k.support_lo = -2.0;
    k.support_hi = 0.0;
    k.entries.push_back(ScalarFunc::parse("0.3", true));
    k.entries.push_back(ScalarFunc::parse("0.2 + 0.1*theta", true));
    k.entries.push_back(ScalarFunc::parse("0.05", true));
    k.entries.push_back(ScalarFunc::parse("0.25", true));
    p.kernels.push_back(k);

    DiscConfig cfg;
    cfg.M = 17;
    cfg.N = 16;
    cfg.h = 2.0;
    const Spectrum disc = eig_dense(reduce(p, cfg).data);
    const double gap512 =
        nearest(eig_dense(monodromy_bruteforce(p, 2.0, 10, 512)).eigenvalues,
                disc.eigenvalues[0]);
    const double gap2048 =
        nearest(eig_dense(monodromy_bruteforce(p, 2.0, 10, 2048)).eigenvalues,
                disc.eigenvalues[0]);
    CHECK(gap512 < 1e-5);
    CHECK(gap2048 < 1e-7);
    CHECK(gap512 / gap2048 > 8.0);  // second order in the step
}
