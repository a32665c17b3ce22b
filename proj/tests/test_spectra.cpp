#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

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

}  // namespace

TEST_CASE("eig_dense: rotation and diagonal anchors") {
    Eigen::MatrixXd rot(2, 2);
    rot << 0, 1, -1, 0;
    const Spectrum s = eig_dense(rot);
    REQUIRE(s.eigenvalues.size() == 2);
    CHECK(std::abs(s.eigenvalues[0] - std::complex<double>(0, 1)) < 1e-14);
    CHECK(std::abs(s.eigenvalues[1] - std::complex<double>(0, -1)) < 1e-14);

    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(3, 3);
    diag(0, 0) = 2.0;
    diag(1, 1) = 0.5;
    diag(2, 2) = -1.0;
    const Spectrum d = eig_dense(diag);
    CHECK(d.eigenvalues[0].real() == doctest::Approx(2.0));
    CHECK(d.eigenvalues[1].real() == doctest::Approx(-1.0));  // |-1| > 0.5
    CHECK(d.eigenvalues[2].real() == doctest::Approx(0.5));

    CHECK_THROWS_AS(eig_dense(Eigen::MatrixXd::Ones(2, 3)), ConfigError);
}

TEST_CASE("eig_dense: residuals re-verified on random matrices") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd A(50, 50);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) A(i, j) = gauss(rng);
    const Spectrum s = eig_dense(A);
    REQUIRE(s.eigenvalues.size() == 50);
    for (double r : s.residuals) CHECK(r <= 1e-10);
}

TEST_CASE("eig_dense: conjugate pairing and deterministic tie order") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd A(14, 14);
    for (int i = 0; i < 14; ++i)
        for (int j = 0; j < 14; ++j) A(i, j) = gauss(rng);
    const Spectrum s = eig_dense(A);
    for (const auto& mu : s.eigenvalues) {
        if (std::abs(mu.imag()) < 1e-12) continue;
        double best = 1e300;
        for (const auto& nu : s.eigenvalues) best = std::min(best, std::abs(nu - std::conj(mu)));
        CHECK(best <= 1e-10);
    }
    for (size_t i = 0; i + 1 < s.eigenvalues.size(); ++i) {
        const auto a = s.eigenvalues[i], b = s.eigenvalues[i + 1];
        const bool ordered = std::abs(a) > std::abs(b) ||
                             (std::abs(a) == std::abs(b) &&
                              (a.real() > b.real() ||
                               (a.real() == b.real() && a.imag() >= b.imag())));
        CHECK(ordered);
    }
}

TEST_CASE("cluster: multiplicities, conjugates, edge cases") {
    Spectrum s;
    s.source_size = 3;
    s.eigenvalues = {{1.0, 0.0}, {1.0 + 1e-9, 0.0}, {0.3, 0.0}};
    s.residuals = {0, 0, 0};
    const auto cl = cluster(s, 1e-6);
    REQUIRE(cl.size() == 2);
    CHECK(cl[0].multiplicity() == 2);
    CHECK(cl[1].multiplicity() == 1);

    Spectrum pair;
    pair.source_size = 2;
    pair.eigenvalues = {{0.0, 1.0}, {0.0, -1.0}};
    pair.residuals = {0, 0};
    CHECK(cluster(pair, 1e-6).size() == 2);  // conjugates never merge

    Spectrum empty;
    CHECK(cluster(empty, 1e-6).empty());
    CHECK_THROWS_AS(cluster(empty, 0.7), ConfigError);

    // multiplicities always sum to the spectrum size
    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd A(12, 12);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) A(i, j) = gauss(rng);
    const Spectrum rs = eig_dense(A);
    int total = 0;
    for (const auto& c : cluster(rs, 1e-6)) total += c.multiplicity();
    CHECK(total == 12);
}

TEST_CASE("convergence_sweep: ODE errors collapse geometrically") {
    DiscConfig tmpl;
    tmpl.h = 1.0;
    const ConvergenceTable t = convergence_sweep(scalar_ode(-1.0), tmpl, {5, 7, 10, 14, 20},
                                                 {std::exp(-1.0), 0.0}, "closed form");
    REQUIRE(t.rows.size() == 5);
    for (const auto& row : t.rows) {
        REQUIRE(row.ok);
        CHECK(row.M == row.N + 1);
        // truncation decays like the Chebyshev remainder of e^{-t}: ~1e-8 at
        // N=5 and below 1e-12 from N=10 on
        if (row.N >= 10) CHECK(row.abs_error <= 1e-12);
        else CHECK(row.abs_error <= 1e-6);
    }
    CHECK(t.rows[0].abs_error > t.rows[1].abs_error);
    CHECK(t.rows[1].abs_error > t.rows[2].abs_error);
}

TEST_CASE("convergence_sweep: Hayes decreases to the plateau") {
    DiscConfig tmpl;
    tmpl.h = 1.0;
    const ConvergenceTable t =
        convergence_sweep(hayes(), tmpl, {5, 10, 15, 20}, {0.0, 1.0}, "analytic root");
    REQUIRE(t.rows.size() == 4);
    CHECK(t.rows[3].abs_error <= 1e-8);
    // strictly decreasing before the rounding plateau
    CHECK(t.rows[0].abs_error > t.rows[1].abs_error);
    CHECK(t.rows[1].abs_error > t.rows[2].abs_error);
}

TEST_CASE("convergence_sweep: empty list and in-row failures") {
    DiscConfig tmpl;
    tmpl.h = 1.0;
    CHECK(convergence_sweep(scalar_ode(-1.0), tmpl, {}, {1.0, 0.0}, "x").rows.empty());
    CHECK_THROWS_AS(convergence_sweep(scalar_ode(-1.0), tmpl, {10, 5}, {1.0, 0.0}, "x"),
                    ConfigError);
    // an invalid M override forces every row to fail but the sweep continues
    const ConvergenceTable bad =
        convergence_sweep(hayes(), tmpl, {5, 10}, {0.0, 1.0}, "x", 0);
    REQUIRE(bad.rows.size() == 2);
    CHECK_FALSE(bad.rows[0].ok);
    CHECK_FALSE(bad.rows[1].ok);
    CHECK(!bad.rows[0].message.empty());
}

TEST_CASE("order_estimate: algebraic and super-algebraic synthetic data") {
    ConvergenceTable alg;
    for (int N : {5, 10, 20, 40}) {
        ConvergenceRow row;
        row.N = N;
        row.ok = true;
        row.abs_error = std::pow(N, -3.0);
        alg.rows.push_back(row);
    }
    CHECK(order_estimate(alg) == doctest::Approx(-3.0).epsilon(0.05));

    ConvergenceTable geo;
    for (int N = 5; N <= 25; N += 5) {
        ConvergenceRow row;
        row.N = N;
        row.ok = true;
        row.abs_error = std::pow(2.0, -N);
        geo.rows.push_back(row);
    }
    CHECK(order_estimate(geo) < -5.0);

    ConvergenceTable flat;
    for (int N : {5, 10, 15}) {
        ConvergenceRow row;
        row.N = N;
        row.ok = true;
        row.abs_error = 1e-15;
        flat.rows.push_back(row);
    }
    CHECK_THROWS_AS(order_estimate(flat), NumericalError);
}
