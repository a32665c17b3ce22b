#include "delspec/runner.hpp"

#include <Eigen/LU>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "delspec/spectra.hpp"

namespace delspec {

std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

namespace fs = std::filesystem;

std::ostream& log_of(const RunOptions& opts) { return opts.log ? *opts.log : std::cout; }

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file " + path.string());
    out << content;
    if (!out) throw Error("failed writing output file " + path.string());
}

fs::path out_path(const RunOptions& opts, const RunSpec& spec, const std::string& fallback) {
    const std::string name = spec.run.out.empty() ? fallback : spec.run.out;
    return fs::path(opts.out_dir) / name;
}

std::string spectrum_csv(const Spectrum& s) {
    std::string csv = "index,re,im,modulus,residual\n";
    for (size_t i = 0; i < s.eigenvalues.size(); ++i) {
        csv += std::to_string(i) + "," + format_float(s.eigenvalues[i].real()) + "," +
               format_float(s.eigenvalues[i].imag()) + "," +
               format_float(std::abs(s.eigenvalues[i])) + "," + format_float(s.residuals[i]) +
               "\n";
    }
    return csv;
}

std::pair<std::complex<double>, std::string> resolve_reference(const RunSpec& spec,
                                                               const RunOptions& opts) {
    if (!spec.run.reference)
        throw ConfigError("run.reference is required for this command");
    const auto& ref = *spec.run.reference;
    switch (ref.kind) {
        case ReferenceSpec::Kind::Value:
            return {ref.value, "value"};
        case ReferenceSpec::Kind::CharRoots: {
            const auto roots = char_roots(spec.problem, ref.region);
            if (roots.empty())
                throw NumericalError("no characteristic roots found in the search region");
            const auto mu = std::exp(roots.front() * spec.disc.h);
            return {mu, "char_roots(lambda=" + format_float(roots.front().real()) + "+" +
                            format_float(roots.front().imag()) + "i)"};
        }
        case ReferenceSpec::Kind::Bruteforce: {
            const int M = ref.bruteforce_M > 0 ? ref.bruteforce_M : spec.disc.M;
            const auto A = monodromy_bruteforce(spec.problem, spec.disc.h, M, ref.steps);
            const Spectrum s = eig_dense(A);
            if (s.eigenvalues.empty()) throw NumericalError("empty brute-force spectrum");
            (void)opts;
            return {s.eigenvalues.front(), "monodromy_bruteforce(steps=" +
                                               std::to_string(ref.steps) +
                                               ", M=" + std::to_string(M) + ")"};
        }
    }
    throw ConfigError("unreachable reference kind");
}

int cmd_eig(const RunSpec& spec, const RunOptions& opts) {
    const EvolutionMatrix em = reduce(spec.problem, spec.disc);
    for (const auto& w : em.warnings) log_of(opts) << "warning: " << w << "\n";
    const Spectrum s = eig_dense(em.data);
    const fs::path path = out_path(opts, spec, "spectrum.csv");
    write_file(path, spectrum_csv(s));
    log_of(opts) << "eig: " << s.eigenvalues.size() << " eigenvalues, dominant = "
                 << format_float(s.eigenvalues.front().real()) << " + "
                 << format_float(s.eigenvalues.front().imag())
                 << "i, cond(I-U2) = " << format_float(em.condition_estimate) << ", wrote "
                 << path.string() << "\n";
    return 0;
}

int cmd_converge(const RunSpec& spec, const RunOptions& opts) {
    std::string csv = "N,M,re,im,abs_error,cond_estimate\n";
    const fs::path path = out_path(opts, spec, "convergence.csv");
    if (spec.run.n_list.empty()) {
        write_file(path, csv);
        log_of(opts) << "converge: empty N list, wrote header-only " << path.string() << "\n";
        return 0;
    }
    const auto [ref, provenance] = resolve_reference(spec, opts);
    const ConvergenceTable table =
        convergence_sweep(spec.problem, spec.disc, spec.run.n_list, ref, provenance);
    int failed = 0;
    for (const auto& row : table.rows) {
        csv += std::to_string(row.N) + "," + std::to_string(row.M) + "," +
               format_float(row.value.real()) + "," + format_float(row.value.imag()) + "," +
               format_float(row.abs_error) + "," + format_float(row.cond_estimate) + "\n";
        if (!row.ok) {
            ++failed;
            log_of(opts) << "converge: N=" << row.N << " failed: " << row.message << "\n";
        }
    }
    write_file(path, csv);
    log_of(opts) << "converge: reference " << provenance << " = " << format_float(ref.real())
                 << " + " << format_float(ref.imag()) << "i, wrote " << path.string() << "\n";
    try {
        log_of(opts) << "order_estimate: " << format_float(order_estimate(table)) << "\n";
    } catch (const Error& e) {
        log_of(opts) << "order_estimate: n/a (" << e.what() << ")\n";
    }
    if (failed > 0) {
        log_of(opts) << "partial: " << failed << "/" << table.rows.size()
                     << " rows failed\n";
        return 3;
    }
    return 0;
}

int cmd_compare(const RunSpec& spec, const RunOptions& opts) {
    if (spec.problem.kind != ProblemSpec::Kind::RFDE)
        throw ConfigError("compare requires an RFDE problem (weighted residuals)");
    DiscConfig coll = spec.disc;
    coll.method = Method::Collocation;
    DiscConfig wr = spec.disc;
    wr.method = Method::WeightedResiduals;
    const Spectrum sa = eig_dense(reduce(spec.problem, coll).data);
    const Spectrum sb = eig_dense(reduce(spec.problem, wr).data);
    const auto clusters = cluster(sa, 1e-6);
    if (clusters.empty()) throw NumericalError("compare: empty collocation spectrum");
    std::string csv =
        "index,re_collocation,im_collocation,re_weighted_residuals,im_weighted_residuals,"
        "delta\n";
    double max_delta = 0.0;
    int idx = 0;
    for (int member : clusters.front().members) {
        const auto mu_a = sa.eigenvalues[member];
        size_t best = 0;
        for (size_t i = 1; i < sb.eigenvalues.size(); ++i)
            if (std::abs(sb.eigenvalues[i] - mu_a) < std::abs(sb.eigenvalues[best] - mu_a))
                best = i;
        const auto mu_b = sb.eigenvalues[best];
        const double delta = std::abs(mu_b - mu_a);
        max_delta = std::max(max_delta, delta);
        csv += std::to_string(idx++) + "," + format_float(mu_a.real()) + "," +
               format_float(mu_a.imag()) + "," + format_float(mu_b.real()) + "," +
               format_float(mu_b.imag()) + "," + format_float(delta) + "\n";
    }
    const fs::path path = out_path(opts, spec, "compare.csv");
    write_file(path, csv);
    log_of(opts) << "compare: dominant-cluster max delta = " << format_float(max_delta)
                 << ", wrote " << path.string() << "\n";
    return 0;
}

int cmd_oracle(const RunSpec& spec, const RunOptions& opts) {
    const std::string base = spec.run.out.empty() ? "oracle" : spec.run.out;
    bool wrote_any = false;
    if (spec.problem.autonomous()) {
        RootSearchRegion region;
        if (spec.run.reference &&
            spec.run.reference->kind == ReferenceSpec::Kind::CharRoots)
            region = spec.run.reference->region;
        const auto roots = char_roots(spec.problem, region);
        std::string csv = "index,re,im,mult_re,mult_im\n";
        for (size_t i = 0; i < roots.size(); ++i) {
            const auto mu = std::exp(roots[i] * spec.disc.h);
            csv += std::to_string(i) + "," + format_float(roots[i].real()) + "," +
                   format_float(roots[i].imag()) + "," + format_float(mu.real()) + "," +
                   format_float(mu.imag()) + "\n";
        }
        const fs::path path = fs::path(opts.out_dir) / (base + "_roots.csv");
        write_file(path, csv);
        log_of(opts) << "oracle: " << roots.size() << " characteristic roots, wrote "
                     << path.string() << "\n";
        wrote_any = true;
    }
    const bool want_bruteforce =
        !spec.problem.autonomous() ||
        (spec.run.reference && spec.run.reference->kind == ReferenceSpec::Kind::Bruteforce);
    if (want_bruteforce) {
        int steps = 4096;
        int M = spec.disc.M;
        if (spec.run.reference && spec.run.reference->kind == ReferenceSpec::Kind::Bruteforce) {
            steps = spec.run.reference->steps;
            if (spec.run.reference->bruteforce_M > 0) M = spec.run.reference->bruteforce_M;
        }
        const auto A = monodromy_bruteforce(spec.problem, spec.disc.h, M, steps);
        const Spectrum s = eig_dense(A);
        const fs::path path = fs::path(opts.out_dir) / (base + "_multipliers.csv");
        write_file(path, spectrum_csv(s));
        log_of(opts) << "oracle: brute-force multipliers (steps=" << steps << ", M=" << M
                     << "), wrote " << path.string() << "\n";
        wrote_any = true;
    }
    if (!wrote_any) throw ConfigError("oracle: nothing to emit for this configuration");
    return 0;
}

int cmd_check(const RunSpec& spec, const RunOptions& opts) {
    std::ostream& log = log_of(opts);
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    bool all_ok = true;
    const auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        log << "check " << name << ": " << (ok ? "ok" : "FAIL") << " (" << detail << ")\n";
        all_ok = all_ok && ok;
    };

    const DiscContext ctx = build_context(spec.problem, spec.disc);
    const Blocks blocks = assemble(ctx);
    const EvolutionMatrix em = solve_reduced(blocks);
    for (const auto& w : em.warnings) log << "warning: " << w << "\n";
    report("solve", std::isfinite(em.condition_estimate),
           "cond(I-U2) = " + format_float(em.condition_estimate));

    // projection identities on 100 random coefficient vectors
    {
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd z(ctx.xplus.size());
            for (int i = 0; i < z.size(); ++i) z[i] = unit(rng);
            const Eigen::VectorXd back = restrict_xplus(
                ctx, [&](double t, Side side) { return prolong_xplus(ctx, z, t, side); });
            worst = std::max(worst, (back - z).cwiseAbs().maxCoeff() /
                                        std::max(z.cwiseAbs().maxCoeff(), 1e-30));
            Eigen::VectorXd phi(ctx.x_mesh.size());
            for (int i = 0; i < phi.size(); ++i) phi[i] = unit(rng);
            const Eigen::VectorXd backx = restrict_x(
                ctx, [&](double th, Side side) { return prolong_x(ctx, phi, th, side); });
            worst = std::max(worst, (backx - phi).cwiseAbs().maxCoeff() /
                                        std::max(phi.cwiseAbs().maxCoeff(), 1e-30));
        }
        report("projection-identity", worst <= 1e-12, "max rel deviation " + format_float(worst));
    }

    // discrete fixed-point residual against independently re-assembled rows
    {
        const int nx = static_cast<int>(blocks.T1.cols());
        const int nz = static_cast<int>(blocks.U2.rows());
        Eigen::VectorXd phi(nx);
        for (int i = 0; i < nx; ++i) phi[i] = unit(rng);
        const Eigen::MatrixXd A =
            Eigen::MatrixXd::Identity(nz, nz) - blocks.U2;
        const Eigen::VectorXd zstar = A.partialPivLu().solve(blocks.U1 * phi);
        const Blocks again = assemble(build_context(spec.problem, spec.disc));
        const Eigen::VectorXd rhs = again.U1 * phi + again.U2 * zstar;
        const double resid = (zstar - rhs).cwiseAbs().maxCoeff();
        const double scale = std::max(zstar.cwiseAbs().maxCoeff(), 1e-30);
        report("fixed-point-residual", resid <= 1e-9 * scale,
               "residual " + format_float(resid) + " vs " + format_float(1e-9 * scale));
    }

    // RE with h >= tau: T1 is exactly zero
    if (spec.problem.kind == ProblemSpec::Kind::RE &&
        spec.disc.h >= spec.problem.max_delay * (1.0 - 1e-12)) {
        const double t1max = blocks.T1.cwiseAbs().maxCoeff();
        report("re-T1-zero", t1max == 0.0, "max |T1| = " + format_float(t1max));
    }

    // partition of unity on the meshes
    {
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const double th = -spec.problem.max_delay * 0.5 * (unit(rng) + 1.0);
            worst = std::max(worst, std::abs(ctx.x_mesh.cardinal_row(th).sum() - 1.0));
            if (!ctx.xplus.modal) {
                const double t = spec.disc.h * 0.5 * (unit(rng) + 1.0);
                worst = std::max(worst, std::abs(ctx.xplus.values_at(t).sum() - 1.0));
            }
        }
        report("partition-of-unity", worst <= 1e-12, "max deviation " + format_float(worst));
    }

    // Lebesgue constants of Chebyshev-zero grids against (2/pi)log(N+1)+1
    {
        bool ok = true;
        double worst_excess = 0.0;
        for (int N : {5, 20, 50}) {
            const double lam = lebesgue_constant(chebyshev_zeros(N, 0.0, 1.0), 30);
            const double bound = 2.0 / M_PI * std::log(N + 1.0) + 1.0;
            ok = ok && lam <= bound;
            worst_excess = std::max(worst_excess, lam - bound);
        }
        report("lebesgue-bound", ok, "max excess over bound " + format_float(worst_excess));
    }

    return all_ok ? 0 : 4;
}

}  // namespace

int run_command(const std::string& command, const RunSpec& spec, const RunOptions& opts) {
    try {
        for (const auto& w : spec.warnings) log_of(opts) << "warning: " << w << "\n";
        if (command == "eig") return cmd_eig(spec, opts);
        if (command == "converge") return cmd_converge(spec, opts);
        if (command == "compare") return cmd_compare(spec, opts);
        if (command == "oracle") return cmd_oracle(spec, opts);
        if (command == "check") return cmd_check(spec, opts);
        throw ConfigError("unknown command '" + command +
                          "' (expected eig, converge, compare, oracle or check)");
    } catch (const ConfigError& e) {
        log_of(opts) << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        log_of(opts) << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace delspec
