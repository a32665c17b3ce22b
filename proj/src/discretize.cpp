#include "delspec/discretize.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace delspec {

std::vector<double> PieceMesh::interior_breaks() const {
    std::vector<double> out;
    for (size_t i = 0; i + 1 < pieces.size(); ++i) out.push_back(pieces[i].b);
    return out;
}

int PieceMesh::piece_of(double x, Side side) const {
    const int np = static_cast<int>(pieces.size());
    const double tol = 1e-13 * (hi() - lo());
    if (x <= lo() + tol) return 0;
    if (x >= hi() - tol) return np - 1;
    for (int i = 0; i < np; ++i) {
        if (x < pieces[i].b - tol) return i;
        if (x <= pieces[i].b + tol) {
            // on the interface at pieces[i].b
            if (side == Side::Above && i + 1 < np) return i + 1;
            return i;
        }
    }
    return np - 1;
}

Eigen::VectorXd PieceMesh::cardinal_row(double x, Side side) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
    const int p = piece_of(x, side);
    const Eigen::VectorXd loc = cardinal_values(pieces[p], x);
    for (int i = 0; i < pieces[p].count(); ++i) out[gidx[p][i]] += loc[i];
    return out;
}

PieceMesh single_piece_mesh(NodeSet ns) {
    PieceMesh m;
    m.shared = true;
    const int n = ns.count();
    m.gidx.emplace_back();
    for (int i = 0; i < n; ++i) {
        m.gidx[0].push_back(i);
        m.dof_point.push_back(ns.nodes[i]);
        m.dof_home.emplace_back(0, i);
    }
    m.pieces.push_back(std::move(ns));
    return m;
}

namespace {

PieceMesh piecewise_extrema_mesh(const std::vector<double>& breaks, int degree, bool shared) {
    if (breaks.size() < 2) throw ConfigError("piecewise mesh needs at least one piece");
    if (degree < 1) throw ConfigError("piecewise mesh needs degree >= 1");
    for (size_t i = 0; i + 1 < breaks.size(); ++i)
        if (!(breaks[i] < breaks[i + 1]))
            throw ConfigError("degenerate piece: breakpoints must be strictly increasing");
    PieceMesh m;
    m.shared = shared;
    int next = 0;
    for (size_t p = 0; p + 1 < breaks.size(); ++p) {
        NodeSet ns = chebyshev_extrema(degree, breaks[p], breaks[p + 1]);
        m.gidx.emplace_back();
        for (int i = 0; i <= degree; ++i) {
            if (shared && i == 0 && p > 0) {
                m.gidx[p].push_back(m.gidx[p - 1].back());  // interface dof shared
                continue;
            }
            m.gidx[p].push_back(next++);
            m.dof_point.push_back(ns.nodes[i]);
            m.dof_home.emplace_back(static_cast<int>(p), i);
        }
        m.pieces.push_back(std::move(ns));
    }
    return m;
}

}  // namespace

PieceMesh shared_mesh(const std::vector<double>& breaks, int degree) {
    return piecewise_extrema_mesh(breaks, degree, /*shared=*/true);
}

PieceMesh duplicated_mesh(const std::vector<double>& breaks, int degree) {
    return piecewise_extrema_mesh(breaks, degree, /*shared=*/false);
}

int XPlusBasis::size() const { return modal ? legendre_count : mesh.size(); }

Eigen::VectorXd XPlusBasis::values_at(double t, Side side) const {
    if (modal) return legendre_orthonormal(legendre_count - 1, 0.0, h, t);
    return mesh.cardinal_row(t, side);
}

Eigen::VectorXd XPlusBasis::antider_at(double t) const {
    if (modal) return legendre_orthonormal_antiderivatives(legendre_count - 1, 0.0, h, t);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.size());
    const int pc = mesh.piece_of(t, Side::Auto);
    for (int p = 0; p < pc; ++p) out += full_piece_rows[p];
    const Eigen::VectorXd loc = cardinal_antiderivatives(mesh.pieces[pc], antider_coeffs[pc], t);
    for (int i = 0; i < mesh.pieces[pc].count(); ++i) out[mesh.gidx[pc][i]] += loc[i];
    return out;
}

std::vector<double> XPlusBasis::interior_breaks() const {
    if (modal) return {};
    return mesh.interior_breaks();
}

namespace {

XPlusBasis make_nodal_xplus(PieceMesh mesh, double h) {
    XPlusBasis xp;
    xp.modal = false;
    xp.h = h;
    xp.mesh = std::move(mesh);
    for (const auto& piece : xp.mesh.pieces) {
        Eigen::MatrixXd coeffs = cardinal_antiderivative_coeffs(piece);
        Eigen::VectorXd full = cardinal_antiderivatives(piece, coeffs, piece.b);
        Eigen::VectorXd row = Eigen::VectorXd::Zero(xp.mesh.size());
        const size_t p = xp.antider_coeffs.size();
        for (int i = 0; i < piece.count(); ++i) row[xp.mesh.gidx[p][i]] += full[i];
        xp.antider_coeffs.push_back(std::move(coeffs));
        xp.full_piece_rows.push_back(std::move(row));
    }
    return xp;
}

void finish_context(DiscContext& ctx) {
    const int base = ctx.cfg.quad_order > 0 ? ctx.cfg.quad_order
                                            : std::max(2 * (ctx.cfg.N + 1), 32);
    ctx.quad_pts = std::max(base, 2);
    ctx.cc_ref = clenshaw_curtis(ctx.quad_pts, 0.0, 1.0);
}

Side home_side(const PieceMesh& m, int dof) {
    if (m.shared) return Side::Auto;
    const auto [p, i] = m.dof_home[dof];
    if (i == 0 && p > 0) return Side::Above;
    if (i == m.pieces[p].degree() && p + 1 < static_cast<int>(m.pieces.size()))
        return Side::Below;
    return Side::Auto;
}

}  // namespace

DiscContext build_context(const ProblemSpec& raw, const DiscConfig& cfg) {
    ProblemSpec p = validate(raw);
    if (!(cfg.h > 0.0)) throw ConfigError("step h must be positive");
    if (cfg.N < 0) throw ConfigError("discretization index N must be nonnegative");
    if (cfg.M < 1) throw ConfigError("discretization index M must be positive");
    if (cfg.quad_order < 0) throw ConfigError("quad_order must be nonnegative");
    if (!cfg.pieces.empty() && cfg.method != Method::PiecewiseCollocation)
        throw ConfigError("'pieces' requires method = piecewise");
    if (cfg.method == Method::PiecewiseCollocation) {
        if (cfg.pieces.empty())
            throw ConfigError("piecewise method requires a 'pieces' partition of [0, h]");
        return piecewise_partition(p, cfg, cfg.N, cfg.pieces);
    }
    const bool rfde = (p.kind == ProblemSpec::Kind::RFDE);
    if (rfde && cfg.M < cfg.N + 1)
        throw ConfigError("RFDE discretization requires M >= N+1 (M=" + std::to_string(cfg.M) +
                          ", N=" + std::to_string(cfg.N) + ")");
    if (!rfde && cfg.M < cfg.N)
        throw ConfigError("RE discretization requires M >= N");
    if (cfg.method == Method::WeightedResiduals && !rfde)
        throw ConfigError("weighted residuals supports RFDE problems only");

    DiscContext ctx;
    ctx.prob = std::move(p);
    ctx.cfg = cfg;
    const double tau = ctx.prob.max_delay;
    const double h = cfg.h;

    if (cfg.method == Method::WeightedResiduals) {
        ctx.xplus.modal = true;
        ctx.xplus.h = h;
        ctx.xplus.legendre_count = cfg.N + 1;
    } else {
        ctx.xplus = make_nodal_xplus(single_piece_mesh(chebyshev_zeros(cfg.N, 0.0, h)), h);
    }

    if (h >= tau * (1.0 - 1e-12)) {
        ctx.x_mesh = single_piece_mesh(chebyshev_extrema(cfg.M, -tau, 0.0));
    } else {
        // Q = minimum positive integer with Q h >= tau; pieces [-qh, -(q-1)h]
        // with the leftmost clipped to -tau. Interface values duplicated.
        const int Q = std::max(1, static_cast<int>(std::ceil(tau / h - 1e-12)));
        std::vector<double> breaks;
        breaks.push_back(-tau);
        for (int q = Q - 1; q >= 1; --q) breaks.push_back(-q * h);
        breaks.push_back(0.0);
        ctx.x_mesh = duplicated_mesh(breaks, cfg.M);
    }
    finish_context(ctx);
    return ctx;
}

DiscContext piecewise_partition(const ProblemSpec& raw, const DiscConfig& cfg, int degree,
                                const std::vector<double>& pieces) {
    ProblemSpec p = validate(raw);
    const double tau = p.max_delay;
    const double h = cfg.h;
    if (h < tau * (1.0 - 1e-12))
        throw ConfigError("piecewise method requires h >= max_delay");
    if (pieces.size() < 2) throw ConfigError("pieces must contain at least two breakpoints");
    for (size_t i = 0; i + 1 < pieces.size(); ++i)
        if (!(pieces[i] < pieces[i + 1]))
            throw ConfigError("degenerate piece: breakpoints must be strictly increasing");
    if (std::abs(pieces.front()) > 1e-12 * h || std::abs(pieces.back() - h) > 1e-12 * h)
        throw ConfigError("pieces must run from 0 to h");
    if (degree < 1) throw ConfigError("piecewise degree must be >= 1");
    const bool rfde = (p.kind == ProblemSpec::Kind::RFDE);
    if (rfde && cfg.M < degree + 1)
        throw ConfigError("piecewise RFDE discretization requires M >= N+1");
    if (!rfde && cfg.M < degree)
        throw ConfigError("piecewise RE discretization requires M >= N");

    std::vector<double> zb = pieces;
    zb.front() = 0.0;
    zb.back() = h;

    // X partition: the X+ partition translated by -h, clipped to [-tau, 0].
    std::vector<double> xb;
    xb.push_back(-tau);
    for (double b : zb) {
        const double t = b - h;
        if (t > -tau + 1e-12 * tau && t < -1e-12 * tau) xb.push_back(t);
    }
    xb.push_back(0.0);

    DiscContext ctx;
    ctx.prob = std::move(p);
    ctx.cfg = cfg;
    ctx.cfg.method = Method::PiecewiseCollocation;
    ctx.cfg.pieces = zb;
    ctx.xplus = make_nodal_xplus(shared_mesh(zb, degree), h);
    ctx.x_mesh = shared_mesh(xb, cfg.M);
    finish_context(ctx);
    return ctx;
}

namespace {

RowPair zero_rows(const DiscContext& ctx) {
    const int d = ctx.prob.dim;
    return {Eigen::MatrixXd::Zero(d, d * ctx.x_mesh.size()),
            Eigen::MatrixXd::Zero(d, d * ctx.xplus.size())};
}

// kron(row, I_d): scalar cardinal row expanded to d x d blocks
Eigen::MatrixXd blocked(const Eigen::VectorXd& row, int d) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d * row.size());
    for (int j = 0; j < row.size(); ++j)
        for (int i = 0; i < d; ++i) out(i, d * j + i) = row[j];
    return out;
}

void add_scaled(RowPair& acc, const Eigen::MatrixXd& coef, const RowPair& term) {
    acc.phi.noalias() += coef * term.phi;
    acc.z.noalias() += coef * term.z;
}

}  // namespace

RowPair v_row(const DiscContext& ctx, double x, Side side) {
    const int d = ctx.prob.dim;
    const double tol0 = 1e-14 * std::max(ctx.cfg.h, ctx.prob.max_delay);
    RowPair out = zero_rows(ctx);
    if (x < -ctx.prob.max_delay - 1e-9 || x > ctx.cfg.h + 1e-9)
        throw ConfigError("v_row: x outside [-max_delay, h]");
    if (ctx.prob.kind == ProblemSpec::Kind::RFDE) {
        if (x > tol0) {
            // V(phi,z)(x) = phi(0) + int_0^x z
            out.phi = blocked(ctx.x_mesh.cardinal_row(0.0, Side::Below), d);
            out.z = blocked(ctx.xplus.antider_at(std::min(x, ctx.cfg.h)), d);
        } else {
            out.phi = blocked(ctx.x_mesh.cardinal_row(std::min(x, 0.0), side), d);
        }
    } else {
        // RE: the state may jump at 0; Side::Below picks the history branch there
        const bool zside = x > tol0 || (x >= -tol0 && side != Side::Below);
        if (zside)
            out.z = blocked(ctx.xplus.values_at(std::clamp(x, 0.0, ctx.cfg.h), side), d);
        else
            out.phi = blocked(ctx.x_mesh.cardinal_row(std::min(x, 0.0), side), d);
    }
    return out;
}

namespace {

// Integral over the kernel support of C_k(s+t, theta) V(.)(t+theta) dtheta,
// Clenshaw-Curtis per smooth panel; panels split at theta = -t and at every
// interpolant breakpoint crossed by t + theta.
void integrate_kernel_term(const DiscContext& ctx, RowPair& acc, const KernelMatrix& k,
                           double t) {
    const double lo = std::max(k.support_lo, -ctx.prob.max_delay);
    const double hi = std::min(k.support_hi, 0.0);
    if (!(lo < hi)) return;
    const double span = hi - lo;
    const double tol = 1e-13 * std::max(span, 1.0);

    std::vector<double> bps{lo, hi};
    auto add_bp = [&](double v) {
        if (v > lo + tol && v < hi - tol) bps.push_back(v);
    };
    add_bp(-t);
    for (double b : ctx.x_mesh.interior_breaks()) add_bp(b);
    for (double b : ctx.xplus.interior_breaks()) add_bp(b - t);
    std::sort(bps.begin(), bps.end());

    const auto& cc = ctx.cc_ref;
    const int K = static_cast<int>(cc.points.size());
    for (size_t seg = 0; seg + 1 < bps.size(); ++seg) {
        const double pl = bps[seg], pr = bps[seg + 1];
        const double len = pr - pl;
        if (len <= tol) continue;
        for (int j = 0; j < K; ++j) {
            const double theta = (j == 0) ? pl : (j == K - 1) ? pr : pl + cc.points[j] * len;
            const Side side = (j == 0) ? Side::Above : (j == K - 1) ? Side::Below : Side::Auto;
            const SegmentQuery q{t, theta};
            if (!q.valid(ctx.prob.max_delay, ctx.cfg.h))
                throw NumericalError("kernel quadrature point outside the segment domain");
            const double w = cc.weights[j] * len;
            add_scaled(acc, w * k.eval(ctx.cfg.s + t, theta), v_row(ctx, t + theta, side));
        }
    }
}

}  // namespace

RowPair fs_row(const DiscContext& ctx, double t) {
    if (t < -1e-12 || t > ctx.cfg.h + 1e-12) throw ConfigError("fs_row: t outside [0, h]");
    const auto& p = ctx.prob;
    RowPair acc = zero_rows(ctx);
    if (p.kind == ProblemSpec::Kind::RFDE) {
        add_scaled(acc, eval_coeff(p.A, ctx.cfg.s + t), v_row(ctx, t));
        for (const auto& term : p.discrete)
            add_scaled(acc, eval_coeff(term.B, ctx.cfg.s + t), v_row(ctx, t - term.delay));
    }
    for (const auto& k : p.kernels) integrate_kernel_term(ctx, acc, k, t);
    return acc;
}

Blocks assemble_blocks(const DiscContext& ctx) {
    if (ctx.cfg.method == Method::WeightedResiduals)
        throw ConfigError("assemble_blocks requires a collocation method");
    const int d = ctx.prob.dim;
    const int nx = ctx.x_mesh.size();
    const int nz = ctx.xplus.size();
    Blocks b;
    b.config = ctx.cfg;
    b.context = std::make_shared<DiscContext>(ctx);
    b.T1.resize(d * nx, d * nx);
    b.T2.resize(d * nx, d * nz);
    b.U1.resize(d * nz, d * nx);
    b.U2.resize(d * nz, d * nz);
    const bool re = (ctx.prob.kind == ProblemSpec::Kind::RE);
    for (int r = 0; r < nx; ++r) {
        // RE keeps duplicated interface dofs independent (the state may jump
        // there); RFDE ties to the left piece, making duplicate rows agree.
        const Side side = re ? home_side(ctx.x_mesh, r) : Side::Auto;
        const RowPair rp = v_row(ctx, ctx.cfg.h + ctx.x_mesh.dof_point[r], side);
        b.T1.middleRows(d * r, d) = rp.phi;
        b.T2.middleRows(d * r, d) = rp.z;
    }
    for (int n = 0; n < nz; ++n) {
        const RowPair rp = fs_row(ctx, ctx.xplus.mesh.dof_point[n]);
        b.U1.middleRows(d * n, d) = rp.phi;
        b.U2.middleRows(d * n, d) = rp.z;
    }
    return b;
}

Blocks assemble_weighted_residuals(const DiscContext& ctx) {
    if (ctx.cfg.method != Method::WeightedResiduals)
        throw ConfigError("assemble_weighted_residuals requires method = weighted-residuals");
    if (ctx.prob.kind != ProblemSpec::Kind::RFDE)
        throw ConfigError("weighted residuals supports RFDE problems only");
    const int d = ctx.prob.dim;
    const int nx = ctx.x_mesh.size();
    const int N = ctx.cfg.N;
    const double h = ctx.cfg.h;
    Blocks b;
    b.config = ctx.cfg;
    b.context = std::make_shared<DiscContext>(ctx);
    b.T1.resize(d * nx, d * nx);
    b.T2.resize(d * nx, d * (N + 1));
    b.U1 = Eigen::MatrixXd::Zero(d * (N + 1), d * nx);
    b.U2 = Eigen::MatrixXd::Zero(d * (N + 1), d * (N + 1));
    for (int r = 0; r < nx; ++r) {
        const RowPair rp = v_row(ctx, h + ctx.x_mesh.dof_point[r]);
        b.T1.middleRows(d * r, d) = rp.phi;
        b.T2.middleRows(d * r, d) = rp.z;
    }

    // <F_s V(., .), p_i> assembled with Gauss-Legendre panels split at the
    // kinks of t -> F_s V(t).
    std::vector<double> kinks{0.0, h};
    auto add_kink = [&](double v) {
        if (v > 1e-12 * h && v < h * (1.0 - 1e-12)) kinks.push_back(v);
    };
    const auto xbreaks = ctx.x_mesh.interior_breaks();
    for (const auto& term : ctx.prob.discrete) {
        add_kink(term.delay);
        for (double bp : xbreaks) add_kink(term.delay + bp);
    }
    for (const auto& k : ctx.prob.kernels) {
        add_kink(-k.support_lo);
        add_kink(-k.support_hi);
        for (double bp : xbreaks) {
            add_kink(bp - k.support_lo);
            add_kink(bp - k.support_hi);
        }
    }
    std::sort(kinks.begin(), kinks.end());
    for (size_t seg = 0; seg + 1 < kinks.size(); ++seg) {
        const double pl = kinks[seg], pr = kinks[seg + 1];
        if (pr - pl <= 1e-13 * h) continue;
        const QuadRule g = gauss_legendre(N + 1, pl, pr);
        for (size_t q = 0; q < g.points.size(); ++q) {
            const RowPair rp = fs_row(ctx, g.points[q]);
            const Eigen::VectorXd pv = legendre_orthonormal(N, 0.0, h, g.points[q]);
            for (int i = 0; i <= N; ++i) {
                const double w = g.weights[q] * pv[i];
                b.U1.middleRows(d * i, d) += w * rp.phi;
                b.U2.middleRows(d * i, d) += w * rp.z;
            }
        }
    }
    return b;
}

Blocks assemble(const DiscContext& ctx) {
    return ctx.cfg.method == Method::WeightedResiduals ? assemble_weighted_residuals(ctx)
                                                       : assemble_blocks(ctx);
}

EvolutionMatrix solve_reduced(const Blocks& b) {
    const long n = b.U2.rows();
    if (b.U2.cols() != n || b.U1.rows() != n || b.T2.cols() != n ||
        b.T1.rows() != b.T1.cols() || b.U1.cols() != b.T1.cols())
        throw ConfigError("solve_reduced: inconsistent block dimensions");
    if (!b.T1.allFinite() || !b.T2.allFinite() || !b.U1.allFinite() || !b.U2.allFinite())
        throw NumericalError("solve_reduced: non-finite block entries");

    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - b.U2;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const double l1 = A.cwiseAbs().colwise().sum().maxCoeff();
    const double rcond = lu.rcond();
    const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    const double minpiv = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (minpiv <= 1e-12 * l1)
        throw SingularOperatorError(
            "(I - U2) is singular to tolerance: smallest pivot " + std::to_string(minpiv) +
                " vs 1e-12*||I-U2||_1 = " + std::to_string(1e-12 * l1) +
                "; N may be below the well-posedness threshold (condition estimate " +
                std::to_string(cond) + ")",
            cond);

    EvolutionMatrix em;
    em.config = b.config;
    em.condition_estimate = cond;
    em.data = b.T1 + b.T2 * lu.solve(b.U1);
    if (n > 0) {
        const Eigen::EigenSolver<Eigen::MatrixXd> es(b.U2, /*computeEigenvectors=*/false);
        const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
        if (rho >= 1.0 - 1e-12)
            em.warnings.push_back("spectral radius of U2 is " + std::to_string(rho) +
                                  " (>= 1): discrete fixed-point iteration not contractive");
    }
    return em;
}

EvolutionMatrix reduce(const ProblemSpec& p, const DiscConfig& cfg) {
    return solve_reduced(assemble(build_context(p, cfg)));
}

Eigen::VectorXd restrict_xplus(const DiscContext& ctx, const SidedFn& f,
                               const std::vector<double>& kinks) {
    if (!ctx.xplus.modal) {
        Eigen::VectorXd out(ctx.xplus.size());
        for (int n = 0; n < ctx.xplus.size(); ++n)
            out[n] = f(ctx.xplus.mesh.dof_point[n], home_side(ctx.xplus.mesh, n));
        return out;
    }
    const int N = ctx.xplus.legendre_count - 1;
    const double h = ctx.cfg.h;
    std::vector<double> bps{0.0, h};
    for (double v : kinks)
        if (v > 1e-12 * h && v < h * (1.0 - 1e-12)) bps.push_back(v);
    std::sort(bps.begin(), bps.end());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(N + 1);
    for (size_t seg = 0; seg + 1 < bps.size(); ++seg) {
        if (bps[seg + 1] - bps[seg] <= 1e-13 * h) continue;
        const QuadRule g = gauss_legendre(N + 1, bps[seg], bps[seg + 1]);
        for (size_t q = 0; q < g.points.size(); ++q)
            out += g.weights[q] * f(g.points[q], Side::Auto) *
                   legendre_orthonormal(N, 0.0, h, g.points[q]);
    }
    return out;
}

Eigen::VectorXd restrict_x(const DiscContext& ctx, const SidedFn& f) {
    Eigen::VectorXd out(ctx.x_mesh.size());
    for (int r = 0; r < ctx.x_mesh.size(); ++r)
        out[r] = f(ctx.x_mesh.dof_point[r], home_side(ctx.x_mesh, r));
    return out;
}

double prolong_xplus(const DiscContext& ctx, const Eigen::VectorXd& z, double t, Side side) {
    if (z.size() != ctx.xplus.size())
        throw ConfigError("prolong_xplus: coefficient length mismatch");
    return z.dot(ctx.xplus.values_at(t, side));
}

double prolong_x(const DiscContext& ctx, const Eigen::VectorXd& phi, double theta, Side side) {
    if (phi.size() != ctx.x_mesh.size())
        throw ConfigError("prolong_x: coefficient length mismatch");
    return phi.dot(ctx.x_mesh.cardinal_row(theta, side));
}

}  // namespace delspec
