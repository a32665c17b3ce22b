#include "delspec/problems.hpp"

#include <algorithm>
#include <cmath>

#include "delspec/grids.hpp"

namespace delspec {

ScalarFunc::ScalarFunc(double c)
    : expr_(CoeffExpr::number(c)), constant_(true), value_(c) {}

ScalarFunc::ScalarFunc(ExprPtr expr) : expr_(std::move(expr)) {
    uses_t_ = expr_->uses_t();
    uses_theta_ = expr_->uses_theta();
    constant_ = !uses_t_ && !uses_theta_;
    if (constant_) {
        try {
            value_ = expr_->eval(0.0, 0.0);
        } catch (const ExprDomainError& e) {
            throw ConfigError(std::string("constant expression has a domain error: ") + e.what());
        }
    }
}

ScalarFunc ScalarFunc::parse(std::string_view src, bool allow_theta) {
    return ScalarFunc(parse_expr(src, /*allow_t=*/true, allow_theta));
}

CoeffMatrix CoeffMatrix::zero(int d) {
    CoeffMatrix m;
    m.dim = d;
    m.entries.assign(static_cast<size_t>(d) * d, ScalarFunc(0.0));
    return m;
}

CoeffMatrix CoeffMatrix::constant(const Eigen::MatrixXd& v) {
    CoeffMatrix m = zero(static_cast<int>(v.rows()));
    for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j) m.at(i, j) = ScalarFunc(v(i, j));
    return m;
}

bool CoeffMatrix::time_invariant() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const ScalarFunc& f) { return !f.uses_t(); });
}

KernelMatrix KernelMatrix::constant(const Eigen::MatrixXd& v, double lo, double hi) {
    KernelMatrix k;
    k.dim = static_cast<int>(v.rows());
    k.support_lo = lo;
    k.support_hi = hi;
    for (int i = 0; i < k.dim; ++i)
        for (int j = 0; j < k.dim; ++j) k.entries.emplace_back(v(i, j));
    return k;
}

Eigen::MatrixXd KernelMatrix::eval(double t, double theta) const {
    Eigen::MatrixXd out(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) out(i, j) = at(i, j)(t, theta);
    return out;
}

bool KernelMatrix::time_invariant() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const ScalarFunc& f) { return !f.uses_t(); });
}

bool ProblemSpec::autonomous() const {
    if (!A.entries.empty() && !A.time_invariant()) return false;
    for (const auto& term : discrete)
        if (!term.B.time_invariant()) return false;
    for (const auto& k : kernels)
        if (!k.time_invariant()) return false;
    return true;
}

namespace {

void check_dim(int expected, int got, const std::string& what) {
    if (expected != got)
        throw ConfigError("dimension mismatch: " + what + " is " + std::to_string(got) +
                          "x" + std::to_string(got) + ", problem dim is " +
                          std::to_string(expected));
}

}  // namespace

ProblemSpec validate(ProblemSpec p, std::vector<std::string>* warnings) {
    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    };

    if (p.dim < 1) throw ConfigError("problem dim must be positive");
    if (!(p.max_delay > 0.0)) throw ConfigError("max_delay must be positive");
    if (p.period && !(*p.period > 0.0)) throw ConfigError("period must be positive");
    const double tau = p.max_delay;
    const double tol = 1e-12 * tau;

    if (p.A.entries.empty()) p.A = CoeffMatrix::zero(p.dim);
    check_dim(p.dim, p.A.dim, "A");
    for (const auto& f : p.A.entries)
        if (f.uses_theta()) throw ConfigError("A entries may not reference theta");

    if (p.kind == ProblemSpec::Kind::RE) {
        if (!p.discrete.empty())
            throw ConfigError("RE problems have no discrete delay terms");
        if (!p.A.time_invariant() ||
            std::any_of(p.A.entries.begin(), p.A.entries.end(),
                        [](const ScalarFunc& f) { return !f.is_constant() || f.constant_value() != 0.0; }))
            throw ConfigError("RE problems have no instantaneous A term");
        if (p.kernels.size() != 1)
            throw ConfigError("RE problem requires exactly one kernel");
    }

    for (auto& term : p.discrete) {
        check_dim(p.dim, term.B.dim, "a discrete-term B");
        for (const auto& f : term.B.entries)
            if (f.uses_theta()) throw ConfigError("B entries may not reference theta");
        if (!(term.delay > 0.0)) throw ConfigError("discrete delay must be positive");
        if (term.delay > tau + tol)
            throw ConfigError("delay exceeds max_delay (delay=" + std::to_string(term.delay) +
                              ", max_delay=" + std::to_string(tau) + ")");
    }
    if (!std::is_sorted(p.discrete.begin(), p.discrete.end(),
                        [](const DiscreteTerm& a, const DiscreteTerm& b) { return a.delay < b.delay; })) {
        std::stable_sort(p.discrete.begin(), p.discrete.end(),
                         [](const DiscreteTerm& a, const DiscreteTerm& b) { return a.delay < b.delay; });
        warn("discrete delays were reordered ascending");
    }
    for (size_t i = 0; i + 1 < p.discrete.size();) {
        if (std::abs(p.discrete[i].delay - p.discrete[i + 1].delay) <= tol) {
            // merge duplicate delays by summing the B matrices
            for (int r = 0; r < p.dim; ++r)
                for (int c = 0; c < p.dim; ++c) {
                    ExprPtr sum = std::make_shared<CoeffExpr>(
                        CoeffExpr::Kind::Add, 0.0,
                        parse_expr(p.discrete[i].B.at(r, c).source()),
                        parse_expr(p.discrete[i + 1].B.at(r, c).source()));
                    p.discrete[i].B.at(r, c) = ScalarFunc(sum);
                }
            p.discrete.erase(p.discrete.begin() + static_cast<long>(i) + 1);
            warn("duplicate discrete delays merged");
        } else {
            ++i;
        }
    }

    for (auto& k : p.kernels) {
        check_dim(p.dim, k.dim, "a kernel C");
        if (!(k.support_lo < k.support_hi))
            throw ConfigError("kernel support must be a nondegenerate interval");
        if (k.support_lo < -tau - tol || k.support_hi > tol)
            throw ConfigError("kernel support must lie inside [-max_delay, 0]");
    }
    if (p.kind == ProblemSpec::Kind::RFDE && p.kernels.size() > 1) {
        std::stable_sort(p.kernels.begin(), p.kernels.end(),
                         [](const KernelMatrix& a, const KernelMatrix& b) {
                             return a.support_lo < b.support_lo;
                         });
        for (size_t i = 0; i + 1 < p.kernels.size(); ++i)
            if (p.kernels[i].support_hi > p.kernels[i + 1].support_lo + tol)
                throw ConfigError("overlapping kernel supports are not allowed");
    }

    // tau attainment
    double reach = 0.0;
    for (const auto& term : p.discrete) reach = std::max(reach, term.delay);
    for (const auto& k : p.kernels) reach = std::max(reach, -k.support_lo);
    const bool has_delay_terms = !p.discrete.empty() || !p.kernels.empty();
    if (p.kind == ProblemSpec::Kind::RFDE && has_delay_terms && std::abs(reach - tau) > tol)
        throw ConfigError("max_delay not attained: largest delay term reaches " +
                          std::to_string(reach) + " but max_delay is " + std::to_string(tau));
    if (p.kind == ProblemSpec::Kind::RE && reach < tau - tol)
        warn("RE kernel support does not reach -max_delay; the tail of the state is inert");

    // periodicity sample check, tolerance 1e-10
    if (p.period) {
        const double T = *p.period;
        auto check_periodic = [&](const ScalarFunc& f, double theta, const std::string& what) {
            for (int i = 0; i < 32; ++i) {
                const double t = T * i / 31.0;
                const double d = std::abs(f(t, theta) - f(t + T, theta));
                if (d > 1e-10 * (1.0 + std::abs(f(t, theta))))
                    throw ConfigError("coefficient not periodic with declared period: " + what);
            }
        };
        for (int i = 0; i < p.dim; ++i)
            for (int j = 0; j < p.dim; ++j) check_periodic(p.A.at(i, j), 0.0, "A entry");
        for (const auto& term : p.discrete)
            for (const auto& f : term.B.entries) check_periodic(f, 0.0, "B entry");
        for (const auto& k : p.kernels)
            for (const auto& f : k.entries)
                check_periodic(f, 0.5 * (k.support_lo + k.support_hi), "kernel entry");
    }

    // sampled kernel bound gamma (64 x 64 grid); well-posedness is the user's
    // obligation, the sample is recorded as a warning
    for (const auto& k : p.kernels) {
        const double t_hi = p.period ? *p.period : tau;
        double gamma = 0.0;
        for (int i = 0; i < 64; ++i)
            for (int j = 0; j < 64; ++j) {
                const double t = t_hi * i / 63.0;
                const double th = k.support_lo + (k.support_hi - k.support_lo) * j / 63.0;
                gamma = std::max(gamma, k.eval(t, th).cwiseAbs().maxCoeff());
            }
        warn("kernel bound sampled on a 64x64 grid: gamma = " + std::to_string(gamma));
    }

    return p;
}

Eigen::MatrixXd eval_coeff(const CoeffMatrix& c, double t) {
    Eigen::MatrixXd out(c.dim, c.dim);
    for (int i = 0; i < c.dim; ++i)
        for (int j = 0; j < c.dim; ++j) {
            try {
                out(i, j) = c.at(i, j)(t);
            } catch (const ExprDomainError& e) {
                throw NumericalError("coefficient entry (" + std::to_string(i) + "," +
                                     std::to_string(j) + ") failed at t=" + std::to_string(t) +
                                     ": " + e.what());
            }
        }
    return out;
}

Eigen::MatrixXcd characteristic_matrix(const ProblemSpec& p, std::complex<double> lambda) {
    if (!p.autonomous())
        throw ConfigError("characteristic_matrix requires an autonomous problem");
    const int d = p.dim;
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd delta;
    if (p.kind == ProblemSpec::Kind::RFDE) {
        delta = lambda * I;
        if (!p.A.entries.empty())
            delta -= eval_coeff(p.A, 0.0).cast<std::complex<double>>();
        for (const auto& term : p.discrete) {
            if (term.B.dim != d) throw ConfigError("characteristic_matrix: B dimension mismatch");
            delta -= std::exp(-lambda * term.delay) *
                     eval_coeff(term.B, 0.0).cast<std::complex<double>>();
        }
    } else {
        delta = I;
    }
    if (!p.A.entries.empty() && p.A.dim != d)
        throw ConfigError("characteristic_matrix: A dimension mismatch");
    for (const auto& k : p.kernels) {
        const QuadRule q = clenshaw_curtis(64, k.support_lo, k.support_hi);
        Eigen::MatrixXcd integral = Eigen::MatrixXcd::Zero(d, d);
        for (size_t i = 0; i < q.points.size(); ++i)
            integral += q.weights[i] * std::exp(lambda * q.points[i]) *
                        k.eval(0.0, q.points[i]).cast<std::complex<double>>();
        delta -= integral;
    }
    return delta;
}

}  // namespace delspec
