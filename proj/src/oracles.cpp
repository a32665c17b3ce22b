#include "delspec/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "delspec/grids.hpp"

namespace delspec {

namespace {

using Complex = std::complex<double>;

Complex det_delta(const ProblemSpec& p, Complex lambda) {
    return characteristic_matrix(p, lambda).determinant();
}

bool in_region(Complex z, const RootSearchRegion& r) {
    const double margin =
        1e-9 * (1.0 + std::max(r.re_max - r.re_min, r.im_max - r.im_min));
    return z.real() >= r.re_min - margin && z.real() <= r.re_max + margin &&
           z.imag() >= r.im_min - margin && z.imag() <= r.im_max + margin;
}

}  // namespace

std::vector<Complex> char_roots(const ProblemSpec& raw, const RootSearchRegion& region) {
    if (!(region.re_min < region.re_max) || !(region.im_min < region.im_max))
        throw ConfigError("char_roots: degenerate search region");
    if (region.n_re < 2 || region.n_im < 2)
        throw ConfigError("char_roots: grid start counts must be >= 2");
    const ProblemSpec p = validate(raw);
    const int d = p.dim;

    std::vector<Complex> found;
    for (int i = 0; i < region.n_re; ++i) {
        for (int j = 0; j < region.n_im; ++j) {
            Complex lambda(region.re_min + (region.re_max - region.re_min) * i / (region.n_re - 1),
                           region.im_min + (region.im_max - region.im_min) * j / (region.n_im - 1));
            bool converged = false;
            for (int iter = 0; iter < 80; ++iter) {
                const Complex f = det_delta(p, lambda);
                if (std::abs(f) <= 1e-12 * std::pow(1.0 + std::abs(lambda), d)) {
                    converged = true;
                    break;
                }
                const double delta = 1e-7 * (1.0 + std::abs(lambda));
                const Complex fp =
                    (det_delta(p, lambda + delta) - det_delta(p, lambda - delta)) / (2.0 * delta);
                if (!(std::abs(fp) > 0.0) || !std::isfinite(std::abs(fp))) break;
                const Complex next = lambda - f / fp;
                if (!std::isfinite(next.real()) || !std::isfinite(next.imag()) ||
                    std::abs(next) > 1e8)
                    break;
                lambda = next;
            }
            if (converged && in_region(lambda, region)) found.push_back(lambda);
        }
    }

    // order-independent dedup: canonical sort, then greedy absolute clustering
    std::sort(found.begin(), found.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    std::vector<Complex> roots;
    std::vector<bool> used(found.size(), false);
    for (size_t i = 0; i < found.size(); ++i) {
        if (used[i]) continue;
        Complex sum = 0.0;
        int count = 0;
        for (size_t j = i; j < found.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(found[j] - found[i]) <= 1e-8) {
                sum += found[j];
                ++count;
                used[j] = true;
            }
        }
        roots.push_back(sum / static_cast<double>(count));
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return roots;
}

namespace {

// Initial history block: column d*m+c carries l_m(theta) e_c.
Eigen::MatrixXd history_block(const NodeSet& grid, int d, double theta) {
    const Eigen::VectorXd card = cardinal_values(grid, theta);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d * card.size());
    for (int m = 0; m < card.size(); ++m)
        for (int c = 0; c < d; ++c) out(c, d * m + c) = card[m];
    return out;
}

// All basis columns integrated simultaneously; state per time node is a
// d x d(M+1) block.
class Rk4Dde {
public:
    Rk4Dde(const ProblemSpec& p, double h, const NodeSet& grid, int steps)
        : p_(p), grid_(grid), h_(h), steps_(steps), dt_(h / steps),
          cc_(clenshaw_curtis(32, 0.0, 1.0)) {
        double tau_min = p.max_delay;
        for (const auto& term : p.discrete) tau_min = std::min(tau_min, term.delay);
        if (!p.discrete.empty() && dt_ > tau_min * (1.0 + 1e-12))
            throw ConfigError("monodromy_bruteforce: step h/steps = " + std::to_string(dt_) +
                              " exceeds the smallest discrete delay " + std::to_string(tau_min) +
                              "; increase steps");
        xs_.resize(steps_ + 1);
        fs_.resize(steps_ + 1);
    }

    void run() {
        xs_[0] = history_block(grid_, p_.dim, 0.0);
        completed_ = 0;
        fs_[0] = rhs(0.0, xs_[0]);
        for (int j = 0; j < steps_; ++j) {
            const double t = time_at(j);
            const Eigen::MatrixXd& y = xs_[j];
            const Eigen::MatrixXd k1 = fs_[j];
            const Eigen::MatrixXd k2 = rhs(t + 0.5 * dt_, y + (0.5 * dt_) * k1);
            const Eigen::MatrixXd k3 = rhs(t + 0.5 * dt_, y + (0.5 * dt_) * k2);
            const Eigen::MatrixXd k4 = rhs(t + dt_, y + dt_ * k3);
            xs_[j + 1] = y + (dt_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!xs_[j + 1].allFinite() || xs_[j + 1].cwiseAbs().maxCoeff() > 1e12)
                throw NumericalError("monodromy_bruteforce: integration overflow at steps=" +
                                     std::to_string(steps_));
            completed_ = j + 1;
            // The refreshed node derivative may read its own segment through
            // the memory term; seed it with the k4 stage (O(dt^3) accurate,
            // damped to O(dt^4) by the Hermite weights) before the refresh.
            fs_[j + 1] = k4;
            fs_[j + 1] = rhs(time_at(j + 1), xs_[j + 1]);
        }
    }

    Eigen::MatrixXd value_at(double sigma) const {
        if (sigma <= 0.0) return history_block(grid_, p_.dim, sigma);
        return hermite(sigma);
    }

private:
    const ProblemSpec& p_;
    const NodeSet& grid_;
    double h_;
    int steps_;
    double dt_;
    QuadRule cc_;
    std::vector<Eigen::MatrixXd> xs_, fs_;
    int completed_ = 0;

    double time_at(int j) const { return h_ * j / steps_; }

    Eigen::MatrixXd hermite_segment(int j, double sigma) const {
        const double t0 = time_at(j), t1 = time_at(j + 1);
        const double w = (sigma - t0) / (t1 - t0);
        const double h00 = (1.0 + 2.0 * w) * (1.0 - w) * (1.0 - w);
        const double h10 = w * (1.0 - w) * (1.0 - w);
        const double h01 = w * w * (3.0 - 2.0 * w);
        const double h11 = w * w * (w - 1.0);
        return h00 * xs_[j] + (dt_ * h10) * fs_[j] + h01 * xs_[j + 1] + (dt_ * h11) * fs_[j + 1];
    }

    Eigen::MatrixXd hermite(double sigma) const {
        int j = std::min(static_cast<int>(sigma / dt_), steps_ - 1);
        if (j < 0) j = 0;
        return hermite_segment(j, sigma);
    }

    // Dense lookup during a step. Arguments inside the current, not yet
    // completed stage window (t_completed, t_stage) arise only for
    // distributed kernels with support touching zero; they are resolved by
    // linear interpolation between the last node and the running stage value.
    Eigen::MatrixXd lookup(double sigma, double t_stage, const Eigen::MatrixXd& y_stage) const {
        if (sigma <= 0.0) return history_block(grid_, p_.dim, sigma);
        if (sigma >= t_stage - 1e-12 * dt_) return y_stage;
        const int j = std::min(static_cast<int>(sigma / dt_), steps_ - 1);
        if (j + 1 <= completed_) return hermite_segment(j, sigma);
        const double t_lo = time_at(completed_);
        const double alpha = std::clamp((sigma - t_lo) / (t_stage - t_lo), 0.0, 1.0);
        return (1.0 - alpha) * xs_[completed_] + alpha * y_stage;
    }

    Eigen::MatrixXd rhs(double t, const Eigen::MatrixXd& y) const {
        Eigen::MatrixXd out = eval_coeff(p_.A, t) * y;
        for (const auto& term : p_.discrete)
            out.noalias() += eval_coeff(term.B, t) * lookup(t - term.delay, t, y);
        for (const auto& k : p_.kernels) {
            const double lo = k.support_lo, hi = k.support_hi;
            std::vector<double> bps{lo, hi};
            if (-t > lo + 1e-13 && -t < hi - 1e-13) bps = {lo, -t, hi};
            for (size_t seg = 0; seg + 1 < bps.size(); ++seg) {
                const double len = bps[seg + 1] - bps[seg];
                if (len <= 1e-14) continue;
                for (size_t q = 0; q < cc_.points.size(); ++q) {
                    const double theta =
                        (q == 0) ? bps[seg]
                                 : (q + 1 == cc_.points.size()) ? bps[seg + 1]
                                                                : bps[seg] + cc_.points[q] * len;
                    out.noalias() += (cc_.weights[q] * len) * k.eval(t, theta) *
                                     lookup(t + theta, t, y);
                }
            }
        }
        return out;
    }
};

// RE stepping on the equivalent Volterra form, trapezoidal memory sums with
// the kink split at sigma = 0 and an implicit d x d solve for the
// self-coupling weight.
class VieRe {
public:
    VieRe(const ProblemSpec& p, double h, const NodeSet& grid, int steps)
        : p_(p), grid_(grid), h_(h), steps_(steps), dt_(h / steps) {
        xs_.resize(steps_ + 1);
    }

    void run() {
        const int d = p_.dim;
        const int cols = d * grid_.count();
        const auto& k = p_.kernels.front();
        for (int i = 0; i <= steps_; ++i) {
            const double t = time_at(i);
            Eigen::MatrixXd known = Eigen::MatrixXd::Zero(d, cols);
            Eigen::MatrixXd selfw = Eigen::MatrixXd::Zero(d, d);

            std::vector<double> bps{k.support_lo, k.support_hi};
            if (-t > k.support_lo + 1e-13 && -t < k.support_hi - 1e-13) {
                bps = {k.support_lo, -t, k.support_hi};
            }
            for (size_t seg = 0; seg + 1 < bps.size(); ++seg) {
                const double pl = bps[seg], pr = bps[seg + 1];
                if (pr - pl <= 1e-14) continue;
                const bool history_panel = pr <= -t + 1e-13 * (1.0 + std::abs(t));
                const int npan = std::max(1, static_cast<int>(std::ceil((pr - pl) / dt_ - 1e-9)));
                const double step = (pr - pl) / npan;
                for (int q = 0; q <= npan; ++q) {
                    const double theta = (q == npan) ? pr : pl + q * step;
                    const double w = step * ((q == 0 || q == npan) ? 0.5 : 1.0);
                    const Eigen::MatrixXd C = w * k.eval(t, theta);
                    if (history_panel) {
                        known.noalias() +=
                            C * history_block(grid_, d, std::min(t + theta, 0.0));
                        continue;
                    }
                    const double sigma = std::max(t + theta, 0.0);
                    if (sigma >= t - 1e-12 * dt_) {
                        selfw += C;  // couples to the unknown x(t_i)
                        continue;
                    }
                    const double jf = sigma / dt_;
                    const int j = std::min(static_cast<int>(jf), steps_ - 1);
                    const double alpha = jf - j;
                    if (j + 1 >= i) {
                        known.noalias() += (1.0 - alpha) * (C * xs_[j]);
                        selfw += alpha * C;
                    } else {
                        known.noalias() += C * ((1.0 - alpha) * xs_[j] + alpha * xs_[j + 1]);
                    }
                }
            }
            const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(d, d) - selfw;
            xs_[i] = lhs.partialPivLu().solve(known);
            if (!xs_[i].allFinite() || xs_[i].cwiseAbs().maxCoeff() > 1e12)
                throw NumericalError("monodromy_bruteforce: VIE overflow at steps=" +
                                     std::to_string(steps_));
        }
    }

    Eigen::MatrixXd value_at(double sigma) const {
        if (sigma < 0.0) return history_block(grid_, p_.dim, sigma);
        const double jf = sigma / dt_;
        const int j = std::min(static_cast<int>(jf), steps_ - 1);
        const double alpha = std::clamp(jf - j, 0.0, 1.0);
        return (1.0 - alpha) * xs_[j] + alpha * xs_[j + 1];
    }

private:
    const ProblemSpec& p_;
    const NodeSet& grid_;
    double h_;
    int steps_;
    double dt_;
    std::vector<Eigen::MatrixXd> xs_;

    double time_at(int i) const { return h_ * i / steps_; }
};

}  // namespace

Eigen::MatrixXd monodromy_bruteforce(const ProblemSpec& raw, double h, int M, int steps) {
    const ProblemSpec p = validate(raw);
    if (!(h > 0.0)) throw ConfigError("monodromy_bruteforce: h must be positive");
    if (M < 1) throw ConfigError("monodromy_bruteforce: M must be positive");
    if (steps < 64) throw ConfigError("monodromy_bruteforce: steps must be >= 64");
    const int d = p.dim;
    const NodeSet grid = chebyshev_extrema(M, -p.max_delay, 0.0);
    const int n = d * grid.count();
    Eigen::MatrixXd A(n, n);

    auto restrict_to_grid = [&](const auto& integ) {
        for (int i = 0; i < grid.count(); ++i)
            A.middleRows(d * i, d) = integ.value_at(h + grid.nodes[i]);
    };
    if (p.kind == ProblemSpec::Kind::RFDE) {
        Rk4Dde integ(p, h, grid, steps);
        integ.run();
        restrict_to_grid(integ);
    } else {
        VieRe integ(p, h, grid, steps);
        integ.run();
        restrict_to_grid(integ);
    }
    return A;
}

}  // namespace delspec
