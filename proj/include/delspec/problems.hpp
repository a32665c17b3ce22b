#pragma once

#include <Eigen/Core>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "delspec/expr.hpp"

namespace delspec {

/// One scalar coefficient entry: a parsed expression of t (and theta for
/// kernels) with a constant fast path.
class ScalarFunc {
public:
    ScalarFunc() : ScalarFunc(0.0) {}
    explicit ScalarFunc(double c);
    explicit ScalarFunc(ExprPtr expr);
    static ScalarFunc parse(std::string_view src, bool allow_theta);

    double operator()(double t) const { return (*this)(t, 0.0); }
    double operator()(double t, double theta) const {
        return constant_ ? value_ : expr_->eval(t, theta);
    }

    bool is_constant() const { return constant_; }
    double constant_value() const { return value_; }
    bool uses_t() const { return uses_t_; }
    bool uses_theta() const { return uses_theta_; }
    std::string source() const { return expr_->pretty(); }

private:
    ExprPtr expr_;
    bool constant_ = false;
    bool uses_t_ = false;
    bool uses_theta_ = false;
    double value_ = 0.0;
};

/// d x d grid of scalar time functions.
struct CoeffMatrix {
    int dim = 0;
    std::vector<ScalarFunc> entries;  // row-major

    static CoeffMatrix zero(int d);
    static CoeffMatrix constant(const Eigen::MatrixXd& m);
    const ScalarFunc& at(int i, int j) const { return entries[i * dim + j]; }
    ScalarFunc& at(int i, int j) { return entries[i * dim + j]; }
    bool time_invariant() const;
};

/// d x d grid of scalar functions of (t, theta), supported on a theta
/// sub-interval of [-max_delay, 0]; zero outside the support.
struct KernelMatrix {
    int dim = 0;
    std::vector<ScalarFunc> entries;  // row-major
    double support_lo = 0.0;
    double support_hi = 0.0;

    static KernelMatrix constant(const Eigen::MatrixXd& m, double lo, double hi);
    const ScalarFunc& at(int i, int j) const { return entries[i * dim + j]; }
    ScalarFunc& at(int i, int j) { return entries[i * dim + j]; }
    Eigen::MatrixXd eval(double t, double theta) const;
    bool time_invariant() const;
};

struct DiscreteTerm {
    double delay = 0.0;
    CoeffMatrix B;
};

/// A linear RFDE prototype
///   x'(t) = A(t) x(t) + sum_k B_k(t) x(t - tau_k)
///           + sum_k int C_k(t, theta) x(t + theta) dtheta
/// or a linear RE
///   x(t) = int_{-tau}^0 C(t, theta) x(t + theta) dtheta.
struct ProblemSpec {
    enum class Kind { RFDE, RE };

    Kind kind = Kind::RFDE;
    int dim = 1;
    double max_delay = 1.0;
    CoeffMatrix A;                       // RFDE instantaneous term
    std::vector<DiscreteTerm> discrete;  // RFDE discrete delays, ascending after validate
    std::vector<KernelMatrix> kernels;   // RFDE distributed terms; RE: exactly one
    std::optional<double> period;
    std::string label;

    bool autonomous() const;
};

/// Structural validation: sorts/merges delays (with a warning), rejects
/// dimension mismatches, delays beyond max_delay, overlapping kernel
/// supports, non-periodic coefficients under a declared period. Records the
/// sampled kernel bound gamma as a warning. Idempotent.
ProblemSpec validate(ProblemSpec raw, std::vector<std::string>* warnings = nullptr);

/// Entry-wise evaluation; evaluation errors are annotated with t and the
/// entry index.
Eigen::MatrixXd eval_coeff(const CoeffMatrix& c, double t);

/// Characteristic matrix of the autonomous problem:
///   RFDE: Delta(lambda) = lambda I - A - sum B_k e^{-lambda tau_k}
///                         - sum int C_k(theta) e^{lambda theta} dtheta
///   RE:   Delta(lambda) = I - int C(theta) e^{lambda theta} dtheta
/// with the integrals evaluated by 64-point Clenshaw-Curtis per support.
Eigen::MatrixXcd characteristic_matrix(const ProblemSpec& p, std::complex<double> lambda);

/// Query into a history segment: x_t(theta) = x(t + theta).
struct SegmentQuery {
    double t = 0.0;      // base time in [0, h]
    double theta = 0.0;  // offset in [-tau, 0]
    bool valid(double tau, double h) const {
        const double arg = t + theta;
        return arg >= -tau - 1e-12 * (tau + h) && arg <= h + 1e-12 * (tau + h);
    }
};

}  // namespace delspec
