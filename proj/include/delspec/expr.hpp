#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "delspec/errors.hpp"

namespace delspec {

class CoeffExpr;
using ExprPtr = std::shared_ptr<const CoeffExpr>;

/// Parsed arithmetic expression over the variables `t` and `theta`.
///
/// Grammar: numbers, + - * / ^ (right-associative, binds tighter than unary
/// minus), parentheses, functions sin cos exp abs sqrt, constants pi e.
class CoeffExpr {
public:
    enum class Kind {
        Number, ConstPi, ConstE, VarT, VarTheta,
        Add, Sub, Mul, Div, Pow, Neg,
        Sin, Cos, Exp, Abs, Sqrt
    };

    CoeffExpr(Kind kind, double number, ExprPtr lhs, ExprPtr rhs)
        : kind_(kind), number_(number), lhs_(std::move(lhs)), rhs_(std::move(rhs)) {}

    Kind kind() const { return kind_; }

    /// Evaluate at (t, theta). Throws ExprDomainError on division by zero,
    /// sqrt of a negative number, or a non-finite result.
    double eval(double t, double theta) const;

    bool uses_t() const;
    bool uses_theta() const;

    /// Render with minimal parentheses; parse(pretty()) reproduces the tree.
    std::string pretty() const;

    static ExprPtr number(double v);

private:
    Kind kind_;
    double number_;
    ExprPtr lhs_, rhs_;

    void pretty_to(std::string& out) const;
    int precedence() const;
};

/// Parse an expression. Unknown identifiers and syntax errors raise
/// ConfigError with the byte offset and the expected-token set.
/// `allow_t` / `allow_theta` restrict the variables admitted at parse time.
ExprPtr parse_expr(std::string_view src, bool allow_t = true, bool allow_theta = true);

}  // namespace delspec
