#include "delspec/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace delspec {

double CoeffExpr::eval(double t, double theta) const {
    using K = Kind;
    double v = 0.0;
    switch (kind_) {
        case K::Number:   v = number_; break;
        case K::ConstPi:  v = M_PI; break;
        case K::ConstE:   v = M_E; break;
        case K::VarT:     v = t; break;
        case K::VarTheta: v = theta; break;
        case K::Add: v = lhs_->eval(t, theta) + rhs_->eval(t, theta); break;
        case K::Sub: v = lhs_->eval(t, theta) - rhs_->eval(t, theta); break;
        case K::Mul: v = lhs_->eval(t, theta) * rhs_->eval(t, theta); break;
        case K::Div: {
            const double den = rhs_->eval(t, theta);
            if (den == 0.0)
                throw ExprDomainError("division by zero in expression '" + pretty() + "'");
            v = lhs_->eval(t, theta) / den;
            break;
        }
        case K::Pow: v = std::pow(lhs_->eval(t, theta), rhs_->eval(t, theta)); break;
        case K::Neg: v = -lhs_->eval(t, theta); break;
        case K::Sin: v = std::sin(lhs_->eval(t, theta)); break;
        case K::Cos: v = std::cos(lhs_->eval(t, theta)); break;
        case K::Exp: v = std::exp(lhs_->eval(t, theta)); break;
        case K::Abs: v = std::abs(lhs_->eval(t, theta)); break;
        case K::Sqrt: {
            const double arg = lhs_->eval(t, theta);
            if (arg < 0.0)
                throw ExprDomainError("sqrt of negative value in expression '" + pretty() + "'");
            v = std::sqrt(arg);
            break;
        }
    }
    if (!std::isfinite(v))
        throw ExprDomainError("non-finite value from expression '" + pretty() + "'");
    return v;
}

bool CoeffExpr::uses_t() const {
    if (kind_ == Kind::VarT) return true;
    if (lhs_ && lhs_->uses_t()) return true;
    if (rhs_ && rhs_->uses_t()) return true;
    return false;
}

bool CoeffExpr::uses_theta() const {
    if (kind_ == Kind::VarTheta) return true;
    if (lhs_ && lhs_->uses_theta()) return true;
    if (rhs_ && rhs_->uses_theta()) return true;
    return false;
}

ExprPtr CoeffExpr::number(double v) {
    return std::make_shared<CoeffExpr>(Kind::Number, v, nullptr, nullptr);
}

// Precedence levels: + - (1) < * / (2) < unary - (3) < ^ (4) < atoms (5).
int CoeffExpr::precedence() const {
    switch (kind_) {
        case Kind::Add: case Kind::Sub: return 1;
        case Kind::Mul: case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default: return 5;
    }
}

namespace {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void CoeffExpr::pretty_to(std::string& out) const {
    const auto child = [&out](const CoeffExpr& c, bool parens) {
        if (parens) out += '(';
        c.pretty_to(out);
        if (parens) out += ')';
    };
    switch (kind_) {
        case Kind::Number:   out += format_number(number_); return;
        case Kind::ConstPi:  out += "pi"; return;
        case Kind::ConstE:   out += "e"; return;
        case Kind::VarT:     out += "t"; return;
        case Kind::VarTheta: out += "theta"; return;
        case Kind::Add:
            child(*lhs_, lhs_->precedence() < 1);
            out += " + ";
            child(*rhs_, rhs_->precedence() < 1);
            return;
        case Kind::Sub:
            child(*lhs_, lhs_->precedence() < 1);
            out += " - ";
            child(*rhs_, rhs_->precedence() <= 1);
            return;
        case Kind::Mul:
            child(*lhs_, lhs_->precedence() < 2);
            out += " * ";
            child(*rhs_, rhs_->precedence() < 2);
            return;
        case Kind::Div:
            child(*lhs_, lhs_->precedence() < 2);
            out += " / ";
            child(*rhs_, rhs_->precedence() <= 2);
            return;
        case Kind::Neg:
            out += '-';
            child(*lhs_, lhs_->precedence() < 3);
            return;
        case Kind::Pow:
            child(*lhs_, lhs_->precedence() <= 4);
            out += '^';
            child(*rhs_, rhs_->precedence() < 3);  // exponent is a unary-level operand
            return;
        case Kind::Sin: out += "sin("; lhs_->pretty_to(out); out += ')'; return;
        case Kind::Cos: out += "cos("; lhs_->pretty_to(out); out += ')'; return;
        case Kind::Exp: out += "exp("; lhs_->pretty_to(out); out += ')'; return;
        case Kind::Abs: out += "abs("; lhs_->pretty_to(out); out += ')'; return;
        case Kind::Sqrt: out += "sqrt("; lhs_->pretty_to(out); out += ')'; return;
    }
}

std::string CoeffExpr::pretty() const {
    std::string out;
    pretty_to(out);
    return out;
}

namespace {

using K = CoeffExpr::Kind;

ExprPtr mk(K kind, ExprPtr lhs = nullptr, ExprPtr rhs = nullptr) {
    return std::make_shared<CoeffExpr>(kind, 0.0, std::move(lhs), std::move(rhs));
}

class Parser {
public:
    Parser(std::string_view src, bool allow_t, bool allow_theta)
        : src_(src), allow_t_(allow_t), allow_theta_(allow_theta) {}

    ExprPtr run() {
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ != src_.size()) fail("end of input or an operator (+ - * / ^)");
        return e;
    }

private:
    std::string_view src_;
    bool allow_t_, allow_theta_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& expected) const {
        throw ConfigError("expression syntax error at offset " + std::to_string(pos_) +
                          ": expected " + expected);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    ExprPtr parse_sum() {
        ExprPtr e = parse_term();
        for (;;) {
            if (eat('+')) e = mk(K::Add, e, parse_term());
            else if (eat('-')) e = mk(K::Sub, e, parse_term());
            else return e;
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_unary();
        for (;;) {
            if (eat('*')) e = mk(K::Mul, e, parse_unary());
            else if (eat('/')) e = mk(K::Div, e, parse_unary());
            else return e;
        }
    }

    ExprPtr parse_unary() {
        if (eat('-')) return mk(K::Neg, parse_unary());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        if (eat('^')) return mk(K::Pow, base, parse_unary());  // right-assoc
        return base;
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("a number, identifier or '('");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_sum();
            if (!eat(')')) fail("')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail("a number, identifier or '('");
    }

    ExprPtr parse_number() {
        const std::string tail(src_.substr(pos_));
        char* end = nullptr;
        const double v = std::strtod(tail.c_str(), &end);
        if (end == tail.c_str()) fail("a number");
        pos_ += static_cast<size_t>(end - tail.c_str());
        return CoeffExpr::number(v);
    }

    ExprPtr parse_ident() {
        const size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name(src_.substr(start, pos_ - start));
        if (name == "pi") return mk(K::ConstPi);
        if (name == "e") return mk(K::ConstE);
        if (name == "t") {
            if (!allow_t_)
                throw ConfigError("variable 't' not allowed in this expression (offset " +
                                  std::to_string(start) + ")");
            return mk(K::VarT);
        }
        if (name == "theta") {
            if (!allow_theta_)
                throw ConfigError("variable 'theta' not allowed in this expression (offset " +
                                  std::to_string(start) + ")");
            return mk(K::VarTheta);
        }
        K fn;
        if (name == "sin") fn = K::Sin;
        else if (name == "cos") fn = K::Cos;
        else if (name == "exp") fn = K::Exp;
        else if (name == "abs") fn = K::Abs;
        else if (name == "sqrt") fn = K::Sqrt;
        else
            throw ConfigError("unknown identifier '" + name + "' at offset " +
                              std::to_string(start) +
                              " (expected t, theta, pi, e, sin, cos, exp, abs, sqrt)");
        if (!eat('(')) fail("'(' after function name '" + name + "'");
        ExprPtr arg = parse_sum();
        if (!eat(')')) fail("')'");
        return mk(fn, arg);
    }
};

}  // namespace

ExprPtr parse_expr(std::string_view src, bool allow_t, bool allow_theta) {
    return Parser(src, allow_t, allow_theta).run();
}

}  // namespace delspec
