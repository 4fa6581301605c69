#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace dynkin {

namespace detail {
struct ExprNode;
}

/// Immutable arithmetic expression in one variable `x`.
///
/// Grammar: numeric literals, x, + - * / ^ (right-associative power), unary
/// minus, parentheses, and the calls exp, log, sqrt, sin, cos, sinh, cosh,
/// tanh, abs, pow(a, b). Supports exact symbolic differentiation for
/// everything except abs.
class Expression {
public:
    Expression();  // the constant 0

    /// Parses `text`; throws ParseError carrying a 1-based column on failure.
    static Expression parse(std::string_view text);

    static Expression constant(double value);
    static Expression variable();

    /// Evaluates at x; throws EvalError on domain violations (log(-1), 1/0...).
    double eval(double x) const;

    /// Exact derivative with light algebraic simplification. Throws EvalError
    /// for abs, which has no derivative at 0.
    Expression derivative() const;

    /// Round-trippable text form: parse(to_string()) evaluates identically.
    std::string to_string() const;

    /// True when the expression contains no occurrence of x; the folded value
    /// is written to *value when non-null.
    bool is_constant(double* value = nullptr) const;

    friend Expression operator+(const Expression&, const Expression&);
    friend Expression operator-(const Expression&, const Expression&);
    friend Expression operator*(const Expression&, const Expression&);
    friend Expression operator/(const Expression&, const Expression&);
    friend Expression operator-(const Expression&);
    static Expression call(const std::string& fn, const Expression& arg);
    static Expression pow(const Expression& base, const Expression& exponent);

private:
    explicit Expression(std::shared_ptr<const detail::ExprNode> node);
    std::shared_ptr<const detail::ExprNode> node_;
};

}  // namespace dynkin
