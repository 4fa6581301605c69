#include "dynkin/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <utility>

#include "dynkin/errors.hpp"

namespace dynkin {

namespace detail {

enum class Kind { number, variable, add, sub, mul, div, pow, neg, call };

struct ExprNode {
    Kind kind;
    double value = 0.0;           // number
    std::string fn;               // call
    std::shared_ptr<const ExprNode> a, b;
};

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_num(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::number;
    n->value = v;
    return n;
}

NodePtr make_var() {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::variable;
    return n;
}

bool is_num(const NodePtr& n, double v) {
    return n->kind == Kind::number && n->value == v;
}

NodePtr make_bin(Kind k, NodePtr a, NodePtr b) {
    // Constant folding and the handful of identities that keep derivatives
    // readable; anything fancier is not worth the risk of changing semantics.
    if (a->kind == Kind::number && b->kind == Kind::number) {
        switch (k) {
            case Kind::add: return make_num(a->value + b->value);
            case Kind::sub: return make_num(a->value - b->value);
            case Kind::mul: return make_num(a->value * b->value);
            case Kind::div:
                if (b->value != 0.0) return make_num(a->value / b->value);
                break;
            case Kind::pow: {
                const double r = std::pow(a->value, b->value);
                if (std::isfinite(r)) return make_num(r);
                break;
            }
            default: break;
        }
    }
    switch (k) {
        case Kind::add:
            if (is_num(a, 0.0)) return b;
            if (is_num(b, 0.0)) return a;
            break;
        case Kind::sub:
            if (is_num(b, 0.0)) return a;
            break;
        case Kind::mul:
            if (is_num(a, 0.0) || is_num(b, 0.0)) return make_num(0.0);
            if (is_num(a, 1.0)) return b;
            if (is_num(b, 1.0)) return a;
            break;
        case Kind::div:
            if (is_num(a, 0.0)) return make_num(0.0);
            if (is_num(b, 1.0)) return a;
            break;
        case Kind::pow:
            if (is_num(b, 1.0)) return a;
            if (is_num(b, 0.0)) return make_num(1.0);
            break;
        default: break;
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_neg(NodePtr a) {
    if (a->kind == Kind::number) return make_num(-a->value);
    if (a->kind == Kind::neg) return a->a;
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::neg;
    n->a = std::move(a);
    return n;
}

bool known_fn(const std::string& fn) {
    return fn == "exp" || fn == "log" || fn == "sqrt" || fn == "sin" || fn == "cos" ||
           fn == "sinh" || fn == "cosh" || fn == "tanh" || fn == "abs";
}

NodePtr make_call(const std::string& fn, NodePtr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::call;
    n->fn = fn;
    n->a = std::move(a);
    return n;
}

double eval_node(const ExprNode& n, double x) {
    switch (n.kind) {
        case Kind::number: return n.value;
        case Kind::variable: return x;
        case Kind::add: return eval_node(*n.a, x) + eval_node(*n.b, x);
        case Kind::sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
        case Kind::mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
        case Kind::div: {
            const double d = eval_node(*n.b, x);
            if (d == 0.0) throw EvalError("division by zero at x = " + std::to_string(x));
            return eval_node(*n.a, x) / d;
        }
        case Kind::pow: {
            const double base = eval_node(*n.a, x);
            const double ex = eval_node(*n.b, x);
            const double r = std::pow(base, ex);
            if (std::isnan(r))
                throw EvalError("pow(" + std::to_string(base) + ", " + std::to_string(ex) +
                                ") undefined");
            return r;
        }
        case Kind::neg: return -eval_node(*n.a, x);
        case Kind::call: {
            const double v = eval_node(*n.a, x);
            if (n.fn == "exp") return std::exp(v);
            if (n.fn == "log") {
                if (v <= 0.0) throw EvalError("log of non-positive value " + std::to_string(v));
                return std::log(v);
            }
            if (n.fn == "sqrt") {
                if (v < 0.0) throw EvalError("sqrt of negative value " + std::to_string(v));
                return std::sqrt(v);
            }
            if (n.fn == "sin") return std::sin(v);
            if (n.fn == "cos") return std::cos(v);
            if (n.fn == "sinh") return std::sinh(v);
            if (n.fn == "cosh") return std::cosh(v);
            if (n.fn == "tanh") return std::tanh(v);
            if (n.fn == "abs") return std::abs(v);
            throw EvalError("unknown function " + n.fn);
        }
    }
    throw EvalError("corrupt expression node");
}

NodePtr diff_node(const NodePtr& n);

NodePtr diff_call(const ExprNode& n) {
    const NodePtr& u = n.a;
    const NodePtr du = diff_node(u);
    NodePtr outer;
    if (n.fn == "exp") {
        outer = make_call("exp", u);
    } else if (n.fn == "log") {
        return make_bin(Kind::div, du, u);
    } else if (n.fn == "sqrt") {
        return make_bin(Kind::div, du,
                        make_bin(Kind::mul, make_num(2.0), make_call("sqrt", u)));
    } else if (n.fn == "sin") {
        outer = make_call("cos", u);
    } else if (n.fn == "cos") {
        outer = make_neg(make_call("sin", u));
    } else if (n.fn == "sinh") {
        outer = make_call("cosh", u);
    } else if (n.fn == "cosh") {
        outer = make_call("sinh", u);
    } else if (n.fn == "tanh") {
        // 1 - tanh(u)^2
        outer = make_bin(Kind::sub, make_num(1.0),
                         make_bin(Kind::pow, make_call("tanh", u), make_num(2.0)));
    } else if (n.fn == "abs") {
        throw EvalError("abs is not differentiable; supply analytic derivatives instead");
    } else {
        throw EvalError("unknown function " + n.fn);
    }
    return make_bin(Kind::mul, outer, du);
}

NodePtr diff_node(const NodePtr& n) {
    switch (n->kind) {
        case Kind::number: return make_num(0.0);
        case Kind::variable: return make_num(1.0);
        case Kind::add: return make_bin(Kind::add, diff_node(n->a), diff_node(n->b));
        case Kind::sub: return make_bin(Kind::sub, diff_node(n->a), diff_node(n->b));
        case Kind::mul:
            return make_bin(Kind::add, make_bin(Kind::mul, diff_node(n->a), n->b),
                            make_bin(Kind::mul, n->a, diff_node(n->b)));
        case Kind::div:
            // (a'b - ab') / b^2
            return make_bin(
                Kind::div,
                make_bin(Kind::sub, make_bin(Kind::mul, diff_node(n->a), n->b),
                         make_bin(Kind::mul, n->a, diff_node(n->b))),
                make_bin(Kind::pow, n->b, make_num(2.0)));
        case Kind::pow: {
            if (n->b->kind == Kind::number) {
                // d/dx u^c = c u^(c-1) u'
                const double c = n->b->value;
                return make_bin(
                    Kind::mul, make_num(c),
                    make_bin(Kind::mul, make_bin(Kind::pow, n->a, make_num(c - 1.0)),
                             diff_node(n->a)));
            }
            // General case via u^v = exp(v log u): u^v (v' log u + v u'/u).
            NodePtr term = make_bin(
                Kind::add, make_bin(Kind::mul, diff_node(n->b), make_call("log", n->a)),
                make_bin(Kind::div, make_bin(Kind::mul, n->b, diff_node(n->a)), n->a));
            return make_bin(Kind::mul, make_bin(Kind::pow, n->a, n->b), term);
        }
        case Kind::neg: return make_neg(diff_node(n->a));
        case Kind::call: return diff_call(*n);
    }
    throw EvalError("corrupt expression node");
}

int precedence(Kind k) {
    switch (k) {
        case Kind::add:
        case Kind::sub: return 1;
        case Kind::mul:
        case Kind::div: return 2;
        case Kind::neg: return 3;
        case Kind::pow: return 4;
        default: return 5;
    }
}

void print_node(std::ostream& os, const ExprNode& n, int parent_prec, bool right_side);

void print_child(std::ostream& os, const ExprNode& child, int my_prec, bool right_side) {
    print_node(os, child, my_prec, right_side);
}

void print_node(std::ostream& os, const ExprNode& n, int parent_prec, bool right_side) {
    const int prec = precedence(n.kind);
    // Need parens when binding looser than the context, or equally tight on
    // the side where associativity would regroup (- and / are left-assoc,
    // ^ is right-assoc).
    bool parens = prec < parent_prec || (prec == parent_prec && right_side);
    if (n.kind == Kind::pow && parent_prec == precedence(Kind::pow) && right_side)
        parens = false;  // a^(b^c) prints as a^b^c
    switch (n.kind) {
        case Kind::number: {
            std::ostringstream tmp;
            tmp.precision(17);
            if (n.value < 0.0) {
                tmp << '(' << n.value << ')';
            } else {
                tmp << n.value;
            }
            os << tmp.str();
            return;
        }
        case Kind::variable: os << 'x'; return;
        case Kind::add:
        case Kind::sub:
        case Kind::mul:
        case Kind::div:
        case Kind::pow: {
            if (parens) os << '(';
            const char* op = n.kind == Kind::add   ? " + "
                             : n.kind == Kind::sub ? " - "
                             : n.kind == Kind::mul ? "*"
                             : n.kind == Kind::div ? "/"
                                                   : "^";
            // ^ is right-assoc: left child needs parens at equal precedence.
            print_child(os, *n.a, prec, n.kind == Kind::pow);
            os << op;
            print_child(os, *n.b, prec, n.kind != Kind::pow);
            if (parens) os << ')';
            return;
        }
        case Kind::neg:
            if (parens) os << '(';
            os << '-';
            print_child(os, *n.a, prec, true);
            if (parens) os << ')';
            return;
        case Kind::call:
            os << n.fn << '(';
            print_node(os, *n.a, 0, false);
            os << ')';
            return;
    }
}

bool depends_on_x(const ExprNode& n) {
    switch (n.kind) {
        case Kind::number: return false;
        case Kind::variable: return true;
        case Kind::neg:
        case Kind::call: return depends_on_x(*n.a);
        default: return depends_on_x(*n.a) || depends_on_x(*n.b);
    }
}

// --- recursive-descent parser ------------------------------------------------

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr run() {
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " (column " + std::to_string(pos_ + 1) + ")", pos_ + 1);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr parse_sum() {
        NodePtr left = parse_product();
        for (;;) {
            if (eat('+'))
                left = make_bin(Kind::add, left, parse_product());
            else if (eat('-'))
                left = make_bin(Kind::sub, left, parse_product());
            else
                return left;
        }
    }

    NodePtr parse_product() {
        NodePtr left = parse_unary();
        for (;;) {
            if (eat('*'))
                left = make_bin(Kind::mul, left, parse_unary());
            else if (eat('/'))
                left = make_bin(Kind::div, left, parse_unary());
            else
                return left;
        }
    }

    NodePtr parse_unary() {
        if (eat('-')) return make_neg(parse_unary());
        if (eat('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (eat('^')) {
            // Right-associative, and the exponent admits a leading sign.
            return make_bin(Kind::pow, base, parse_unary());
        }
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("expected operand");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_sum();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const char* begin = text_.data() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return make_num(v);
    }

    NodePtr parse_name() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        if (name == "x") return make_var();
        if (name == "pow") {
            if (!eat('(')) fail("pow requires two arguments");
            NodePtr a = parse_sum();
            if (!eat(',')) fail("pow requires two arguments");
            NodePtr b = parse_sum();
            if (!eat(')')) fail("expected ')'");
            return make_bin(Kind::pow, a, b);
        }
        if (known_fn(name)) {
            if (!eat('(')) {
                pos_ = start;
                fail("function " + name + " requires parentheses");
            }
            NodePtr a = parse_sum();
            if (!eat(')')) fail("expected ')'");
            return make_call(name, a);
        }
        pos_ = start;
        fail("unknown identifier '" + name + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

using detail::ExprNode;
using detail::Kind;

Expression::Expression() : node_(detail::make_num(0.0)) {}
Expression::Expression(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

Expression Expression::parse(std::string_view text) {
    return Expression(detail::Parser(text).run());
}

Expression Expression::constant(double value) { return Expression(detail::make_num(value)); }
Expression Expression::variable() { return Expression(detail::make_var()); }

double Expression::eval(double x) const { return detail::eval_node(*node_, x); }

Expression Expression::derivative() const { return Expression(detail::diff_node(node_)); }

std::string Expression::to_string() const {
    std::ostringstream os;
    detail::print_node(os, *node_, 0, false);
    return os.str();
}

bool Expression::is_constant(double* value) const {
    if (detail::depends_on_x(*node_)) return false;
    if (value) *value = eval(0.0);
    return true;
}

Expression operator+(const Expression& a, const Expression& b) {
    return Expression(detail::make_bin(Kind::add, a.node_, b.node_));
}
Expression operator-(const Expression& a, const Expression& b) {
    return Expression(detail::make_bin(Kind::sub, a.node_, b.node_));
}
Expression operator*(const Expression& a, const Expression& b) {
    return Expression(detail::make_bin(Kind::mul, a.node_, b.node_));
}
Expression operator/(const Expression& a, const Expression& b) {
    return Expression(detail::make_bin(Kind::div, a.node_, b.node_));
}
Expression operator-(const Expression& a) {
    return Expression(detail::make_neg(a.node_));
}
Expression Expression::call(const std::string& fn, const Expression& arg) {
    if (!detail::known_fn(fn)) throw EvalError("unknown function " + fn);
    return Expression(detail::make_call(fn, arg.node_));
}
Expression Expression::pow(const Expression& base, const Expression& exponent) {
    return Expression(detail::make_bin(Kind::pow, base.node_, exponent.node_));
}

}  // namespace dynkin
