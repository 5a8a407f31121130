#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "errors.hpp"

namespace cfode {

// Small expression language over variables t (and optionally u) with
// + - * / ^, unary minus and sin, cos, exp, log, sqrt. Used for
// user-supplied forcings f(t), F(t) and nonlinearities phi(t, u).

namespace expr_detail {

enum class NodeKind { Number, VarT, VarU, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Func { Sin, Cos, Exp, Log, Sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    double number = 0.0;     // Number
    Func func = Func::Sin;   // Call
    NodePtr lhs;             // binary lhs / unary operand / call argument
    NodePtr rhs;             // binary rhs
};

inline NodePtr make_number(double v) {
    return std::make_shared<Node>(Node{NodeKind::Number, v});
}

inline bool is_number(const NodePtr& e, double v) {
    return e->kind == NodeKind::Number && e->number == v;
}

}  // namespace expr_detail

/// Immutable parsed expression.
class Expr {
public:
    explicit Expr(expr_detail::NodePtr root) : root_(std::move(root)) {}

    const expr_detail::Node& node() const { return *root_; }
    const expr_detail::NodePtr& ptr() const { return root_; }

    bool references_u() const { return references_u(root_); }

private:
    static bool references_u(const expr_detail::NodePtr& n) {
        if (!n) return false;
        if (n->kind == expr_detail::NodeKind::VarU) return true;
        return references_u(n->lhs) || references_u(n->rhs);
    }

    expr_detail::NodePtr root_;
};

namespace expr_detail {

class Parser {
public:
    Parser(std::string_view src, bool allow_u) : src_(src), allow_u_(allow_u) {}

    NodePtr run() {
        if (src_.empty())
            throw SyntaxError("empty expression", 0);
        NodePtr e = parse_expr(0);
        skip_ws();
        if (pos_ != src_.size())
            throw SyntaxError("unexpected trailing input", pos_);
        return e;
    }

private:
    static constexpr int kMaxDepth = 512;

    std::string_view src_;
    bool allow_u_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() &&
               std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    std::optional<char> peek() {
        skip_ws();
        if (pos_ >= src_.size()) return std::nullopt;
        return src_[pos_];
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void check_depth(int depth) {
        if (depth > kMaxDepth)
            throw SyntaxError("expression nested too deeply", pos_);
    }

    NodePtr parse_expr(int depth) {
        check_depth(depth);
        NodePtr e = parse_term(depth + 1);
        for (;;) {
            if (consume('+'))
                e = std::make_shared<Node>(Node{NodeKind::Add, 0, Func::Sin, e,
                                                parse_term(depth + 1)});
            else if (consume('-'))
                e = std::make_shared<Node>(Node{NodeKind::Sub, 0, Func::Sin, e,
                                                parse_term(depth + 1)});
            else
                return e;
        }
    }

    NodePtr parse_term(int depth) {
        check_depth(depth);
        NodePtr e = parse_factor(depth + 1);
        for (;;) {
            if (consume('*'))
                e = std::make_shared<Node>(Node{NodeKind::Mul, 0, Func::Sin, e,
                                                parse_factor(depth + 1)});
            else if (consume('/'))
                e = std::make_shared<Node>(Node{NodeKind::Div, 0, Func::Sin, e,
                                                parse_factor(depth + 1)});
            else
                return e;
        }
    }

    NodePtr parse_factor(int depth) {
        check_depth(depth);
        if (consume('-'))
            return std::make_shared<Node>(
                Node{NodeKind::Neg, 0, Func::Sin, parse_factor(depth + 1)});
        return parse_power(depth + 1);
    }

    // '^' is right-associative and binds tighter than unary minus; the
    // exponent is a factor, so 2^-t parses.
    NodePtr parse_power(int depth) {
        check_depth(depth);
        NodePtr base = parse_atom(depth + 1);
        if (consume('^'))
            return std::make_shared<Node>(Node{NodeKind::Pow, 0, Func::Sin, base,
                                               parse_factor(depth + 1)});
        return base;
    }

    NodePtr parse_atom(int depth) {
        check_depth(depth);
        auto c = peek();
        if (!c)
            throw SyntaxError("unexpected end of input", pos_);
        if (*c == '(') {
            ++pos_;
            NodePtr e = parse_expr(depth + 1);
            if (!consume(')'))
                throw SyntaxError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(*c)) || *c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(*c)) || *c == '_')
            return parse_ident(depth);
        throw SyntaxError(std::string("unexpected character '") + *c + "'", pos_);
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        double value = 0.0;
        auto [end, ec] = std::from_chars(src_.data() + pos_,
                                         src_.data() + src_.size(), value);
        if (ec != std::errc() || !std::isfinite(value))
            throw SyntaxError("malformed number", start);
        pos_ = static_cast<std::size_t>(end - src_.data());
        return make_number(value);
    }

    NodePtr parse_ident(int depth) {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_'))
            ++pos_;
        const std::string name(src_.substr(start, pos_ - start));
        if (peek() == '(') {
            Func f;
            if (name == "sin") f = Func::Sin;
            else if (name == "cos") f = Func::Cos;
            else if (name == "exp") f = Func::Exp;
            else if (name == "log") f = Func::Log;
            else if (name == "sqrt") f = Func::Sqrt;
            else
                throw UnknownIdentifier("unknown function '" + name + "'", start);
            ++pos_;  // '('
            NodePtr arg = parse_expr(depth + 1);
            if (!consume(')'))
                throw SyntaxError("expected ')'", pos_);
            return std::make_shared<Node>(Node{NodeKind::Call, 0, f, arg});
        }
        if (name == "t")
            return std::make_shared<Node>(Node{NodeKind::VarT});
        if (name == "u") {
            if (!allow_u_)
                throw UnknownIdentifier("'u' is not allowed in this context", start);
            return std::make_shared<Node>(Node{NodeKind::VarU});
        }
        throw UnknownIdentifier("unknown identifier '" + name + "'", start);
    }
};

inline double eval_node(const Node& n, double t, const double* u) {
    auto finite = [](double v) -> double {
        if (!std::isfinite(v))
            throw EvalDomainError("evaluation produced a non-finite value");
        return v;
    };
    switch (n.kind) {
        case NodeKind::Number: return n.number;
        case NodeKind::VarT: return t;
        case NodeKind::VarU:
            if (!u)
                throw MissingVariable("expression references u but no u given");
            return *u;
        case NodeKind::Add:
            return finite(eval_node(*n.lhs, t, u) + eval_node(*n.rhs, t, u));
        case NodeKind::Sub:
            return finite(eval_node(*n.lhs, t, u) - eval_node(*n.rhs, t, u));
        case NodeKind::Mul:
            return finite(eval_node(*n.lhs, t, u) * eval_node(*n.rhs, t, u));
        case NodeKind::Div: {
            const double a = eval_node(*n.lhs, t, u);
            const double b = eval_node(*n.rhs, t, u);
            if (b == 0.0)
                throw EvalDomainError("division by zero");
            return finite(a / b);
        }
        case NodeKind::Pow: {
            const double a = eval_node(*n.lhs, t, u);
            const double b = eval_node(*n.rhs, t, u);
            return finite(std::pow(a, b));
        }
        case NodeKind::Neg: return -eval_node(*n.lhs, t, u);
        case NodeKind::Call: {
            const double a = eval_node(*n.lhs, t, u);
            switch (n.func) {
                case Func::Sin: return std::sin(a);
                case Func::Cos: return std::cos(a);
                case Func::Exp: return finite(std::exp(a));
                case Func::Log:
                    if (a <= 0.0)
                        throw EvalDomainError("log of non-positive argument");
                    return std::log(a);
                case Func::Sqrt:
                    if (a < 0.0)
                        throw EvalDomainError("sqrt of negative argument");
                    return std::sqrt(a);
            }
            throw EvalDomainError("unknown function");
        }
    }
    throw EvalDomainError("malformed expression tree");
}

// -- simplifying constructors (constant folding and 0/1 identities) ------

inline NodePtr mk_add(NodePtr a, NodePtr b) {
    if (a->kind == NodeKind::Number && b->kind == NodeKind::Number)
        return make_number(a->number + b->number);
    if (is_number(a, 0.0)) return b;
    if (is_number(b, 0.0)) return a;
    return std::make_shared<Node>(Node{NodeKind::Add, 0, Func::Sin, a, b});
}

inline NodePtr mk_sub(NodePtr a, NodePtr b) {
    if (a->kind == NodeKind::Number && b->kind == NodeKind::Number)
        return make_number(a->number - b->number);
    if (is_number(b, 0.0)) return a;
    if (is_number(a, 0.0))
        return std::make_shared<Node>(Node{NodeKind::Neg, 0, Func::Sin, b});
    return std::make_shared<Node>(Node{NodeKind::Sub, 0, Func::Sin, a, b});
}

inline NodePtr mk_mul(NodePtr a, NodePtr b) {
    if (a->kind == NodeKind::Number && b->kind == NodeKind::Number)
        return make_number(a->number * b->number);
    if (is_number(a, 0.0) || is_number(b, 0.0)) return make_number(0.0);
    if (is_number(a, 1.0)) return b;
    if (is_number(b, 1.0)) return a;
    return std::make_shared<Node>(Node{NodeKind::Mul, 0, Func::Sin, a, b});
}

inline NodePtr mk_div(NodePtr a, NodePtr b) {
    if (is_number(a, 0.0) && !is_number(b, 0.0)) return make_number(0.0);
    if (is_number(b, 1.0)) return a;
    if (a->kind == NodeKind::Number && b->kind == NodeKind::Number &&
        b->number != 0.0)
        return make_number(a->number / b->number);
    return std::make_shared<Node>(Node{NodeKind::Div, 0, Func::Sin, a, b});
}

inline NodePtr mk_pow(NodePtr a, NodePtr b) {
    if (is_number(b, 1.0)) return a;
    if (is_number(b, 0.0)) return make_number(1.0);
    return std::make_shared<Node>(Node{NodeKind::Pow, 0, Func::Sin, a, b});
}

inline NodePtr mk_neg(NodePtr a) {
    if (a->kind == NodeKind::Number) return make_number(-a->number);
    return std::make_shared<Node>(Node{NodeKind::Neg, 0, Func::Sin, a});
}

inline NodePtr mk_call(Func f, NodePtr a) {
    return std::make_shared<Node>(Node{NodeKind::Call, 0, f, a});
}

inline bool is_constant(const NodePtr& n) {
    if (!n) return true;
    if (n->kind == NodeKind::VarT || n->kind == NodeKind::VarU) return false;
    return is_constant(n->lhs) && is_constant(n->rhs);
}

inline NodePtr diff_node(const NodePtr& n, bool wrt_u) {
    switch (n->kind) {
        case NodeKind::Number: return make_number(0.0);
        case NodeKind::VarT: return make_number(wrt_u ? 0.0 : 1.0);
        case NodeKind::VarU: return make_number(wrt_u ? 1.0 : 0.0);
        case NodeKind::Add:
            return mk_add(diff_node(n->lhs, wrt_u), diff_node(n->rhs, wrt_u));
        case NodeKind::Sub:
            return mk_sub(diff_node(n->lhs, wrt_u), diff_node(n->rhs, wrt_u));
        case NodeKind::Mul:
            return mk_add(mk_mul(diff_node(n->lhs, wrt_u), n->rhs),
                          mk_mul(n->lhs, diff_node(n->rhs, wrt_u)));
        case NodeKind::Div:
            return mk_div(mk_sub(mk_mul(diff_node(n->lhs, wrt_u), n->rhs),
                                 mk_mul(n->lhs, diff_node(n->rhs, wrt_u))),
                          mk_pow(n->rhs, make_number(2.0)));
        case NodeKind::Pow: {
            if (!is_constant(n->rhs))
                throw UnsupportedDifferentiation(
                    "cannot differentiate a power with non-constant exponent");
            const double c = eval_node(*n->rhs, 0.0, nullptr);
            // d(f^c) = c f^{c-1} f'
            return mk_mul(mk_mul(make_number(c),
                                 mk_pow(n->lhs, make_number(c - 1.0))),
                          diff_node(n->lhs, wrt_u));
        }
        case NodeKind::Neg: return mk_neg(diff_node(n->lhs, wrt_u));
        case NodeKind::Call: {
            const NodePtr da = diff_node(n->lhs, wrt_u);
            switch (n->func) {
                case Func::Sin: return mk_mul(mk_call(Func::Cos, n->lhs), da);
                case Func::Cos:
                    return mk_mul(mk_neg(mk_call(Func::Sin, n->lhs)), da);
                case Func::Exp: return mk_mul(mk_call(Func::Exp, n->lhs), da);
                case Func::Log: return mk_div(da, n->lhs);
                case Func::Sqrt:
                    return mk_div(da, mk_mul(make_number(2.0),
                                             mk_call(Func::Sqrt, n->lhs)));
            }
            throw UnsupportedDifferentiation("unknown function");
        }
    }
    throw UnsupportedDifferentiation("malformed expression tree");
}

inline void print_node(const NodePtr& n, std::string& out) {
    switch (n->kind) {
        case NodeKind::Number: {
            char buf[32];
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, n->number);
            out.append(buf, p);
            return;
        }
        case NodeKind::VarT: out += 't'; return;
        case NodeKind::VarU: out += 'u'; return;
        case NodeKind::Neg:
            out += "(-";
            print_node(n->lhs, out);
            out += ')';
            return;
        case NodeKind::Call: {
            static constexpr const char* names[] = {"sin", "cos", "exp", "log",
                                                    "sqrt"};
            out += names[static_cast<int>(n->func)];
            out += '(';
            print_node(n->lhs, out);
            out += ')';
            return;
        }
        default: {
            char op = '?';
            switch (n->kind) {
                case NodeKind::Add: op = '+'; break;
                case NodeKind::Sub: op = '-'; break;
                case NodeKind::Mul: op = '*'; break;
                case NodeKind::Div: op = '/'; break;
                case NodeKind::Pow: op = '^'; break;
                default: break;
            }
            out += '(';
            print_node(n->lhs, out);
            out += op;
            print_node(n->rhs, out);
            out += ')';
            return;
        }
    }
}

}  // namespace expr_detail

/// Parse with standard precedence (^ > unary minus > * / > + -),
/// right-associative ^, whitespace-insensitive. When allow_u is false,
/// 'u' is rejected as an unknown identifier (forcing context).
inline Expr parse(std::string_view src, bool allow_u = true) {
    return Expr(expr_detail::Parser(src, allow_u).run());
}

inline double eval(const Expr& e, double t) {
    if (e.references_u())
        throw MissingVariable("expression references u but no u given");
    return expr_detail::eval_node(e.node(), t, nullptr);
}

inline double eval(const Expr& e, double t, double u) {
    return expr_detail::eval_node(e.node(), t, &u);
}

/// Exact symbolic derivative with respect to 't' or 'u'; simplified only
/// by constant folding and 0/1 identities.
inline Expr differentiate(const Expr& e, char var) {
    if (var != 't' && var != 'u')
        throw Error("differentiate: variable must be 't' or 'u'");
    return Expr(expr_detail::diff_node(e.ptr(), var == 'u'));
}

/// Canonical fully parenthesized rendering, used for tests and manifests.
inline std::string to_string(const Expr& e) {
    std::string out;
    expr_detail::print_node(e.ptr(), out);
    return out;
}

}  // namespace cfode
