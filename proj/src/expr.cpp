#include "fracsmooth/expr.hpp"

#include "fracsmooth/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace fracsmooth {

namespace {

NodePtr node(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    return std::make_shared<const Node>(Node{op, 0.0, std::move(lhs), std::move(rhs)});
}

bool is_const(const Expr& e, double v) { return e.op() == Op::Const && e.root().value == v; }

bool nodes_equal(const Node* a, const Node* b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->op != b->op) return false;
    if (a->op == Op::Const) return a->value == b->value;
    return nodes_equal(a->lhs.get(), b->lhs.get()) && nodes_equal(a->rhs.get(), b->rhs.get());
}

bool node_is_constant(const Node* n) {
    if (!n) return true;
    if (n->op == Op::VarX || n->op == Op::VarY) return false;
    return node_is_constant(n->lhs.get()) && node_is_constant(n->rhs.get());
}

const char* function_name(Op op) {
    switch (op) {
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Exp: return "exp";
        case Op::Log: return "log";
        case Op::Sqrt: return "sqrt";
        default: return nullptr;
    }
}

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
    return v;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser.

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr run() {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
        Expr e = expr();
        skip_ws();
        if (pos_ != src_.size()) throw ParseError("unexpected character '" + std::string(1, src_[pos_]) + "'", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr expr() {
        Expr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = Expr(node(Op::Add, lhs.ptr(), term().ptr()));
            } else if (accept('-')) {
                lhs = Expr(node(Op::Sub, lhs.ptr(), term().ptr()));
            } else {
                return lhs;
            }
        }
    }

    Expr term() {
        Expr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = Expr(node(Op::Mul, lhs.ptr(), unary().ptr()));
            } else if (accept('/')) {
                lhs = Expr(node(Op::Div, lhs.ptr(), unary().ptr()));
            } else {
                return lhs;
            }
        }
    }

    Expr unary() {
        if (accept('-')) return Expr(node(Op::Neg, unary().ptr()));
        return power();
    }

    Expr power() {
        Expr base = primary();
        skip_ws();
        if (accept('^')) {
            skip_ws();
            const std::size_t at = pos_;
            Expr exponent = unary();
            if (!exponent.is_constant()) throw ParseError("exponent must not depend on x or y", at);
            return Expr(node(Op::Pow, base.ptr(), exponent.ptr()));
        }
        return base;
    }

    Expr primary() {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            Expr inner = expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            const std::string_view id = src_.substr(start, pos_ - start);
            if (id == "x") return Expr::var(Var::X);
            if (id == "y") return Expr::var(Var::Y);
            Op fn;
            if (id == "sin") fn = Op::Sin;
            else if (id == "cos") fn = Op::Cos;
            else if (id == "exp") fn = Op::Exp;
            else if (id == "log") fn = Op::Log;
            else if (id == "sqrt") fn = Op::Sqrt;
            else throw ParseError("unknown identifier '" + std::string(id) + "'", start);
            if (!accept('(')) throw ParseError("expected '(' after " + std::string(id), pos_);
            Expr arg = expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return Expr(node(fn, arg.ptr()));
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    Expr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t n = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) throw ParseError("malformed number", start);
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;
        }
        const std::string text(src_.substr(start, pos_ - start));
        return Expr::constant(std::strtod(text.c_str(), nullptr));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

void print(const Node& n, std::string& out) {
    switch (n.op) {
        case Op::Const: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            // Negative literals only arise from builders; keep them parseable.
            if (n.value < 0 || std::signbit(n.value)) {
                out += "(-";
                std::snprintf(buf, sizeof buf, "%.17g", -n.value);
                out += buf;
                out += ")";
            } else {
                out += buf;
            }
            return;
        }
        case Op::VarX: out += "x"; return;
        case Op::VarY: out += "y"; return;
        case Op::Neg:
            out += "(-";
            print(*n.lhs, out);
            out += ")";
            return;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
        case Op::Pow: {
            const char sym = n.op == Op::Add   ? '+'
                             : n.op == Op::Sub ? '-'
                             : n.op == Op::Mul ? '*'
                             : n.op == Op::Div ? '/'
                                               : '^';
            out += "(";
            print(*n.lhs, out);
            out += sym;
            print(*n.rhs, out);
            out += ")";
            return;
        }
        default:
            out += function_name(n.op);
            out += "(";
            print(*n.lhs, out);
            out += ")";
            return;
    }
}

double eval_node(const Node& n, double x, double y) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::VarX: return x;
        case Op::VarY: return y;
        case Op::Add: return checked(eval_node(*n.lhs, x, y) + eval_node(*n.rhs, x, y), "+");
        case Op::Sub: return checked(eval_node(*n.lhs, x, y) - eval_node(*n.rhs, x, y), "-");
        case Op::Mul: return checked(eval_node(*n.lhs, x, y) * eval_node(*n.rhs, x, y), "*");
        case Op::Div: {
            const double d = eval_node(*n.rhs, x, y);
            if (d == 0.0) throw DomainError("division by zero");
            return checked(eval_node(*n.lhs, x, y) / d, "/");
        }
        case Op::Pow: {
            const double b = eval_node(*n.lhs, x, y);
            const double r = eval_node(*n.rhs, x, y);
            if (b < 0.0 && r != std::floor(r)) throw DomainError("negative base with non-integer exponent");
            if (b == 0.0 && r < 0.0) throw DomainError("zero raised to a negative power");
            return checked(std::pow(b, r), "^");
        }
        case Op::Neg: return -eval_node(*n.lhs, x, y);
        case Op::Sin: return std::sin(eval_node(*n.lhs, x, y));
        case Op::Cos: return std::cos(eval_node(*n.lhs, x, y));
        case Op::Exp: return checked(std::exp(eval_node(*n.lhs, x, y)), "exp");
        case Op::Log: {
            const double a = eval_node(*n.lhs, x, y);
            if (a <= 0.0) throw DomainError("log of a non-positive number");
            return std::log(a);
        }
        case Op::Sqrt: {
            const double a = eval_node(*n.lhs, x, y);
            if (a < 0.0) throw DomainError("sqrt of a negative number");
            return std::sqrt(a);
        }
    }
    throw Error("corrupt expression node");
}

}  // namespace

Expr::Expr() : root_(std::make_shared<const Node>(Node{Op::Const, 0.0, nullptr, nullptr})) {}

Expr::Expr(NodePtr root) : root_(std::move(root)) {
    if (!root_) throw Error("null expression root");
}

Expr Expr::constant(double v) { return Expr(std::make_shared<const Node>(Node{Op::Const, v, nullptr, nullptr})); }

Expr Expr::var(Var v) { return Expr(node(v == Var::X ? Op::VarX : Op::VarY)); }

bool Expr::is_constant() const { return node_is_constant(root_.get()); }

bool operator==(const Expr& a, const Expr& b) { return nodes_equal(a.root_.get(), b.root_.get()); }

Expr make_add(const Expr& a, const Expr& b) {
    if (a.op() == Op::Const && b.op() == Op::Const) return Expr::constant(a.root().value + b.root().value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return Expr(node(Op::Add, a.ptr(), b.ptr()));
}

Expr make_sub(const Expr& a, const Expr& b) {
    if (a.op() == Op::Const && b.op() == Op::Const) return Expr::constant(a.root().value - b.root().value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return make_neg(b);
    return Expr(node(Op::Sub, a.ptr(), b.ptr()));
}

Expr make_mul(const Expr& a, const Expr& b) {
    if (a.op() == Op::Const && b.op() == Op::Const) return Expr::constant(a.root().value * b.root().value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return Expr(node(Op::Mul, a.ptr(), b.ptr()));
}

Expr make_div(const Expr& a, const Expr& b) {
    if (is_const(a, 0.0)) return Expr::constant(0.0);
    if (is_const(b, 1.0)) return a;
    return Expr(node(Op::Div, a.ptr(), b.ptr()));
}

Expr make_pow(const Expr& base, double exponent) {
    if (exponent == 0.0) return Expr::constant(1.0);
    if (exponent == 1.0) return base;
    return Expr(node(Op::Pow, base.ptr(), Expr::constant(exponent).ptr()));
}

Expr make_neg(const Expr& a) {
    if (a.op() == Op::Const) return Expr::constant(-a.root().value);
    if (a.op() == Op::Neg) return Expr(a.root().lhs);
    return Expr(node(Op::Neg, a.ptr()));
}

Expr make_call(Op fn, const Expr& arg) {
    if (!function_name(fn)) throw Error("make_call: not a function op");
    return Expr(node(fn, arg.ptr()));
}

Expr parse(std::string_view source) { return Parser(source).run(); }

std::string to_string(const Expr& e) {
    std::string out;
    print(e.root(), out);
    return out;
}

double eval(const Expr& f, double x, double y) { return eval_node(f.root(), x, y); }

Expr differentiate(const Expr& f, Var v) {
    const Node& n = f.root();
    auto sub = [](const NodePtr& p) { return Expr(p); };
    switch (n.op) {
        case Op::Const: return Expr::constant(0.0);
        case Op::VarX: return Expr::constant(v == Var::X ? 1.0 : 0.0);
        case Op::VarY: return Expr::constant(v == Var::Y ? 1.0 : 0.0);
        case Op::Add: return make_add(differentiate(sub(n.lhs), v), differentiate(sub(n.rhs), v));
        case Op::Sub: return make_sub(differentiate(sub(n.lhs), v), differentiate(sub(n.rhs), v));
        case Op::Mul: {
            const Expr a = sub(n.lhs), b = sub(n.rhs);
            return make_add(make_mul(differentiate(a, v), b), make_mul(a, differentiate(b, v)));
        }
        case Op::Div: {
            const Expr a = sub(n.lhs), b = sub(n.rhs);
            return make_div(make_sub(make_mul(differentiate(a, v), b), make_mul(a, differentiate(b, v))),
                            make_pow(b, 2.0));
        }
        case Op::Pow: {
            const Expr a = sub(n.lhs);
            const double r = eval_node(*n.rhs, 0.0, 0.0);
            return make_mul(make_mul(Expr::constant(r), make_pow(a, r - 1.0)), differentiate(a, v));
        }
        case Op::Neg: return make_neg(differentiate(sub(n.lhs), v));
        case Op::Sin: return make_mul(make_call(Op::Cos, sub(n.lhs)), differentiate(sub(n.lhs), v));
        case Op::Cos: return make_neg(make_mul(make_call(Op::Sin, sub(n.lhs)), differentiate(sub(n.lhs), v)));
        case Op::Exp: return make_mul(f, differentiate(sub(n.lhs), v));
        case Op::Log: return make_div(differentiate(sub(n.lhs), v), sub(n.lhs));
        case Op::Sqrt:
            return make_div(differentiate(sub(n.lhs), v), make_mul(Expr::constant(2.0), f));
    }
    throw Error("corrupt expression node");
}

}  // namespace fracsmooth
