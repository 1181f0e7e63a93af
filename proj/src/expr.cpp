#include "conegap/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace conegap {

struct Expr::Node {
    enum Kind { Const, Pi, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };
    Kind kind;
    double value = 0.0;
    int var = 0;       // 1-based, Kind::Var
    int exponent = 0;  // Kind::Pow
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Kind = Expr::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_const(double v) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Kind::Const;
    n->value = v;
    return n;
}

bool is_const(const NodePtr& n, double v) {
    return n->kind == Kind::Const && n->value == v;
}

NodePtr fold_add(NodePtr a, NodePtr b) {
    if (a->kind == Kind::Const && b->kind == Kind::Const)
        return make_const(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return make(Kind::Add, std::move(a), std::move(b));
}

NodePtr fold_neg(NodePtr a) {
    if (a->kind == Kind::Const) return make_const(-a->value);
    if (a->kind == Kind::Neg) return a->a;
    return make(Kind::Neg, std::move(a));
}

NodePtr fold_sub(NodePtr a, NodePtr b) {
    if (a->kind == Kind::Const && b->kind == Kind::Const)
        return make_const(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return fold_neg(std::move(b));
    return make(Kind::Sub, std::move(a), std::move(b));
}

NodePtr fold_mul(NodePtr a, NodePtr b) {
    if (a->kind == Kind::Const && b->kind == Kind::Const)
        return make_const(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return make(Kind::Mul, std::move(a), std::move(b));
}

NodePtr fold_div(NodePtr a, NodePtr b) {
    if (a->kind == Kind::Const && b->kind == Kind::Const && b->value != 0.0)
        return make_const(a->value / b->value);
    if (is_const(b, 1.0)) return a;
    return make(Kind::Div, std::move(a), std::move(b));
}

NodePtr fold_pow(NodePtr base, int k) {
    if (k == 0) return make_const(1.0);
    if (k == 1) return base;
    if (base->kind == Kind::Const) return make_const(std::pow(base->value, k));
    auto n = std::make_shared<Expr::Node>();
    n->kind = Kind::Pow;
    n->a = std::move(base);
    n->exponent = k;
    return n;
}

NodePtr fold_fn(Kind k, NodePtr a) {
    if (a->kind == Kind::Const) {
        switch (k) {
            case Kind::Sin: return make_const(std::sin(a->value));
            case Kind::Cos: return make_const(std::cos(a->value));
            case Kind::Exp: return make_const(std::exp(a->value));
            default: break;
        }
    }
    return make(k, std::move(a));
}

double eval_node(const Expr::Node* n, const Vec& x) {
    switch (n->kind) {
        case Kind::Const: return n->value;
        case Kind::Pi: return std::numbers::pi;
        case Kind::Var:
            if (n->var > x.size())
                throw DomainError("variable x" + std::to_string(n->var) +
                                  " out of range for point of dimension " +
                                  std::to_string(x.size()));
            return x[n->var - 1];
        case Kind::Add: return eval_node(n->a.get(), x) + eval_node(n->b.get(), x);
        case Kind::Sub: return eval_node(n->a.get(), x) - eval_node(n->b.get(), x);
        case Kind::Mul: return eval_node(n->a.get(), x) * eval_node(n->b.get(), x);
        case Kind::Div: {
            double den = eval_node(n->b.get(), x);
            if (den == 0.0) throw DomainError("division by zero");
            return eval_node(n->a.get(), x) / den;
        }
        case Kind::Pow: {
            double base = eval_node(n->a.get(), x);
            if (base == 0.0 && n->exponent < 0)
                throw DomainError("zero raised to negative exponent");
            return std::pow(base, n->exponent);
        }
        case Kind::Neg: return -eval_node(n->a.get(), x);
        case Kind::Sin: return std::sin(eval_node(n->a.get(), x));
        case Kind::Cos: return std::cos(eval_node(n->a.get(), x));
        case Kind::Exp: return std::exp(eval_node(n->a.get(), x));
    }
    throw DomainError("corrupt expression node");
}

NodePtr diff_node(const NodePtr& n, int v);

NodePtr diff_node(const NodePtr& n, int v) {
    switch (n->kind) {
        case Kind::Const:
        case Kind::Pi: return make_const(0.0);
        case Kind::Var: return make_const(n->var == v ? 1.0 : 0.0);
        case Kind::Add: return fold_add(diff_node(n->a, v), diff_node(n->b, v));
        case Kind::Sub: return fold_sub(diff_node(n->a, v), diff_node(n->b, v));
        case Kind::Mul:
            return fold_add(fold_mul(diff_node(n->a, v), n->b),
                            fold_mul(n->a, diff_node(n->b, v)));
        case Kind::Div:
            return fold_div(
                fold_sub(fold_mul(diff_node(n->a, v), n->b),
                         fold_mul(n->a, diff_node(n->b, v))),
                fold_pow(n->b, 2));
        case Kind::Pow:
            return fold_mul(
                fold_mul(make_const(static_cast<double>(n->exponent)),
                         fold_pow(n->a, n->exponent - 1)),
                diff_node(n->a, v));
        case Kind::Neg: return fold_neg(diff_node(n->a, v));
        case Kind::Sin: return fold_mul(fold_fn(Kind::Cos, n->a), diff_node(n->a, v));
        case Kind::Cos:
            return fold_neg(fold_mul(fold_fn(Kind::Sin, n->a), diff_node(n->a, v)));
        case Kind::Exp: return fold_mul(fold_fn(Kind::Exp, n->a), diff_node(n->a, v));
    }
    throw DomainError("corrupt expression node");
}

int max_var_node(const Expr::Node* n) {
    switch (n->kind) {
        case Kind::Const:
        case Kind::Pi: return 0;
        case Kind::Var: return n->var;
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
        case Kind::Div:
            return std::max(max_var_node(n->a.get()), max_var_node(n->b.get()));
        default: return max_var_node(n->a.get());
    }
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Precedence: 1 add/sub, 2 mul/div, 3 unary minus, 4 pow, 5 atom.
int precedence(const Expr::Node* n) {
    switch (n->kind) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        case Kind::Const: return n->value < 0 ? 3 : 5;
        default: return 5;
    }
}

std::string print_node(const Expr::Node* n, int parent_prec) {
    std::string s;
    switch (n->kind) {
        case Kind::Const: s = fmt_double(n->value); break;
        case Kind::Pi: s = "pi"; break;
        case Kind::Var: s = "x" + std::to_string(n->var); break;
        case Kind::Add:
            s = print_node(n->a.get(), 1) + "+" + print_node(n->b.get(), 2);
            break;
        case Kind::Sub:
            s = print_node(n->a.get(), 1) + "-" + print_node(n->b.get(), 2);
            break;
        case Kind::Mul:
            s = print_node(n->a.get(), 2) + "*" + print_node(n->b.get(), 3);
            break;
        case Kind::Div:
            s = print_node(n->a.get(), 2) + "/" + print_node(n->b.get(), 3);
            break;
        case Kind::Neg: s = "-" + print_node(n->a.get(), 3); break;
        case Kind::Pow:
            s = print_node(n->a.get(), 5) + "^" + std::to_string(n->exponent);
            break;
        case Kind::Sin: s = "sin(" + print_node(n->a.get(), 0) + ")"; break;
        case Kind::Cos: s = "cos(" + print_node(n->a.get(), 0) + ")"; break;
        case Kind::Exp: s = "exp(" + print_node(n->a.get(), 0) + ")"; break;
    }
    if (precedence(n) < parent_prec) return "(" + s + ")";
    return s;
}

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr parse() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ < text_.size())
            throw ParseError(pos_, "unexpected trailing input");
        return e;
    }

private:
    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            skip_ws();
            if (match('+')) {
                lhs = fold_add(lhs, parse_term());
            } else if (match('-')) {
                lhs = fold_sub(lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_factor();
        for (;;) {
            skip_ws();
            if (match('*')) {
                lhs = fold_mul(lhs, parse_factor());
            } else if (match('/')) {
                lhs = fold_div(lhs, parse_factor());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_factor() {
        skip_ws();
        if (match('-')) return fold_neg(parse_factor());
        if (match('+')) return parse_factor();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        skip_ws();
        if (match('^')) {
            skip_ws();
            bool neg = match('-');
            skip_ws();
            std::size_t start = pos_;
            long k = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                k = 10 * k + (text_[pos_] - '0');
                ++pos_;
            }
            if (pos_ == start) throw ParseError(pos_, "integer exponent expected");
            return fold_pow(base, static_cast<int>(neg ? -k : k));
        }
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError(pos_, "expression expected");
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            skip_ws();
            if (!match(')')) throw ParseError(pos_, "')' expected");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        throw ParseError(pos_, "expression expected");
    }

    NodePtr parse_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = save;
            }
        }
        try {
            return make_const(std::stod(text_.substr(start, pos_ - start)));
        } catch (const std::exception&) {
            throw ParseError(start, "malformed number");
        }
    }

    NodePtr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               std::isalnum(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        std::string word = text_.substr(start, pos_ - start);
        if (word == "pi") return make(Kind::Pi);
        if (word == "sin" || word == "cos" || word == "exp") {
            skip_ws();
            if (!match('(')) throw ParseError(pos_, "'(' expected after " + word);
            NodePtr arg = parse_expr();
            skip_ws();
            if (!match(')')) throw ParseError(pos_, "')' expected");
            if (word == "sin") return fold_fn(Kind::Sin, arg);
            if (word == "cos") return fold_fn(Kind::Cos, arg);
            return fold_fn(Kind::Exp, arg);
        }
        if (word.size() >= 2 && word[0] == 'x') {
            int idx = 0;
            bool digits = true;
            for (std::size_t i = 1; i < word.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(word[i]))) {
                    digits = false;
                    break;
                }
                idx = 10 * idx + (word[i] - '0');
            }
            if (digits && idx >= 1 && idx <= 99) {
                auto n = std::make_shared<Expr::Node>();
                n->kind = Kind::Var;
                n->var = idx;
                return n;
            }
        }
        throw ParseError(start, "unknown identifier '" + word + "'");
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool match(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr::Expr() : node_(make_const(0.0)) {}

Expr Expr::constant(double v) { return Expr(make_const(v)); }
Expr Expr::pi() { return Expr(make(Kind::Pi)); }

Expr Expr::variable(int index) {
    if (index < 1 || index > 99)
        throw DomainError("variable index out of range: " + std::to_string(index));
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->var = index;
    return Expr(std::move(n));
}

Expr Expr::parse(const std::string& text) { return Expr(Parser(text).parse()); }

double Expr::eval(const Vec& x) const { return eval_node(node_.get(), x); }

Expr Expr::derivative(int var_index) const {
    return Expr(diff_node(node_, var_index));
}

std::string Expr::to_string() const { return print_node(node_.get(), 0); }

int Expr::max_var() const { return max_var_node(node_.get()); }

bool Expr::is_constant() const { return node_->kind == Kind::Const; }

double Expr::constant_value() const { return node_->value; }

Expr operator+(const Expr& a, const Expr& b) { return Expr(fold_add(a.node_, b.node_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(fold_sub(a.node_, b.node_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(fold_mul(a.node_, b.node_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(fold_div(a.node_, b.node_)); }
Expr operator-(const Expr& a) { return Expr(fold_neg(a.node_)); }
Expr sin(const Expr& a) { return Expr(fold_fn(Kind::Sin, a.node_)); }
Expr cos(const Expr& a) { return Expr(fold_fn(Kind::Cos, a.node_)); }
Expr exp(const Expr& a) { return Expr(fold_fn(Kind::Exp, a.node_)); }
Expr pow_int(const Expr& a, int exponent) { return Expr(fold_pow(a.node_, exponent)); }

}  // namespace conegap
