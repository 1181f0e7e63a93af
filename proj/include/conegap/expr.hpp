#pragma once

#include "conegap/common.hpp"

#include <memory>

namespace conegap {

// Closed-form scalar expression over variables x1..x99, constants, pi,
// + - * / ^ (integer exponents), sin, cos, exp. Immutable; differentiation
// returns a new Expr, so the class is closed under d/dx_i.
class Expr {
public:
    Expr();  // constant 0

    static Expr constant(double v);
    static Expr pi();
    static Expr variable(int index);  // 1-based
    static Expr parse(const std::string& text);

    double eval(const Vec& x) const;
    Expr derivative(int var_index) const;
    std::string to_string() const;

    int max_var() const;
    bool is_constant() const;
    double constant_value() const;  // valid only when is_constant()

    friend Expr operator+(const Expr&, const Expr&);
    friend Expr operator-(const Expr&, const Expr&);
    friend Expr operator*(const Expr&, const Expr&);
    friend Expr operator/(const Expr&, const Expr&);
    friend Expr operator-(const Expr&);
    friend Expr sin(const Expr&);
    friend Expr cos(const Expr&);
    friend Expr exp(const Expr&);
    friend Expr pow_int(const Expr&, int exponent);

    struct Node;

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr&, const Expr&);
Expr operator-(const Expr&, const Expr&);
Expr operator*(const Expr&, const Expr&);
Expr operator/(const Expr&, const Expr&);
Expr operator-(const Expr&);
Expr sin(const Expr&);
Expr cos(const Expr&);
Expr exp(const Expr&);
Expr pow_int(const Expr&, int exponent);

}  // namespace conegap
