#pragma once

// Shared fixture: the worked two-dimensional scenario with the scalar
// half-line control, fixed final constraint {1} x ([0,1] x {1}), cost
// (x^1 - 1)^2, and unit energy bound.

#include "conegap/process.hpp"

namespace conegap::testing {

inline Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

inline Scenario example_4_4_scenario() {
    Scenario sc;
    sc.n = 2;
    sc.m = 1;
    sc.m1 = 0;
    sc.m2 = 1;
    sc.f = VectorFieldExpr::parse({"0", "1"});
    sc.g = {VectorFieldExpr::parse({"1", "0.5*sin(pi*(x2-0.5))-0.5"})};
    sc.cone = ConeSpec::halfline();
    sc.target = SetDescriptor::product({SetDescriptor::singleton(vec({1})),
                                        SetDescriptor::box(vec({0}), vec({1})),
                                        SetDescriptor::singleton(vec({1}))});
    sc.K = 1.0;
    sc.psi = Expr::parse("(x2-1)^2");
    sc.x0 = vec({0, 0});
    sc.validate();
    return sc;
}

// The embedded reference process: controls (w0, w) = (1, 0) on [0, 1].
inline ExtendedProcess make_zbar(const Scenario& sc) {
    PiecewiseControl c;
    c.nodes = {0.0, 1.0};
    c.values = {vec({1, 0})};
    return integrate_extended(sc, 1.0, c);
}

// The jump family: (1,0) on [0,1], then a pure impulse (0,1) on (1, 1+r].
inline ExtendedProcess make_zr(const Scenario& sc, double r) {
    PiecewiseControl c;
    c.nodes = {0.0, 1.0, 1.0 + r};
    c.values = {vec({1, 0}), vec({0, 1})};
    return integrate_extended(sc, 1.0 + r, c);
}

}  // namespace conegap::testing
