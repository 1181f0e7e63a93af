#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "example_4_4.hpp"

#include <cmath>

using namespace conegap;
using conegap::testing::example_4_4_scenario;
using conegap::testing::make_zbar;
using conegap::testing::make_zr;
using conegap::testing::vec;

namespace {

PiecewiseControl const_control(double T, const Vec& value) {
    PiecewiseControl c;
    c.nodes = {0.0, T};
    c.values = {value};
    return c;
}

// Independent micro-RK4 for scalar dynamics dx2/dt = 1 + eta(x2)*u with
// u constant, used as the oracle for the drifted coordinate.
double oracle_x2(double u, double T, int steps) {
    auto eta = [](double x2) { return 0.5 * std::sin(M_PI * (x2 - 0.5)) - 0.5; };
    auto rhs = [&](double x2) { return 1.0 + eta(x2) * u; };
    double x2 = 0.0, h = T / steps;
    for (int i = 0; i < steps; ++i) {
        double k1 = rhs(x2);
        double k2 = rhs(x2 + 0.5 * h * k1);
        double k3 = rhs(x2 + 0.5 * h * k2);
        double k4 = rhs(x2 + h * k3);
        x2 += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return x2;
}

}  // namespace

TEST_CASE("strict integration with zero control follows the drift") {
    Scenario sc = example_4_4_scenario();
    StrictProcess p = integrate_strict(sc, 1.0, const_control(1.0, vec({0})));
    CHECK(p.x.back()[0] == doctest::Approx(0.0));
    CHECK(p.x.back()[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.v.back() == doctest::Approx(0.0));
    CHECK(process_cost(sc, p) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("drift-free system stays put under zero control") {
    Scenario sc = example_4_4_scenario();
    sc.f = VectorFieldExpr::parse({"0", "0"});
    StrictProcess p = integrate_strict(sc, 2.0, const_control(2.0, vec({0})));
    CHECK((p.x.back() - sc.x0).norm() == doctest::Approx(0.0));
}

TEST_CASE("strict integration with unit control") {
    Scenario sc = example_4_4_scenario();
    StrictProcess p = integrate_strict(sc, 1.0, const_control(1.0, vec({1})));
    CHECK(p.x.back()[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(p.v.back() == doctest::Approx(1.0));
    double expected = oracle_x2(1.0, 1.0, 4000);
    CHECK(p.x.back()[1] == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("control outside the cone is rejected") {
    Scenario sc = example_4_4_scenario();
    CHECK_THROWS_AS(integrate_strict(sc, 1.0, const_control(1.0, vec({-0.5}))),
                    DomainError);
}

TEST_CASE("extended integration reproduces the reference trajectory") {
    Scenario sc = example_4_4_scenario();
    ExtendedProcess z = make_zbar(sc);
    CHECK(z.y0.back() == doctest::Approx(1.0));
    CHECK(z.y.back()[0] == doctest::Approx(0.0));
    CHECK(z.y.back()[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(z.beta.back() == doctest::Approx(0.0));
    // mid path: (s, 0, s, 0)
    std::size_t mid = z.s.size() / 2;
    CHECK(z.y0[mid] == doctest::Approx(z.s[mid]));
    CHECK(z.y[mid][1] == doctest::Approx(z.s[mid]).epsilon(1e-9));
}

TEST_CASE("the jump family ends at (1, r, 1) with beta = r") {
    Scenario sc = example_4_4_scenario();
    for (double r : {1.0, 0.5, 0.25}) {
        ExtendedProcess z = make_zr(sc, r);
        CHECK(z.y0.back() == doctest::Approx(1.0));
        CHECK(z.y.back()[0] == doctest::Approx(r).epsilon(1e-10));
        CHECK(z.y.back()[1] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(z.beta.back() == doctest::Approx(r));
    }
}

TEST_CASE("simplex violations are rejected") {
    Scenario sc = example_4_4_scenario();
    PiecewiseControl c;
    c.nodes = {0.0, 1.0};
    c.values = {vec({0.6, 0.6})};
    CHECK_THROWS_AS(integrate_extended(sc, 1.0, c), DomainError);
}

TEST_CASE("w = 0 forces w0 = 1: pure time reparameterization") {
    Scenario sc = example_4_4_scenario();
    PiecewiseControl c;
    c.nodes = {0.0, 2.0};
    c.values = {vec({1, 0})};
    ExtendedProcess z = integrate_extended(sc, 2.0, c);
    CHECK(z.y0.back() == doctest::Approx(2.0));
    CHECK(z.beta.back() == doctest::Approx(0.0));
}

TEST_CASE("embedding: zero control is the identity reparameterization") {
    Scenario sc = example_4_4_scenario();
    StrictProcess p = integrate_strict(sc, 1.0, const_control(1.0, vec({0})));
    ExtendedProcess z = embed(sc, p);
    CHECK(z.S == doctest::Approx(1.0));
    for (double w0c : z.w0) CHECK(w0c == doctest::Approx(1.0));
    for (const Vec& wc : z.w) CHECK(wc.norm() == doctest::Approx(0.0));
    ExtendedProcess zbar = make_zbar(sc);
    CHECK(distance_d(z, zbar) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("embedding of unit control halves the clock") {
    Scenario sc = example_4_4_scenario();
    StrictProcess p = integrate_strict(sc, 1.0, const_control(1.0, vec({1})));
    ExtendedProcess z = embed(sc, p);
    CHECK(z.S == doctest::Approx(2.0));
    for (std::size_t j = 0; j < z.w0.size(); ++j) {
        CHECK(z.w0[j] == doctest::Approx(0.5));
        CHECK(z.w[j][0] == doctest::Approx(0.5));
    }
}

TEST_CASE("unembed inverts embed; purely impulsive arcs are rejected") {
    Scenario sc = example_4_4_scenario();
    StrictProcess p = integrate_strict(sc, 1.0, const_control(1.0, vec({0.7})));
    ExtendedProcess z = embed(sc, p);
    StrictProcess back = unembed(sc, z);
    CHECK(back.T == doctest::Approx(p.T));
    double sup = 0.0;
    for (std::size_t j = 0; j < p.x.size(); ++j) sup = std::max(sup, (p.x[j] - back.x[j]).norm());
    CHECK(sup <= 1e-8);
    for (std::size_t j = 0; j < p.u.size(); ++j)
        CHECK((p.u[j] - back.u[j]).norm() <= 1e-10);

    ExtendedProcess zr = make_zr(sc, 0.5);
    CHECK_THROWS_AS(unembed(sc, zr), DomainError);

    // round trip through embed reproduces controls
    ExtendedProcess z2 = embed(sc, back);
    CHECK(distance_d(z, z2) <= 1e-10);
}

TEST_CASE("unembedding the reference process recovers u = 0 on [0,1]") {
    Scenario sc = example_4_4_scenario();
    ExtendedProcess zbar = make_zbar(sc);
    StrictProcess p = unembed(sc, zbar);
    CHECK(p.T == doctest::Approx(1.0));
    for (const Vec& uc : p.u) CHECK(uc.norm() == doctest::Approx(0.0));
}

TEST_CASE("control distance d") {
    Scenario sc = example_4_4_scenario();
    ExtendedProcess zbar = make_zbar(sc);
    CHECK(distance_d(zbar, zbar) == doctest::Approx(0.0));
    for (double r : {1.0, 0.5, 0.25, 0.125}) {
        ExtendedProcess zr = make_zr(sc, r);
        CHECK(distance_d(zr, zbar) == doctest::Approx(r).epsilon(1e-12));
        CHECK(distance_d(zbar, zr) == doctest::Approx(distance_d(zr, zbar)));
    }
}

TEST_CASE("trajectory distance d_inf") {
    Scenario sc = example_4_4_scenario();
    ExtendedProcess zbar = make_zbar(sc);
    CHECK(distance_dinf(zbar, zbar) == doctest::Approx(0.0));
    // d_inf(z_r, zbar) -> 0 as r -> 0 (only the limit is asserted)
    double prev = std::numeric_limits<double>::infinity();
    for (double r : {0.5, 0.25, 0.125, 0.0625}) {
        double v = distance_dinf(make_zr(sc, r), zbar);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev <= 0.2);
}

TEST_CASE("small d implies small d_inf on perturbed controls") {
    Scenario sc = example_4_4_scenario();
    ExtendedProcess zbar = make_zbar(sc);
    Sampler rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        double eps = rng.uniform(0.001, 0.05);
        PiecewiseControl c;
        int cells = 8;
        c.nodes.resize(cells + 1);
        for (int i = 0; i <= cells; ++i) c.nodes[i] = static_cast<double>(i) / cells;
        for (int i = 0; i < cells; ++i) {
            double wv = rng.uniform(0.0, eps);
            c.values.push_back(vec({1.0 - wv, wv}));
        }
        ExtendedProcess z = integrate_extended(sc, 1.0, c);
        double d = distance_d(z, zbar);
        double di = distance_dinf(z, zbar);
        CHECK(d <= 2 * eps + 1e-9);  // |dw0| + |dw| is 2*wv per cell
        // empirical modulus: the flow is 1-Lipschitz-ish in the control here
        CHECK(di <= 5 * d + 1e-6);
    }
}

TEST_CASE("feasibility of the reference and jump processes") {
    Scenario sc = example_4_4_scenario();
    auto fr = is_feasible(sc, make_zbar(sc));
    CHECK(fr.feasible);
    CHECK(fr.energy_slack == doctest::Approx(1.0));

    for (double r : {1.0, 0.5, 0.25}) {
        auto frr = is_feasible(sc, make_zr(sc, r));
        CHECK(frr.feasible);
        CHECK(frr.energy_slack == doctest::Approx(1.0 - r));
    }

    auto bad = is_feasible(sc, make_zr(sc, 1.5));
    CHECK_FALSE(bad.feasible);
    CHECK(bad.target_distance > 0.4);
}

TEST_CASE("cost and feasibility are embedding invariants") {
    Scenario sc = example_4_4_scenario();
    Sampler rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        int cells = rng.uniform_int(1, 6);
        PiecewiseControl c;
        double T = rng.uniform(0.5, 1.5);
        c.nodes.resize(cells + 1);
        for (int i = 0; i <= cells; ++i) c.nodes[i] = T * i / cells;
        for (int i = 0; i < cells; ++i) c.values.push_back(vec({rng.uniform(0.0, 2.0)}));
        StrictProcess p = integrate_strict(sc, T, c, 1e-2);
        ExtendedProcess z = embed(sc, p);
        CHECK(process_cost(sc, p) == doctest::Approx(process_cost(sc, z)).epsilon(1e-8));
        // feasibility agreement: evaluate both gates
        FeasibilityReport fz = is_feasible(sc, z);
        bool strict_feasible =
            set_contains(sc.target,
                         (Vec(3) << p.T, p.x.back()[0], p.x.back()[1]).finished(),
                         sc.tol.membership) &&
            p.v.back() <= sc.K + sc.tol.energy;
        CHECK(fz.feasible == strict_feasible);
    }
}

TEST_CASE("simplex conservation along integrated processes") {
    Scenario sc = example_4_4_scenario();
    Sampler rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        PiecewiseControl c;
        int cells = 5;
        double S = rng.uniform(0.5, 2.0);
        c.nodes.resize(cells + 1);
        for (int i = 0; i <= cells; ++i) c.nodes[i] = S * i / cells;
        for (int i = 0; i < cells; ++i) {
            double wv = rng.uniform(0.0, 1.0);
            c.values.push_back(vec({1.0 - wv, wv}));
        }
        ExtendedProcess z = integrate_extended(sc, S, c);
        for (std::size_t j = 0; j < z.w.size(); ++j)
            CHECK(std::abs(z.w0[j] + z.w[j].norm() - 1.0) <= 1e-12);
        CHECK(z.y0.back() + z.beta.back() == doctest::Approx(S).epsilon(1e-8));
    }
}

TEST_CASE("rk4 order: halving the step gains at least 8x") {
    // u = 0.5 keeps x2 off the eta equilibrium so the path is genuinely
    // nonlinear
    Scenario sc = example_4_4_scenario();
    auto terminal = [&](double h_rel) {
        StrictProcess p = integrate_strict(sc, 1.0, const_control(1.0, vec({0.5})), h_rel);
        return p.x.back();
    };
    Vec ref = terminal(0.05 / 16);
    double e1 = (terminal(0.05) - ref).norm();
    double e2 = (terminal(0.025) - ref).norm();
    CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("neighborhood probe: the reference process finds itself") {
    Scenario sc = example_4_4_scenario();
    sc.integrator.probe_h_max_rel = 2e-2;
    ExtendedProcess zbar = make_zbar(sc);
    ProbeReport rep = strict_neighborhood_probe(sc, zbar, 0.1, 50);
    CHECK(rep.feasible_found);
    CHECK(rep.best_cost == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("neighborhood probe: isolation evidence at z_{1/2}") {
    Scenario sc = example_4_4_scenario();
    sc.integrator.probe_h_max_rel = 2e-2;
    ExtendedProcess zhat = make_zr(sc, 0.5);
    ProbeReport rep = strict_neighborhood_probe(sc, zhat, 0.2, 200);
    CHECK_FALSE(rep.feasible_found);
    CHECK(std::isinf(rep.best_cost));
}

TEST_CASE("probe argument validation") {
    Scenario sc = example_4_4_scenario();
    ExtendedProcess zbar = make_zbar(sc);
    CHECK_THROWS_AS(strict_neighborhood_probe(sc, zbar, 0.1, 0), DomainError);
}
