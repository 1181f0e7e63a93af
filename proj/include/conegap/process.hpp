#pragma once

#include "conegap/sets.hpp"
#include "conegap/vector_field.hpp"

namespace conegap {

// Control cone C = R^{m1} x C2 with C2 pointed (no straight line).
struct ConeSpec {
    enum class Kind2 { None, Orthant, HalfLine, Polyhedral };

    int m1 = 0;
    int m2 = 0;
    Kind2 kind2 = Kind2::None;
    std::vector<Vec> gens2;  // Polyhedral only

    static ConeSpec lines_only(int m1);
    static ConeSpec orthant(int m1, int m2);
    static ConeSpec halfline(int m1 = 0);
    static ConeSpec polyhedral(int m1, std::vector<Vec> gens2);

    int m() const { return m1 + m2; }
    bool contains(const Vec& w, double tol = kMembershipTol) const;
    Vec project(const Vec& q) const;
    // max of q.w over {w in C : |w| = 1}; exact via the projection identity,
    // falling back to face enumeration when the projection vanishes.
    double support_on_unit_sphere(const Vec& q, Vec* argmax = nullptr) const;
    // Representative unit directions of C (extreme rays plus seeded fill).
    std::vector<Vec> unit_directions(int samples, Sampler& rng) const;
};

struct IntegratorConfig {
    double h_max_rel = 1e-3;        // RK4 step bound relative to horizon
    double probe_h_max_rel = 1e-2;  // coarser step for neighborhood probes
};

struct ScenarioTolerances {
    double membership = 1e-8;
    double simplex_identity = 1e-10;
    double energy = 1e-9;
    double extremal = 1e-6;
    double transversality = 1e-8;
    double w0_min = 1e-6;
    double nontrivial = 1e-7;
};

// The problem data: dynamics, control cone, target over (t, x), energy
// bound, cost. psi is an expression in x1..x_{n+1} with x1 = final time.
struct Scenario {
    int n = 0, m = 0, m1 = 0, m2 = 0;
    VectorFieldExpr f;
    std::vector<VectorFieldExpr> g;
    ConeSpec cone;
    SetDescriptor target;
    double K = std::numeric_limits<double>::infinity();
    Expr psi;
    Vec x0;
    IntegratorConfig integrator;
    ScenarioTolerances tol;
    std::uint64_t seed = 20250809;
    int max_bracket_length = 3;

    void validate() const;
    double cost(double t, const Vec& x) const;
    Vec psi_gradient(double t, const Vec& x) const;  // dimension 1+n
    Vec drift_rhs(const Vec& x, const Vec& u) const;      // f + sum g_i u^i
    Vec extended_rhs(const Vec& y, double w0, const Vec& w) const;
};

// Piecewise-constant control: values[i] on [nodes[i], nodes[i+1]).
struct PiecewiseControl {
    std::vector<double> nodes;
    std::vector<Vec> values;

    void validate_grid() const;
    Vec value_at(double t) const;
    PiecewiseControl rescaled_to(double new_horizon) const;
};

struct StrictProcess {
    double T = 0;
    std::vector<double> t;   // fine nodes
    std::vector<Vec> u;      // per fine cell
    std::vector<Vec> x;      // per node
    std::vector<double> v;   // per node
};

struct ExtendedProcess {
    double S = 0;
    std::vector<double> s;   // fine nodes
    std::vector<double> w0;  // per fine cell
    std::vector<Vec> w;      // per fine cell
    std::vector<double> y0;  // per node
    std::vector<Vec> y;      // per node
    std::vector<double> beta;

    Vec final_space_time() const;  // (y0(S), y(S))
};

StrictProcess integrate_strict(const Scenario& sc, double T, const PiecewiseControl& u,
                               double h_max_rel = 0.0);

// Extended control values are stacked (w0, w^1..w^m).
ExtendedProcess integrate_extended(const Scenario& sc, double S,
                                   const PiecewiseControl& w0w,
                                   double h_max_rel = 0.0);

// Graph-completion embedding sigma(t) = t + v(t) and its inverse.
ExtendedProcess embed(const Scenario& sc, const StrictProcess& p);
StrictProcess unembed(const Scenario& sc, const ExtendedProcess& z);

double distance_d(const ExtendedProcess& z1, const ExtendedProcess& z2);
double distance_dinf(const ExtendedProcess& z1, const ExtendedProcess& z2);

struct FeasibilityReport {
    bool feasible = false;
    double target_distance = 0.0;
    double energy_slack = 0.0;  // K - beta(S)
};

FeasibilityReport is_feasible(const Scenario& sc, const ExtendedProcess& z);

double process_cost(const Scenario& sc, const ExtendedProcess& z);
double process_cost(const Scenario& sc, const StrictProcess& p);

struct ProbeWitness {
    double S = 0;
    double d = 0;
    double cost = 0;
    bool feasible = false;
};

// Samples embedded strict-sense processes within d-distance r of zhat and
// integrates them. feasible_found = false is evidence of isolation, never a
// certificate: the sampler cannot exhaust the neighborhood.
struct ProbeReport {
    bool feasible_found = false;
    double best_cost = std::numeric_limits<double>::infinity();
    int sampled = 0;
    int feasible_count = 0;
    std::vector<ProbeWitness> witnesses;  // capped
};

ProbeReport strict_neighborhood_probe(const Scenario& sc, const ExtendedProcess& zhat,
                                      double r, int samples);

}  // namespace conegap
