#pragma once

#include "conegap/brackets.hpp"
#include "conegap/process.hpp"

namespace conegap {

// Adjoint/multiplier tuple (p0, p, pi, lambda). p_path holds p on the
// process's fine grid once filled (terminal value = p_terminal).
struct MultiplierSet {
    double p0 = 0.0;
    Vec p_terminal;
    double pi = 0.0;
    double lambda = 0.0;
    std::vector<Vec> p_path;
};

double hamiltonian(const Scenario& sc, const Vec& x, const Vec& p, double p0,
                   double pi, double w0, const Vec& w);

struct HamiltonianMax {
    double value = 0.0;
    double w0 = 1.0;
    Vec w;
};

// Maximum of H over the compact slice {(w0, w) : w0 + |w| = 1, w in C}.
// The impulse branch is resolved exactly through the cone projection
// identity; the drift vertex is (1, 0).
HamiltonianMax max_hamiltonian(const Scenario& sc, const Vec& x, const Vec& p,
                               double p0, double pi);

// Backward RK4 for dp/ds = -(Df w0 + sum Dg_i w^i)^T p on the process grid,
// states Hermite-interpolated inside cells. Returns p at every node.
std::vector<Vec> integrate_adjoint(const Scenario& sc, const ExtendedProcess& z,
                                   const Vec& p_terminal);

struct ConditionReport {
    std::string id;
    std::string description;
    double residual = 0.0;
    double tolerance = 0.0;
    bool applicable = true;
    bool pass = true;
};

struct ExtremalityReport {
    std::vector<ConditionReport> conditions;
    bool overall_pass = false;
    bool boundary_energy_case = false;  // beta(S) within tolerance of K
    double beta_final = 0.0;
    double y0_final = 0.0;

    const ConditionReport* find(const std::string& id) const;
};

// Evaluates Definition-5.3 style conditions (i)-(vi) along the process.
// K_cone is the approximating cone to the target at the final point,
// typically clarke_tangent_cone(target, final).
ExtremalityReport check_extremal(const Scenario& sc, const ExtendedProcess& z,
                                 const MultiplierSet& M, const PolyhedralCone& K_cone);

enum class Classification { Normal, Abnormal, Inconclusive, NoMultipliers };

struct SearchConfig {
    int node_subsample = 160;
    int direction_refinement = 24;
    int max_cut_rounds = 4;
    double ray_tol = 1e-7;
    double box_rest = 1e6;  // coordinate box for the lambda-positive branch
};

struct SearchResult {
    Classification classification = Classification::NoMultipliers;
    bool lambda0_feasible = false;
    bool lambda1_feasible = false;
    std::vector<MultiplierSet> rays;  // every entry passes check_extremal
    bool used_grid_fallback = false;
    std::string notes;
};

// Linear-feasibility search for multipliers: p(s) = Phi(s) p(S) turns the
// conditions into a homogeneous cone in (p0, p(S), pi, lambda); the two
// branches lambda = 0 / lambda > 0 are probed by coordinate LPs, and a dense
// sphere grid backs the LP up when it fails numerically.
SearchResult search_multipliers(const Scenario& sc, const ExtendedProcess& z,
                                const PolyhedralCone& K_cone,
                                const SearchConfig& config = {});

std::string to_string(Classification c);

}  // namespace conegap
