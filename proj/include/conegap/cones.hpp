#pragma once

#include "conegap/common.hpp"

#include <optional>

namespace conegap {

// Closed convex polyhedral cone. Either representation may be present:
//   V-rep: span+ of `generators` (lines appear as +/- pairs);
//   H-rep: {x : a.x <= 0 for every row a in `halfspaces`} (equalities as
//          +/- pairs).
// Conversions run through facet enumeration and are restricted to dim <= 6.
struct PolyhedralCone {
    int dim = 0;
    std::optional<std::vector<Vec>> generators;
    std::optional<std::vector<Vec>> halfspaces;

    static PolyhedralCone from_generators(std::vector<Vec> gens);
    static PolyhedralCone from_halfspaces(std::vector<Vec> rows, int dim);
    static PolyhedralCone full_space(int dim);
    static PolyhedralCone zero(int dim);
};

// Smallest convex cone containing the inputs. Throws on empty input or
// mixed dimensions.
PolyhedralCone conic_hull(const std::vector<Vec>& vectors);

// Polar cone {p : p.w <= 0 for all w in K}. A V-represented cone polarizes
// to an H-representation (and vice versa) without any enumeration.
PolyhedralCone polar(const PolyhedralCone& K);

// Fill in the missing representation (facet enumeration, dim <= 6).
void ensure_vrep(PolyhedralCone& K);
void ensure_hrep(PolyhedralCone& K);

// Distance from x to K (0 iff member within tolerance). V-rep path uses
// nonnegative least squares; H-rep alone is converted first.
double cone_distance(const PolyhedralCone& K, const Vec& x);
Vec cone_project(const PolyhedralCone& K, const Vec& x);
bool cone_contains(const PolyhedralCone& K, const Vec& x, double tol = kMembershipTol);

// True when K is a linear subspace (every generator's negation stays inside).
bool cone_is_subspace(const PolyhedralCone& K, double tol = kMembershipTol);

struct TransversalityReport {
    bool transversal = false;
    bool strongly_transversal = false;
    // Nonzero lambda with lambda.k1 >= 0 and lambda.k2 <= 0; present exactly
    // when the pair is not transversal.
    std::optional<Vec> separating_functional;
};

TransversalityReport transversality_report(const PolyhedralCone& K1,
                                           const PolyhedralCone& K2);

// Nonzero point of {x : rows_le.x <= 0 componentwise} if one exists
// (coordinate LPs over the unit box). Shared by transversality and the
// multiplier search.
std::optional<Vec> nonzero_cone_point(const std::vector<Vec>& rows_le, int dim);

}  // namespace conegap
