#pragma once

#include "conegap/cones.hpp"

#include <limits>
#include <string>

namespace conegap {

// Target/constraint sets from a closed catalog. Every kind supplies an exact
// distance, a projection, and a closed-form Clarke tangent cone, which is
// what the certificates below are built on.
enum class SetKind { ConvexPolyhedron, Ball, Sphere, Box, Singleton, Product };

struct SetDescriptor {
    SetKind kind = SetKind::Singleton;

    // ConvexPolyhedron: {x : rows[i].x <= rhs[i]}
    std::vector<Vec> rows;
    Vec rhs;
    // Ball / Sphere
    Vec center;
    double radius = 0.0;
    // Box
    Vec lo, hi;
    // Singleton
    Vec point;
    // Product
    std::vector<SetDescriptor> parts;

    // r such that projection is single-valued on {d_S < r}; infinity for the
    // convex kinds, the radius for spheres, min over parts for products.
    // May be overridden (e.g. set to 0 to exercise the cone-invariance path).
    double declared_prox_radius = std::numeric_limits<double>::infinity();

    int dim() const;

    static SetDescriptor polyhedron(std::vector<Vec> rows, Vec rhs);
    static SetDescriptor ball(Vec center, double radius);
    static SetDescriptor sphere(Vec center, double radius);
    static SetDescriptor box(Vec lo, Vec hi);
    static SetDescriptor singleton(Vec point);
    static SetDescriptor product(std::vector<SetDescriptor> parts);
};

struct ProjectionResult {
    std::vector<Vec> points;    // all known nearest points (representatives)
    bool multivalued = false;   // degenerate case flag (e.g. sphere center)
};

double set_distance(const SetDescriptor& S, const Vec& x);
ProjectionResult set_project(const SetDescriptor& S, const Vec& x);
bool set_contains(const SetDescriptor& S, const Vec& x, double tol = kMembershipTol);

// Deterministic sample of points of S (global + near a focus point when
// given). Used by the evidence-style estimators.
std::vector<Vec> sample_points(const SetDescriptor& S, int count, Sampler& rng,
                               const Vec* near = nullptr, double near_radius = 1.0);

// Proximal normal membership eta in N^P_S(xbar) with modulus r: exact via
// convexity when available, otherwise a sampled check of the proximal
// inequality. `witness` (optional) receives a violating point of S.
bool proximal_normal_membership(const SetDescriptor& S, const Vec& xbar,
                                const Vec& eta, double r, int samples,
                                std::uint64_t seed = 20250809,
                                Vec* witness = nullptr);

// Exact Clarke tangent cone (H-representation) for the catalog kinds.
PolyhedralCone clarke_tangent_cone(const SetDescriptor& S, const Vec& xbar);

enum class TangentVerdict { In, Out, Inconclusive };

struct TangentEstimate {
    TangentVerdict verdict = TangentVerdict::Inconclusive;
    double max_ratio = 0.0;
    std::vector<double> ratios;  // one per ladder entry
};

// Sampling estimator of v ∈ T^C_S(xbar) via the distance-quotient
// characterization; three-valued, never a proof.
TangentEstimate clarke_tangent_membership_estimate(const SetDescriptor& S,
                                                   const Vec& xbar, const Vec& v,
                                                   const std::vector<double>& ladder,
                                                   int base_samples,
                                                   std::uint64_t seed = 20250809);

enum class QuasiProxCase { CaseI, CaseII, None };

struct QuasiProxCertificate {
    QuasiProxCase case_ = QuasiProxCase::None;
    std::string evidence;
    std::optional<Vec> witness;  // cone point escaping S (case None)
};

QuasiProxCertificate quasi_prox_regular_certificate(const SetDescriptor& S,
                                                    const Vec& xbar, double delta,
                                                    int samples,
                                                    std::uint64_t seed = 20250809);

enum class QdqVerdict { Supported, Inconclusive };

// Sampled check of the selection bound sup|h(x)|/delta -> 0 over
// B_delta(xbar) ∩ (xbar + T^C), with h = projection displacement.
struct QdqCertificate {
    std::vector<double> delta_ladder;
    std::vector<double> ratios;
    QdqVerdict verdict = QdqVerdict::Inconclusive;
    std::string note;  // records the decay heuristic actually applied
};

QdqCertificate qdq_certificate(const SetDescriptor& S, const Vec& xbar,
                               const std::vector<double>& delta_ladder, int samples,
                               std::uint64_t seed = 20250809);

}  // namespace conegap
