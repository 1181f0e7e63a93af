#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "conegap/cones.hpp"
#include "conegap/nnls.hpp"

#include <cmath>

using namespace conegap;

namespace {

Vec pt(std::initializer_list<double> xs) {
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

PolyhedralCone random_cone(Sampler& rng, int dim) {
    int kind = rng.uniform_int(0, 9);
    if (kind == 0) return PolyhedralCone::zero(dim);
    if (kind == 1) return PolyhedralCone::full_space(dim);
    int count = rng.uniform_int(1, dim + 2);
    std::vector<Vec> gens;
    for (int i = 0; i < count; ++i) gens.push_back(rng.unit_vector(dim));
    if (kind == 2) gens.push_back(-gens[0]);  // throw in a line now and then
    return conic_hull(gens);
}

}  // namespace

TEST_CASE("polar of full space is the origin") {
    PolyhedralCone K = PolyhedralCone::full_space(2);
    ensure_vrep(K);
    PolyhedralCone P = polar(K);
    ensure_hrep(P);
    ensure_vrep(P);
    CHECK(cone_contains(P, pt({0, 0})));
    CHECK_FALSE(cone_contains(P, pt({0.1, 0})));
    CHECK_FALSE(cone_contains(P, pt({0, -0.2})));
}

TEST_CASE("polar of a half-line") {
    PolyhedralCone K = conic_hull({pt({1, 0})});
    PolyhedralCone P = polar(K);
    // {p : p1 <= 0}
    CHECK(cone_contains(P, pt({-1, 5})));
    CHECK(cone_contains(P, pt({0, -3})));
    CHECK_FALSE(cone_contains(P, pt({0.5, 0})));
}

TEST_CASE("polar of the nonnegative orthant is the nonpositive orthant") {
    PolyhedralCone K = conic_hull({pt({1, 0}), pt({0, 1})});
    PolyhedralCone P = polar(K);
    CHECK(cone_contains(P, pt({-1, -2})));
    CHECK_FALSE(cone_contains(P, pt({1e-3, -1})));
    CHECK_FALSE(cone_contains(P, pt({-1, 1e-3})));
}

TEST_CASE("conic hull basics") {
    CHECK_THROWS_AS(conic_hull({}), DomainError);

    PolyhedralCone axis = conic_hull({pt({1, 0}), pt({-1, 0})});
    CHECK(cone_contains(axis, pt({7, 0})));
    CHECK(cone_contains(axis, pt({-3, 0})));
    CHECK_FALSE(cone_contains(axis, pt({0, 0.1})));

    PolyhedralCone orthant = conic_hull({pt({1, 0}), pt({0, 1})});
    CHECK(cone_contains(orthant, pt({2, 3})));
    CHECK_FALSE(cone_contains(orthant, pt({-0.1, 1})));

    PolyhedralCone ray = conic_hull({pt({1, 1})});
    CHECK(cone_contains(ray, pt({2, 2})));
    CHECK_FALSE(cone_contains(ray, pt({2, 1.9})));
}

TEST_CASE("generators scaled by nonnegative scalars remain members") {
    Sampler rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        int dim = rng.uniform_int(2, 4);
        PolyhedralCone K = random_cone(rng, dim);
        ensure_vrep(K);
        for (const Vec& g : *K.generators) {
            for (double a : {0.0, 0.5, 3.0}) {
                CHECK(cone_contains(K, Vec(a * g)));
            }
        }
    }
}

TEST_CASE("V and H representations agree on random points") {
    Sampler rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        int dim = rng.uniform_int(2, 4);
        PolyhedralCone K = random_cone(rng, dim);
        ensure_vrep(K);
        ensure_hrep(K);
        for (int i = 0; i < 40; ++i) {
            Vec x = rng.gaussian(dim);
            bool via_h = true;
            for (const Vec& a : *K.halfspaces)
                if (a.dot(x) > 1e-7 * std::max(1.0, x.norm())) via_h = false;
            double d = 0.0;
            project_onto_conic_hull(*K.generators, x, &d);
            bool via_v = d <= 1e-7 * std::max(1.0, x.norm());
            CHECK(via_h == via_v);
        }
    }
}

TEST_CASE("polar of polar returns the closed convex hull") {
    Sampler rng(13);
    for (int trial = 0; trial < 25; ++trial) {
        int dim = rng.uniform_int(2, 4);
        PolyhedralCone K = random_cone(rng, dim);
        ensure_vrep(K);
        PolyhedralCone PP = polar(polar(K));
        ensure_vrep(PP);
        for (int i = 0; i < 30; ++i) {
            Vec x = rng.gaussian(dim);
            CHECK(cone_contains(K, x, 1e-7) == cone_contains(PP, x, 1e-7));
        }
    }
}

TEST_CASE("transversality of the two axes in R^2") {
    PolyhedralCone K1 = conic_hull({pt({1, 0}), pt({-1, 0})});
    PolyhedralCone K2 = conic_hull({pt({0, 1}), pt({0, -1})});
    auto rep = transversality_report(K1, K2);
    CHECK(rep.transversal);
    CHECK_FALSE(rep.strongly_transversal);
    CHECK_FALSE(rep.separating_functional.has_value());
}

TEST_CASE("identical rays are not transversal and get a certificate") {
    PolyhedralCone K = conic_hull({pt({1, 0})});
    auto rep = transversality_report(K, K);
    CHECK_FALSE(rep.transversal);
    REQUIRE(rep.separating_functional.has_value());
    Vec lam = *rep.separating_functional;
    CHECK(lam.norm() > 0.5);
    CHECK(std::abs(lam[0]) < 1e-7);  // forced onto the e2 axis
}

TEST_CASE("opposed half-planes are linearly separable, not transversal") {
    // K1 - K2 is the upper half-plane, so despite the shared x-axis the pair
    // fails Definition 2.1; e2 separates them.
    PolyhedralCone K1 = PolyhedralCone::from_halfspaces({pt({0, -1})}, 2);  // x2 >= 0
    PolyhedralCone K2 = PolyhedralCone::from_halfspaces({pt({0, 1})}, 2);   // x2 <= 0
    auto rep = transversality_report(K1, K2);
    CHECK_FALSE(rep.transversal);
    CHECK_FALSE(rep.strongly_transversal);
    REQUIRE(rep.separating_functional.has_value());
    Vec lam = *rep.separating_functional;
    CHECK(std::abs(lam[0]) < 1e-7);
    CHECK(lam[1] > 0.5);
}

TEST_CASE("tilted half-planes are strongly transversal") {
    // K1 = {x2 >= 0}, K2 = {x2 >= x1}: K1 - K2 = R^2 and both contain the
    // ray through e2.
    PolyhedralCone K1 = PolyhedralCone::from_halfspaces({pt({0, -1})}, 2);
    PolyhedralCone K2 = PolyhedralCone::from_halfspaces({pt({1, -1})}, 2);
    auto rep = transversality_report(K1, K2);
    CHECK(rep.transversal);
    CHECK(rep.strongly_transversal);
    CHECK_FALSE(rep.separating_functional.has_value());
}

TEST_CASE("dimension mismatch rejected") {
    PolyhedralCone K1 = conic_hull({pt({1, 0})});
    PolyhedralCone K2 = conic_hull({pt({1, 0, 0})});
    CHECK_THROWS_AS(transversality_report(K1, K2), DimensionError);
}

TEST_CASE("duality: transversal XOR separating functional, 200 random pairs") {
    Sampler rng(20250809);
    int checked = 0;
    while (checked < 200) {
        int dim = rng.uniform_int(2, 4);
        PolyhedralCone K1 = random_cone(rng, dim);
        PolyhedralCone K2 = random_cone(rng, dim);
        auto rep = transversality_report(K1, K2);
        CHECK(rep.transversal != rep.separating_functional.has_value());
        if (rep.separating_functional) {
            // verify the certificate against both generator sets
            ensure_vrep(K1);
            ensure_vrep(K2);
            const Vec& lam = *rep.separating_functional;
            for (const Vec& g : *K1.generators) CHECK(lam.dot(g) >= -1e-7);
            for (const Vec& g : *K2.generators) CHECK(lam.dot(g) <= 1e-7);
        } else {
            // transversal: K1 - K2 reaches random targets
            ensure_vrep(K1);
            ensure_vrep(K2);
            std::vector<Vec> cols;
            for (const Vec& g : *K1.generators) cols.push_back(g);
            for (const Vec& g : *K2.generators) cols.push_back(-g);
            for (int i = 0; i < 5; ++i) {
                Vec target = rng.gaussian(dim);
                double dist = 0.0;
                project_onto_conic_hull(cols, target, &dist);
                CHECK(dist <= 1e-6 * std::max(1.0, target.norm()));
            }
        }
        ++checked;
    }
}

TEST_CASE("Prop 2.1 trichotomy on transversal pairs") {
    Sampler rng(31415);
    int transversal_seen = 0;
    int guard = 0;
    while (transversal_seen < 60 && guard++ < 600) {
        int dim = rng.uniform_int(2, 3);
        PolyhedralCone K1 = random_cone(rng, dim);
        PolyhedralCone K2 = random_cone(rng, dim);
        auto rep = transversality_report(K1, K2);
        if (!rep.transversal) continue;
        ++transversal_seen;
        if (!rep.strongly_transversal) {
            // must be complementary linear subspaces
            CHECK(cone_is_subspace(K1));
            CHECK(cone_is_subspace(K2));
            ensure_vrep(K1);
            ensure_vrep(K2);
            Mat B1 = span_basis(*K1.generators, dim);
            Mat B2 = span_basis(*K2.generators, dim);
            CHECK(B1.cols() + B2.cols() == dim);
        }
    }
    CHECK(transversal_seen == 60);
}
