#include "conegap/cones.hpp"

#include "conegap/lp.hpp"
#include "conegap/nnls.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>

namespace conegap {

namespace {

constexpr double kSignEps = 1e-9;

void check_common_dim(const std::vector<Vec>& vs) {
    for (std::size_t i = 1; i < vs.size(); ++i)
        if (vs[i].size() != vs[0].size())
            throw DimensionError("vectors of mixed dimension");
}

std::vector<Vec> normalize_dedupe(const std::vector<Vec>& vs) {
    std::vector<Vec> out;
    for (const Vec& v : vs) {
        double n = v.norm();
        if (n < 1e-14) continue;
        Vec u = v / n;
        bool dup = false;
        for (const Vec& w : out)
            if ((u - w).norm() < 1e-10) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(u);
    }
    return out;
}

// Facets of span+(gens) inside its own linear span; the H-representation is
// those facet normals plus +/- pairs for the orthogonal complement of the
// span. Enumerates (d-1)-subsets of generators, so it is meant for low
// dimensions and modest generator counts.
std::vector<Vec> hrep_of_generators(const std::vector<Vec>& gens_in, int dim) {
    std::vector<Vec> gens = normalize_dedupe(gens_in);
    std::vector<Vec> rows;

    Mat W = span_basis(gens, dim);
    const int d = static_cast<int>(W.cols());
    if (d == 0) {  // cone is {0}
        for (int i = 0; i < dim; ++i) {
            Vec e = Vec::Zero(dim);
            e[i] = 1.0;
            rows.push_back(e);
            rows.push_back(-e);
        }
        return rows;
    }

    // Equalities pinning the linear span.
    Eigen::JacobiSVD<Mat> svd(W, Eigen::ComputeFullU);
    Mat U = svd.matrixU();
    for (int c = d; c < dim; ++c) {
        rows.push_back(U.col(c));
        rows.push_back(-U.col(c));
    }

    // Generators in span coordinates.
    std::vector<Vec> gh;
    gh.reserve(gens.size());
    for (const Vec& g : gens) gh.push_back(W.transpose() * g);

    if (d == 1) {
        bool pos = false, neg = false;
        for (const Vec& g : gh) (g[0] > 0 ? pos : neg) = true;
        if (pos && neg) return rows;  // full line
        rows.push_back(pos ? Vec(-W.col(0)) : Vec(W.col(0)));
        return rows;
    }

    const int k = static_cast<int>(gh.size());
    std::vector<int> subset(d - 1);
    std::vector<Vec> facet_rows;
    std::function<void(int, int)> rec = [&](int start, int chosen) {
        if (chosen == d - 1) {
            Mat M(d - 1, d);
            for (int i = 0; i < d - 1; ++i) M.row(i) = gh[subset[i]].transpose();
            Mat ker = kernel_basis(M, 1e-9);
            if (ker.cols() != 1) return;  // subset not of full rank
            Vec nrm = ker.col(0);
            bool le = true, ge = true;
            for (const Vec& g : gh) {
                double s = nrm.dot(g);
                if (s > kSignEps) le = false;
                if (s < -kSignEps) ge = false;
            }
            if (le) facet_rows.push_back(W * nrm);
            else if (ge) facet_rows.push_back(-(W * nrm));
            return;
        }
        for (int i = start; i <= k - (d - 1 - chosen); ++i) {
            subset[chosen] = i;
            rec(i + 1, chosen + 1);
        }
    };
    rec(0, 0);
    for (const Vec& r : normalize_dedupe(facet_rows)) rows.push_back(r);
    return rows;
}

}  // namespace

PolyhedralCone PolyhedralCone::from_generators(std::vector<Vec> gens) {
    if (gens.empty()) throw DomainError("cone requires at least one generator");
    check_common_dim(gens);
    PolyhedralCone K;
    K.dim = static_cast<int>(gens[0].size());
    K.generators = std::move(gens);
    return K;
}

PolyhedralCone PolyhedralCone::from_halfspaces(std::vector<Vec> rows, int dim) {
    check_common_dim(rows);
    if (!rows.empty() && static_cast<int>(rows[0].size()) != dim)
        throw DimensionError("halfspace dimension mismatch");
    PolyhedralCone K;
    K.dim = dim;
    K.halfspaces = std::move(rows);
    return K;
}

PolyhedralCone PolyhedralCone::full_space(int dim) {
    return from_halfspaces({}, dim);
}

PolyhedralCone PolyhedralCone::zero(int dim) {
    std::vector<Vec> rows;
    for (int i = 0; i < dim; ++i) {
        Vec e = Vec::Zero(dim);
        e[i] = 1.0;
        rows.push_back(e);
        rows.push_back(-e);
    }
    PolyhedralCone K = from_halfspaces(std::move(rows), dim);
    K.generators = std::vector<Vec>{Vec::Zero(dim)};
    return K;
}

PolyhedralCone conic_hull(const std::vector<Vec>& vectors) {
    if (vectors.empty()) throw DomainError("conic hull of empty input");
    check_common_dim(vectors);
    const int dim = static_cast<int>(vectors[0].size());
    std::vector<Vec> gens = normalize_dedupe(vectors);
    if (gens.empty()) return PolyhedralCone::zero(dim);
    return PolyhedralCone::from_generators(std::move(gens));
}

PolyhedralCone polar(const PolyhedralCone& K) {
    PolyhedralCone P;
    P.dim = K.dim;
    if (K.generators) {
        // {p : p.g <= 0 for all generators g}
        std::vector<Vec> rows;
        for (const Vec& g : *K.generators)
            if (g.norm() > 1e-14) rows.push_back(g / g.norm());
        P.halfspaces = std::move(rows);
    }
    if (K.halfspaces) {
        // polar of {x : a.x <= 0} is span+ of the normals a
        std::vector<Vec> gens = normalize_dedupe(*K.halfspaces);
        if (gens.empty()) gens.push_back(Vec::Zero(K.dim));
        P.generators = std::move(gens);
    }
    if (!P.generators && !P.halfspaces)
        throw DomainError("cone has no representation");
    return P;
}

void ensure_hrep(PolyhedralCone& K) {
    if (K.halfspaces) return;
    if (!K.generators) throw DomainError("cone has no representation");
    if (K.dim > 6)
        throw UnsupportedKindError("representation conversion limited to dim <= 6");
    K.halfspaces = hrep_of_generators(*K.generators, K.dim);
}

void ensure_vrep(PolyhedralCone& K) {
    if (K.generators) return;
    if (!K.halfspaces) throw DomainError("cone has no representation");
    if (K.dim > 6)
        throw UnsupportedKindError("representation conversion limited to dim <= 6");
    // K = polar(polar(K)); the polar has V-rep = the halfspace normals, and
    // its facet normals generate K.
    std::vector<Vec> polar_gens = normalize_dedupe(*K.halfspaces);
    if (polar_gens.empty()) {
        // no constraints: full space
        std::vector<Vec> gens;
        for (int i = 0; i < K.dim; ++i) {
            Vec e = Vec::Zero(K.dim);
            e[i] = 1.0;
            gens.push_back(e);
            gens.push_back(-e);
        }
        K.generators = std::move(gens);
        return;
    }
    // K = polar(polar K): the facet normals of span+(halfspace rows)
    // generate K (Farkas).
    std::vector<Vec> gens = hrep_of_generators(polar_gens, K.dim);
    if (gens.empty()) gens.push_back(Vec::Zero(K.dim));  // polar is full space -> K = {0}
    K.generators = normalize_dedupe(gens);
    if (K.generators->empty()) K.generators = std::vector<Vec>{Vec::Zero(K.dim)};
}

double cone_distance(const PolyhedralCone& K, const Vec& x) {
    if (x.size() != K.dim) throw DimensionError("point dimension mismatch");
    PolyhedralCone tmp = K;
    ensure_vrep(tmp);
    double d = 0.0;
    project_onto_conic_hull(*tmp.generators, x, &d);
    return d;
}

Vec cone_project(const PolyhedralCone& K, const Vec& x) {
    if (x.size() != K.dim) throw DimensionError("point dimension mismatch");
    PolyhedralCone tmp = K;
    ensure_vrep(tmp);
    return project_onto_conic_hull(*tmp.generators, x, nullptr);
}

bool cone_contains(const PolyhedralCone& K, const Vec& x, double tol) {
    if (x.size() != K.dim) throw DimensionError("point dimension mismatch");
    if (K.halfspaces) {
        double scale = std::max(1.0, x.norm());
        for (const Vec& a : *K.halfspaces)
            if (a.dot(x) > tol * scale) return false;
        return true;
    }
    return cone_distance(K, x) <= tol * std::max(1.0, x.norm());
}

bool cone_is_subspace(const PolyhedralCone& K, double tol) {
    PolyhedralCone tmp = K;
    ensure_vrep(tmp);
    for (const Vec& g : *tmp.generators)
        if (!cone_contains(tmp, Vec(-g), tol)) return false;
    return true;
}

std::optional<Vec> nonzero_cone_point(const std::vector<Vec>& rows_le, int dim) {
    // Cone F = {x : rows.x <= 0}. F != {0} iff some coordinate LP over the
    // unit box has a strictly positive optimum.
    const int mi = static_cast<int>(rows_le.size());
    Mat A(mi + 2 * dim, dim);
    Vec b(mi + 2 * dim);
    for (int r = 0; r < mi; ++r) {
        A.row(r) = rows_le[r].transpose();
        b[r] = 0.0;
    }
    for (int i = 0; i < dim; ++i) {
        A.row(mi + 2 * i).setZero();
        A(mi + 2 * i, i) = 1.0;
        b[mi + 2 * i] = 1.0;
        A.row(mi + 2 * i + 1).setZero();
        A(mi + 2 * i + 1, i) = -1.0;
        b[mi + 2 * i + 1] = 1.0;
    }
    Mat E(0, dim);
    Vec d(0);
    for (int i = 0; i < dim; ++i) {
        for (double sgn : {1.0, -1.0}) {
            Vec c = Vec::Zero(dim);
            c[i] = sgn;
            LpResult res = solve_lp(c, A, b, E, d);
            if (res.status == LpStatus::Optimal && res.objective > 1e-7) {
                return res.x / res.x.norm();
            }
        }
    }
    return std::nullopt;
}

TransversalityReport transversality_report(const PolyhedralCone& K1_in,
                                           const PolyhedralCone& K2_in) {
    if (K1_in.dim != K2_in.dim)
        throw DimensionError("transversality requires cones of equal dimension");
    PolyhedralCone K1 = K1_in, K2 = K2_in;
    ensure_vrep(K1);
    ensure_vrep(K2);
    const int n = K1.dim;

    TransversalityReport rep;

    // Not transversal iff (-K1polar ∩ K2polar) \ {0} is nonempty: a nonzero
    // lambda with lambda.k1 >= 0 and lambda.k2 <= 0.
    std::vector<Vec> rows;
    for (const Vec& g : *K1.generators)
        if (g.norm() > 1e-14) rows.push_back(-g);
    for (const Vec& g : *K2.generators)
        if (g.norm() > 1e-14) rows.push_back(g);
    if (auto lambda = nonzero_cone_point(rows, n)) {
        rep.transversal = false;
        rep.strongly_transversal = false;
        rep.separating_functional = *lambda;
        return rep;
    }
    rep.transversal = true;

    // Strong transversality: a common nonzero ray.
    PolyhedralCone H1 = K1, H2 = K2;
    ensure_hrep(H1);
    ensure_hrep(H2);
    std::vector<Vec> irows = *H1.halfspaces;
    irows.insert(irows.end(), H2.halfspaces->begin(), H2.halfspaces->end());
    rep.strongly_transversal = nonzero_cone_point(irows, n).has_value();
    return rep;
}

}  // namespace conegap
