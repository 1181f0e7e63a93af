#include "conegap/sets.hpp"

#include "conegap/nnls.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <functional>

namespace conegap {

namespace {

constexpr double kActiveTol = 1e-9;

Vec unit(const Vec& v) { return v / v.norm(); }

// Minimum-norm correction onto the affine set {a_i.y = b_i, i in subset}.
std::optional<Vec> project_onto_equalities(const std::vector<Vec>& rows, const Vec& rhs,
                                           const std::vector<int>& subset, const Vec& x) {
    const int t = static_cast<int>(subset.size());
    const int n = static_cast<int>(x.size());
    Mat A(t, n);
    Vec b(t);
    for (int i = 0; i < t; ++i) {
        A.row(i) = rows[subset[i]].transpose();
        b[i] = rhs[subset[i]];
    }
    Mat AAT = A * A.transpose();
    Eigen::ColPivHouseholderQR<Mat> qr(AAT);
    if (qr.rank() < t) return std::nullopt;  // dependent subset; a smaller one covers it
    Vec u = qr.solve(A * x - b);
    return Vec(x - A.transpose() * u);
}

bool polyhedron_feasible(const std::vector<Vec>& rows, const Vec& rhs, const Vec& y,
                         double tol) {
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].dot(y) > rhs[static_cast<int>(i)] + tol) return false;
    return true;
}

Vec polyhedron_project(const std::vector<Vec>& rows, const Vec& rhs, const Vec& x) {
    if (polyhedron_feasible(rows, rhs, x, kActiveTol)) return x;
    const int k = static_cast<int>(rows.size());
    const int n = static_cast<int>(x.size());
    if (k > 16)
        throw UnsupportedKindError("polyhedron projection limited to 16 constraints");

    std::optional<Vec> best;
    double best_d = std::numeric_limits<double>::infinity();
    std::vector<int> subset;
    std::function<void(int)> rec = [&](int start) {
        if (!subset.empty()) {
            if (auto y = project_onto_equalities(rows, rhs, subset, x)) {
                if (polyhedron_feasible(rows, rhs, *y, 1e-8)) {
                    double d = (*y - x).norm();
                    if (d < best_d) {
                        best_d = d;
                        best = *y;
                    }
                }
            }
        }
        if (static_cast<int>(subset.size()) >= std::min(k, n)) return;
        for (int i = start; i < k; ++i) {
            subset.push_back(i);
            rec(i + 1);
            subset.pop_back();
        }
    };
    rec(0);
    if (!best) throw DomainError("polyhedron is empty");
    return *best;
}

void append_block(std::vector<Vec>& rows, const Vec& small, int offset, int total) {
    Vec big = Vec::Zero(total);
    big.segment(offset, small.size()) = small;
    rows.push_back(big);
}

}  // namespace

int SetDescriptor::dim() const {
    switch (kind) {
        case SetKind::ConvexPolyhedron: return static_cast<int>(rows.empty() ? rhs.size() : rows[0].size());
        case SetKind::Ball:
        case SetKind::Sphere: return static_cast<int>(center.size());
        case SetKind::Box: return static_cast<int>(lo.size());
        case SetKind::Singleton: return static_cast<int>(point.size());
        case SetKind::Product: {
            int d = 0;
            for (const auto& p : parts) d += p.dim();
            return d;
        }
    }
    return 0;
}

SetDescriptor SetDescriptor::polyhedron(std::vector<Vec> rows_in, Vec rhs_in) {
    if (rows_in.empty()) throw DomainError("polyhedron requires at least one halfspace");
    if (static_cast<int>(rows_in.size()) != rhs_in.size())
        throw DimensionError("halfspace count does not match rhs");
    SetDescriptor S;
    S.kind = SetKind::ConvexPolyhedron;
    S.rows = std::move(rows_in);
    S.rhs = std::move(rhs_in);
    // nonemptiness: the projection search throws if no candidate is feasible
    polyhedron_project(S.rows, S.rhs, Vec::Zero(S.rows[0].size()));
    return S;
}

SetDescriptor SetDescriptor::ball(Vec center, double radius) {
    if (radius < 0) throw DomainError("negative radius");
    SetDescriptor S;
    S.kind = SetKind::Ball;
    S.center = std::move(center);
    S.radius = radius;
    return S;
}

SetDescriptor SetDescriptor::sphere(Vec center, double radius) {
    if (radius <= 0) throw DomainError("sphere radius must be positive");
    SetDescriptor S;
    S.kind = SetKind::Sphere;
    S.center = std::move(center);
    S.radius = radius;
    S.declared_prox_radius = radius;
    return S;
}

SetDescriptor SetDescriptor::box(Vec lo, Vec hi) {
    if (lo.size() != hi.size()) throw DimensionError("box bounds dimension mismatch");
    for (int i = 0; i < lo.size(); ++i)
        if (lo[i] > hi[i]) throw DomainError("box with lo > hi");
    SetDescriptor S;
    S.kind = SetKind::Box;
    S.lo = std::move(lo);
    S.hi = std::move(hi);
    return S;
}

SetDescriptor SetDescriptor::singleton(Vec point) {
    SetDescriptor S;
    S.kind = SetKind::Singleton;
    S.point = std::move(point);
    return S;
}

SetDescriptor SetDescriptor::product(std::vector<SetDescriptor> parts) {
    if (parts.empty()) throw DomainError("product of zero sets");
    SetDescriptor S;
    S.kind = SetKind::Product;
    S.parts = std::move(parts);
    S.declared_prox_radius = std::numeric_limits<double>::infinity();
    for (const auto& p : S.parts)
        S.declared_prox_radius = std::min(S.declared_prox_radius, p.declared_prox_radius);
    return S;
}

ProjectionResult set_project(const SetDescriptor& S, const Vec& x) {
    ProjectionResult res;
    switch (S.kind) {
        case SetKind::ConvexPolyhedron:
            res.points.push_back(polyhedron_project(S.rows, S.rhs, x));
            return res;
        case SetKind::Ball: {
            Vec d = x - S.center;
            double n = d.norm();
            res.points.push_back(n <= S.radius ? x : Vec(S.center + (S.radius / n) * d));
            return res;
        }
        case SetKind::Sphere: {
            Vec d = x - S.center;
            double n = d.norm();
            if (n < 1e-12) {
                // center of the sphere: every boundary point is nearest
                res.multivalued = true;
                Vec rep = S.center;
                rep[0] += S.radius;
                res.points.push_back(rep);
                if (S.center.size() > 1) {
                    Vec rep2 = S.center;
                    rep2[1] += S.radius;
                    res.points.push_back(rep2);
                }
                return res;
            }
            res.points.push_back(Vec(S.center + (S.radius / n) * d));
            return res;
        }
        case SetKind::Box: {
            Vec y = x;
            for (int i = 0; i < y.size(); ++i) y[i] = std::clamp(y[i], S.lo[i], S.hi[i]);
            res.points.push_back(y);
            return res;
        }
        case SetKind::Singleton:
            res.points.push_back(S.point);
            return res;
        case SetKind::Product: {
            std::vector<ProjectionResult> sub;
            int offset = 0;
            for (const auto& p : S.parts) {
                int d = p.dim();
                sub.push_back(set_project(p, x.segment(offset, d)));
                offset += d;
            }
            // cartesian combinations, capped
            std::vector<Vec> combos{Vec::Zero(x.size())};
            offset = 0;
            for (std::size_t k = 0; k < sub.size(); ++k) {
                int d = S.parts[k].dim();
                res.multivalued = res.multivalued || sub[k].multivalued;
                std::vector<Vec> next;
                for (const Vec& base : combos) {
                    for (const Vec& cand : sub[k].points) {
                        Vec c = base;
                        c.segment(offset, d) = cand;
                        next.push_back(c);
                        if (next.size() >= 8) break;
                    }
                    if (next.size() >= 8) break;
                }
                combos = std::move(next);
                offset += d;
            }
            res.points = std::move(combos);
            return res;
        }
    }
    throw UnsupportedKindError("corrupt set descriptor");
}

double set_distance(const SetDescriptor& S, const Vec& x) {
    switch (S.kind) {
        case SetKind::Sphere:
            return std::abs((x - S.center).norm() - S.radius);
        case SetKind::Product: {
            double acc = 0.0;
            int offset = 0;
            for (const auto& p : S.parts) {
                int d = p.dim();
                acc += sqr(set_distance(p, x.segment(offset, d)));
                offset += d;
            }
            return std::sqrt(acc);
        }
        default: {
            ProjectionResult pr = set_project(S, x);
            return (pr.points.front() - x).norm();
        }
    }
}

bool set_contains(const SetDescriptor& S, const Vec& x, double tol) {
    return set_distance(S, x) <= tol;
}

std::vector<Vec> sample_points(const SetDescriptor& S, int count, Sampler& rng,
                               const Vec* near, double near_radius) {
    std::vector<Vec> out;
    const int n = S.dim();
    for (int i = 0; i < count; ++i) {
        Vec probe;
        if (near && (i % 2 == 0)) {
            probe = *near + rng.in_ball(n, near_radius);
        } else {
            switch (S.kind) {
                case SetKind::Sphere:
                case SetKind::Ball:
                    probe = S.center + rng.in_ball(n, 2.0 * S.radius + 1.0);
                    break;
                case SetKind::Box: {
                    probe = Vec(n);
                    for (int j = 0; j < n; ++j)
                        probe[j] = rng.uniform(S.lo[j] - 0.5, S.hi[j] + 0.5);
                    break;
                }
                default:
                    probe = rng.gaussian(n) * (near ? near_radius : 1.0);
                    if (near) probe += *near;
                    break;
            }
        }
        ProjectionResult pr = set_project(S, probe);
        out.push_back(pr.points.front());
    }
    return out;
}

bool proximal_normal_membership(const SetDescriptor& S, const Vec& xbar, const Vec& eta,
                                double r, int samples, std::uint64_t seed, Vec* witness) {
    if (r <= 0) throw DomainError("proximal modulus r must be positive");
    if (!set_contains(S, xbar)) throw DomainError("base point is not in the set");
    if (eta.norm() < 1e-14) return true;

    bool convex = true;
    std::function<void(const SetDescriptor&)> scan = [&](const SetDescriptor& T) {
        if (T.kind == SetKind::Sphere) convex = false;
        for (const auto& p : T.parts) scan(p);
    };
    scan(S);

    if (convex) {
        // N^P = normal cone of convex analysis: eta is normal iff xbar is the
        // projection of xbar + eta.
        ProjectionResult pr = set_project(S, xbar + eta);
        return (pr.points.front() - xbar).norm() <= 1e-7 * std::max(1.0, eta.norm());
    }

    // Sampled verification of the proximal inequality: eta.(y - xbar) must
    // stay below |y - xbar|^2 / (2r) over the set.
    Sampler rng(seed);
    const double bound = 1.0 / (2.0 * r);
    std::vector<Vec> pts = sample_points(S, samples, rng, &xbar, std::max(1.0, 2.0 * r));
    Vec dir = eta / eta.norm();
    for (double eps : {1e-4, 1e-3, 1e-2, 0.1, 0.5}) {
        pts.push_back(set_project(S, xbar + eps * dir).points.front());
        pts.push_back(set_project(S, xbar - eps * dir).points.front());
    }
    const double slack = 1e-9 * std::max(1.0, eta.norm());
    for (const Vec& y : pts) {
        double lhs = eta.dot(y - xbar);
        double cap = bound * (y - xbar).squaredNorm();
        if (lhs > cap + slack) {
            if (witness) *witness = y;
            return false;
        }
    }
    return true;
}

PolyhedralCone clarke_tangent_cone(const SetDescriptor& S, const Vec& xbar) {
    if (!set_contains(S, xbar, 1e-7))
        throw DomainError("tangent cone requested at a point outside the set");
    const int n = S.dim();
    std::vector<Vec> hrows;
    switch (S.kind) {
        case SetKind::ConvexPolyhedron:
            for (std::size_t i = 0; i < S.rows.size(); ++i)
                if (S.rows[i].dot(xbar) >= S.rhs[static_cast<int>(i)] - 1e-7)
                    hrows.push_back(unit(S.rows[i]));
            break;
        case SetKind::Ball: {
            Vec d = xbar - S.center;
            if (d.norm() >= S.radius - 1e-7 && S.radius > 0) hrows.push_back(unit(d));
            if (S.radius == 0) return PolyhedralCone::zero(n);
            break;
        }
        case SetKind::Sphere: {
            Vec d = unit(xbar - S.center);
            hrows.push_back(d);
            hrows.push_back(-d);
            break;
        }
        case SetKind::Box:
            for (int i = 0; i < n; ++i) {
                Vec e = Vec::Zero(n);
                e[i] = 1.0;
                if (S.hi[i] - S.lo[i] < 1e-12) {
                    hrows.push_back(e);
                    hrows.push_back(-e);
                } else if (xbar[i] <= S.lo[i] + 1e-9) {
                    hrows.push_back(-e);
                } else if (xbar[i] >= S.hi[i] - 1e-9) {
                    hrows.push_back(e);
                }
            }
            break;
        case SetKind::Singleton:
            return PolyhedralCone::zero(n);
        case SetKind::Product: {
            int offset = 0;
            for (const auto& p : S.parts) {
                int d = p.dim();
                PolyhedralCone sub = clarke_tangent_cone(p, xbar.segment(offset, d));
                ensure_hrep(sub);
                for (const Vec& row : *sub.halfspaces) append_block(hrows, row, offset, n);
                offset += d;
            }
            break;
        }
    }
    return PolyhedralCone::from_halfspaces(std::move(hrows), n);
}

namespace {

// Quasi-uniform directions inside a cone: its generators plus seeded
// nonnegative combinations.
std::vector<Vec> cone_directions(const PolyhedralCone& cone_in, int samples, Sampler& rng) {
    PolyhedralCone cone = cone_in;
    ensure_vrep(cone);
    std::vector<Vec> dirs;
    for (const Vec& g : *cone.generators)
        if (g.norm() > 1e-12) dirs.push_back(unit(g));
    const int k = static_cast<int>(cone.generators->size());
    for (int i = 0; i < samples && k > 0; ++i) {
        Vec v = Vec::Zero(cone.dim);
        for (const Vec& g : *cone.generators) v += rng.uniform() * g;
        if (v.norm() > 1e-10) dirs.push_back(unit(v));
    }
    return dirs;
}

}  // namespace

TangentEstimate clarke_tangent_membership_estimate(const SetDescriptor& S, const Vec& xbar,
                                                   const Vec& v,
                                                   const std::vector<double>& ladder,
                                                   int base_samples, std::uint64_t seed) {
    if (!set_contains(S, xbar, 1e-7))
        throw DomainError("base point is not in the set");
    TangentEstimate est;
    if (v.norm() < 1e-14) {
        est.verdict = TangentVerdict::In;
        est.ratios.assign(ladder.size(), 0.0);
        return est;
    }
    Sampler rng(seed);
    std::vector<double> ts = ladder;
    std::sort(ts.begin(), ts.end(), std::greater<double>());
    const double vn = v.norm();
    for (double t : ts) {
        if (t <= 0) throw DomainError("ladder entries must be positive");
        double radius = std::min(0.5, 2.0 * t * std::max(1.0, vn));
        double worst = set_distance(S, xbar + t * v) / t;
        for (int i = 0; i < base_samples; ++i) {
            Vec probe = xbar + rng.in_ball(S.dim(), radius);
            Vec y = set_project(S, probe).points.front();
            if ((y - xbar).norm() > radius) continue;
            worst = std::max(worst, set_distance(S, y + t * v) / t);
        }
        est.ratios.push_back(worst);
        est.max_ratio = std::max(est.max_ratio, worst);
    }
    bool decaying = true;
    for (std::size_t i = 0; i + 1 < est.ratios.size(); ++i)
        if (est.ratios[i + 1] > 1.1 * est.ratios[i] + 1e-12) decaying = false;
    double last = est.ratios.back();
    double low = *std::min_element(est.ratios.begin(), est.ratios.end());
    if (decaying && last <= 0.02 * std::max(1.0, vn))
        est.verdict = TangentVerdict::In;
    else if (low >= 0.05 * vn)
        est.verdict = TangentVerdict::Out;
    else
        est.verdict = TangentVerdict::Inconclusive;
    return est;
}

QuasiProxCertificate quasi_prox_regular_certificate(const SetDescriptor& S, const Vec& xbar,
                                                    double delta, int samples,
                                                    std::uint64_t seed) {
    if (!set_contains(S, xbar, 1e-7))
        throw DomainError("base point is not in the set");
    QuasiProxCertificate cert;
    if (S.declared_prox_radius > 0) {
        cert.case_ = QuasiProxCase::CaseII;
        cert.evidence = std::isinf(S.declared_prox_radius)
                            ? "convex catalog kind (prox-regular for every r)"
                            : "declared prox radius " + std::to_string(S.declared_prox_radius);
        return cert;
    }
    // Case (i): sampled containment of (xbar + T^C) ∩ B_delta in S.
    PolyhedralCone cone = clarke_tangent_cone(S, xbar);
    Sampler rng(seed);
    std::vector<Vec> dirs = cone_directions(cone, samples, rng);
    for (const Vec& d : dirs) {
        for (double f : {1.0, 0.5, 0.25, 0.1}) {
            Vec x = xbar + (delta * f) * d;
            if (!set_contains(S, x, 1e-8)) {
                cert.case_ = QuasiProxCase::None;
                cert.witness = x;
                cert.evidence = "tangent cone point escapes the set";
                return cert;
            }
        }
    }
    cert.case_ = QuasiProxCase::CaseI;
    cert.evidence = "sampled cone containment held at delta " + std::to_string(delta);
    return cert;
}

QdqCertificate qdq_certificate(const SetDescriptor& S, const Vec& xbar,
                               const std::vector<double>& delta_ladder, int samples,
                               std::uint64_t seed) {
    QdqCertificate cert;
    cert.delta_ladder = delta_ladder;
    cert.note =
        "supported requires nonincreasing ratios (10% slack) and final ratio "
        "<= max(half the first, 1e-12); decay-rate heuristic, not asserted by theory";

    QuasiProxCertificate qp = quasi_prox_regular_certificate(
        S, xbar, delta_ladder.empty() ? 1.0 : delta_ladder.front(), samples, seed);
    if (qp.case_ == QuasiProxCase::None) {
        cert.verdict = QdqVerdict::Inconclusive;
        cert.note = "set is not quasi prox-regular at the base point; " + cert.note;
        return cert;
    }

    PolyhedralCone cone = clarke_tangent_cone(S, xbar);
    Sampler rng(seed);
    std::vector<Vec> dirs = cone_directions(cone, samples, rng);
    for (double delta : delta_ladder) {
        if (delta <= 0) throw DomainError("delta ladder entries must be positive");
        double worst = 0.0;
        for (const Vec& d : dirs) {
            for (double f : {1.0, 0.75, 0.5, 0.25}) {
                Vec x = xbar + (delta * f) * d;
                worst = std::max(worst, set_distance(S, x) / delta);
            }
        }
        cert.ratios.push_back(worst);
    }
    if (cert.ratios.size() >= 2) {
        bool monotone = true;
        for (std::size_t i = 0; i + 1 < cert.ratios.size(); ++i)
            if (cert.ratios[i + 1] > 1.1 * cert.ratios[i] + 1e-15) monotone = false;
        double first = cert.ratios.front(), last = cert.ratios.back();
        if (monotone && last <= std::max(0.5 * first, 1e-12))
            cert.verdict = QdqVerdict::Supported;
    }
    return cert;
}

}  // namespace conegap
