#include "conegap/process.hpp"

#include "conegap/nnls.hpp"

#include <algorithm>
#include <cmath>

namespace conegap {

// --- ConeSpec ---------------------------------------------------------------

ConeSpec ConeSpec::lines_only(int m1) {
    ConeSpec c;
    c.m1 = m1;
    c.m2 = 0;
    c.kind2 = Kind2::None;
    return c;
}

ConeSpec ConeSpec::orthant(int m1, int m2) {
    ConeSpec c;
    c.m1 = m1;
    c.m2 = m2;
    c.kind2 = Kind2::Orthant;
    return c;
}

ConeSpec ConeSpec::halfline(int m1) {
    ConeSpec c;
    c.m1 = m1;
    c.m2 = 1;
    c.kind2 = Kind2::HalfLine;
    return c;
}

ConeSpec ConeSpec::polyhedral(int m1, std::vector<Vec> gens2) {
    if (gens2.empty()) throw DomainError("polyhedral cone needs generators");
    ConeSpec c;
    c.m1 = m1;
    c.m2 = static_cast<int>(gens2[0].size());
    c.kind2 = Kind2::Polyhedral;
    c.gens2 = std::move(gens2);
    // pointedness: C2 must not contain a line
    for (const Vec& g : c.gens2) {
        double d = 0.0;
        project_onto_conic_hull(c.gens2, Vec(-g), &d);
        if (d < 1e-9 * std::max(1.0, g.norm()))
            throw DomainError("C2 contains a line; hypothesis (iii) requires a pointed cone");
    }
    return c;
}

bool ConeSpec::contains(const Vec& w, double tol) const {
    if (w.size() != m()) throw DimensionError("control dimension mismatch");
    if (m2 == 0) return true;
    Vec w2 = w.tail(m2);
    switch (kind2) {
        case Kind2::None: return true;
        case Kind2::Orthant:
        case Kind2::HalfLine:
            for (int i = 0; i < m2; ++i)
                if (w2[i] < -tol) return false;
            return true;
        case Kind2::Polyhedral: {
            double d = 0.0;
            project_onto_conic_hull(gens2, w2, &d);
            return d <= tol * std::max(1.0, w2.norm());
        }
    }
    return false;
}

Vec ConeSpec::project(const Vec& q) const {
    Vec p = q;
    if (m2 == 0) return p;
    switch (kind2) {
        case Kind2::None: break;
        case Kind2::Orthant:
        case Kind2::HalfLine:
            for (int i = m1; i < m(); ++i) p[i] = std::max(p[i], 0.0);
            break;
        case Kind2::Polyhedral:
            p.tail(m2) = project_onto_conic_hull(gens2, Vec(q.tail(m2)), nullptr);
            break;
    }
    return p;
}

double ConeSpec::support_on_unit_sphere(const Vec& q, Vec* argmax) const {
    Vec p = project(q);
    if (p.norm() > 1e-12) {
        if (argmax) *argmax = p / p.norm();
        return q.dot(p / p.norm());
    }
    if (m1 > 0) {
        // the free block always offers a zero-value unit direction
        Vec w = Vec::Zero(m());
        w[0] = 1.0;
        if (argmax) *argmax = w;
        return 0.0;
    }
    // q in the polar of the pointed block: stationary directions live on
    // face spans and extreme rays.
    std::vector<Vec> rays;
    if (kind2 == Kind2::Orthant || kind2 == Kind2::HalfLine) {
        for (int i = 0; i < m2; ++i) {
            Vec e = Vec::Zero(m2);
            e[i] = 1.0;
            rays.push_back(e);
        }
    } else {
        rays = gens2;
    }
    const int k = static_cast<int>(rays.size());
    if (k > 12) throw UnsupportedKindError("cone face enumeration limited to 12 rays");
    double best = -std::numeric_limits<double>::infinity();
    Vec best_w;
    Vec q2 = q.tail(m2);
    auto consider = [&](const Vec& w2) {
        double n = w2.norm();
        if (n < 1e-12) return;
        Vec cand = w2 / n;
        double d = 0.0;
        project_onto_conic_hull(rays, cand, &d);
        if (d > 1e-9) return;
        double val = q2.dot(cand);
        if (val > best) {
            best = val;
            best_w = cand;
        }
    };
    for (const Vec& r : rays) consider(r);
    for (int mask = 1; mask < (1 << k); ++mask) {
        std::vector<Vec> sub;
        for (int i = 0; i < k; ++i)
            if (mask & (1 << i)) sub.push_back(rays[i]);
        Mat B = span_basis(sub, m2);
        Vec proj = B * (B.transpose() * q2);
        consider(proj);
        consider(Vec(-proj));
    }
    if (!std::isfinite(best)) throw DomainError("empty control cone slice");
    if (argmax) {
        Vec w = Vec::Zero(m());
        w.tail(m2) = best_w;
        *argmax = w;
    }
    return best;
}

std::vector<Vec> ConeSpec::unit_directions(int samples, Sampler& rng) const {
    std::vector<Vec> dirs;
    auto push = [&](Vec w) {
        double n = w.norm();
        if (n > 1e-12) dirs.push_back(w / n);
    };
    for (int i = 0; i < m1; ++i) {
        Vec e = Vec::Zero(m());
        e[i] = 1.0;
        push(e);
        push(-e);
    }
    if (m2 > 0) {
        std::vector<Vec> rays;
        if (kind2 == Kind2::Polyhedral) {
            rays = gens2;
        } else {
            for (int i = 0; i < m2; ++i) {
                Vec e = Vec::Zero(m2);
                e[i] = 1.0;
                rays.push_back(e);
            }
        }
        for (const Vec& r2 : rays) {
            Vec w = Vec::Zero(m());
            w.tail(m2) = r2;
            push(w);
        }
        for (int i = 0; i < samples; ++i) {
            Vec w = Vec::Zero(m());
            if (m1 > 0) w.head(m1) = rng.gaussian(m1);
            Vec mix = Vec::Zero(m2);
            for (const Vec& r2 : rays) mix += rng.uniform() * (r2 / r2.norm());
            w.tail(m2) = mix;
            push(w);
        }
    } else {
        for (int i = 0; i < samples; ++i) push(rng.gaussian(m()));
    }
    return dirs;
}

// --- Scenario ----------------------------------------------------------------

void Scenario::validate() const {
    if (n < 1) throw DomainError("state dimension must be positive");
    if (m1 + m2 != m) throw DomainError("m1 + m2 must equal m");
    if (cone.m() != m) throw DomainError("cone dimension mismatch");
    if (f.dim() != n) throw DimensionError("drift dimension mismatch");
    if (static_cast<int>(g.size()) != m) throw DimensionError("need one g per control");
    for (const auto& gi : g)
        if (gi.dim() != n) throw DimensionError("control field dimension mismatch");
    if (target.dim() != 1 + n) throw DimensionError("target must live in (t, x) space");
    if (x0.size() != n) throw DimensionError("initial state dimension mismatch");
    if (K <= 0) throw DomainError("energy bound must be positive");
    if (psi.max_var() > 1 + n) throw DomainError("cost references unknown variables");
}

double Scenario::cost(double t, const Vec& x) const {
    Vec tx(1 + n);
    tx[0] = t;
    tx.tail(n) = x;
    return psi.eval(tx);
}

Vec Scenario::psi_gradient(double t, const Vec& x) const {
    Vec tx(1 + n);
    tx[0] = t;
    tx.tail(n) = x;
    Vec grad(1 + n);
    for (int j = 1; j <= 1 + n; ++j) grad[j - 1] = psi.derivative(j).eval(tx);
    return grad;
}

Vec Scenario::drift_rhs(const Vec& x, const Vec& u) const {
    Vec out = f.eval(x);
    for (int i = 0; i < m; ++i)
        if (u[i] != 0.0) out += g[i].eval(x) * u[i];
    return out;
}

Vec Scenario::extended_rhs(const Vec& y, double w0, const Vec& w) const {
    Vec out = w0 * f.eval(y);
    for (int i = 0; i < m; ++i)
        if (w[i] != 0.0) out += g[i].eval(y) * w[i];
    return out;
}

// --- controls ---------------------------------------------------------------

void PiecewiseControl::validate_grid() const {
    if (nodes.size() < 2) throw DomainError("control grid needs at least two nodes");
    if (values.size() + 1 != nodes.size())
        throw DomainError("control needs one value per grid cell");
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        if (nodes[i + 1] <= nodes[i]) throw DomainError("control grid must be increasing");
}

Vec PiecewiseControl::value_at(double t) const {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
    std::size_t cell = static_cast<std::size_t>(std::max<long>(0, (it - nodes.begin()) - 1));
    cell = std::min(cell, values.size() - 1);
    return values[cell];
}

PiecewiseControl PiecewiseControl::rescaled_to(double new_horizon) const {
    PiecewiseControl out = *this;
    double T = nodes.back();
    for (double& t : out.nodes) t *= new_horizon / T;
    return out;
}

// --- integration -------------------------------------------------------------

namespace {

std::vector<double> fine_grid(const std::vector<double>& breakpoints, double h_max) {
    std::vector<double> grid;
    grid.push_back(breakpoints.front());
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        double a = breakpoints[i], b = breakpoints[i + 1];
        int steps = std::max(1, static_cast<int>(std::ceil((b - a) / h_max - 1e-12)));
        for (int k = 1; k <= steps; ++k) grid.push_back(a + (b - a) * k / steps);
    }
    return grid;
}

template <typename Rhs>
Vec rk4_step(const Rhs& rhs, const Vec& x, double h) {
    Vec k1 = rhs(x);
    Vec k2 = rhs(x + 0.5 * h * k1);
    Vec k3 = rhs(x + 0.5 * h * k2);
    Vec k4 = rhs(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

StrictProcess integrate_strict(const Scenario& sc, double T, const PiecewiseControl& u,
                               double h_max_rel) {
    if (T <= 0) throw DomainError("horizon must be positive");
    u.validate_grid();
    if (std::abs(u.nodes.back() - T) > 1e-9 * std::max(1.0, T))
        throw DomainError("control grid does not span [0, T]");
    for (const Vec& val : u.values)
        if (!sc.cone.contains(val, sc.tol.membership))
            throw DomainError("control value outside the cone C");

    double h_max = (h_max_rel > 0 ? h_max_rel : sc.integrator.h_max_rel) * T;
    StrictProcess p;
    p.T = T;
    p.t = fine_grid(u.nodes, h_max);
    p.x.push_back(sc.x0);
    p.v.push_back(0.0);
    for (std::size_t j = 0; j + 1 < p.t.size(); ++j) {
        double a = p.t[j], b = p.t[j + 1];
        Vec uc = u.value_at(0.5 * (a + b));
        p.u.push_back(uc);
        auto rhs = [&](const Vec& x) { return sc.drift_rhs(x, uc); };
        p.x.push_back(rk4_step(rhs, p.x.back(), b - a));
        p.v.push_back(p.v.back() + uc.norm() * (b - a));
    }
    return p;
}

ExtendedProcess integrate_extended(const Scenario& sc, double S,
                                   const PiecewiseControl& w0w, double h_max_rel) {
    if (S <= 0) throw DomainError("horizon must be positive");
    w0w.validate_grid();
    if (std::abs(w0w.nodes.back() - S) > 1e-9 * std::max(1.0, S))
        throw DomainError("control grid does not span [0, S]");
    for (const Vec& val : w0w.values) {
        if (val.size() != 1 + sc.m) throw DimensionError("extended control needs (w0, w)");
        double w0c = val[0];
        Vec wc = val.tail(sc.m);
        if (w0c < -1e-12) throw DomainError("w0 must be nonnegative");
        if (std::abs(w0c + wc.norm() - 1.0) > sc.tol.simplex_identity)
            throw DomainError("extended control violates w0 + |w| = 1");
        if (!sc.cone.contains(wc, sc.tol.membership))
            throw DomainError("control value outside the cone C");
    }

    double h_max = (h_max_rel > 0 ? h_max_rel : sc.integrator.h_max_rel) * S;
    ExtendedProcess z;
    z.S = S;
    z.s = fine_grid(w0w.nodes, h_max);
    z.y0.push_back(0.0);
    z.y.push_back(sc.x0);
    z.beta.push_back(0.0);
    for (std::size_t j = 0; j + 1 < z.s.size(); ++j) {
        double a = z.s[j], b = z.s[j + 1];
        Vec val = w0w.value_at(0.5 * (a + b));
        double w0c = std::max(0.0, val[0]);
        Vec wc = val.tail(sc.m);
        z.w0.push_back(w0c);
        z.w.push_back(wc);
        auto rhs = [&](const Vec& y) { return sc.extended_rhs(y, w0c, wc); };
        z.y.push_back(rk4_step(rhs, z.y.back(), b - a));
        z.y0.push_back(z.y0.back() + w0c * (b - a));
        z.beta.push_back(z.beta.back() + wc.norm() * (b - a));
    }
    return z;
}

Vec ExtendedProcess::final_space_time() const {
    Vec out(1 + y.back().size());
    out[0] = y0.back();
    out.tail(y.back().size()) = y.back();
    return out;
}

// --- embedding ---------------------------------------------------------------

ExtendedProcess embed(const Scenario& sc, const StrictProcess& p) {
    (void)sc;
    ExtendedProcess z;
    z.s.push_back(0.0);
    z.y0.push_back(0.0);
    z.y.push_back(p.x.front());
    z.beta.push_back(p.v.front());
    for (std::size_t j = 0; j + 1 < p.t.size(); ++j) {
        double dt = p.t[j + 1] - p.t[j];
        double un = p.u[j].norm();
        double ds = dt * (1.0 + un);  // sigma slope
        double w0 = 1.0 / (1.0 + un);
        z.s.push_back(z.s.back() + ds);
        z.w0.push_back(w0);
        z.w.push_back(Vec(p.u[j] * w0));
        z.y0.push_back(p.t[j + 1]);
        z.y.push_back(p.x[j + 1]);
        z.beta.push_back(p.v[j + 1]);
    }
    z.S = z.s.back();
    return z;
}

StrictProcess unembed(const Scenario& sc, const ExtendedProcess& z) {
    StrictProcess p;
    for (std::size_t j = 0; j < z.w0.size(); ++j) {
        if (z.w0[j] < sc.tol.w0_min)
            throw DomainError("not an embedded strict-sense process: w0 vanishes on a cell");
    }
    p.t = z.y0;
    p.T = z.y0.back();
    p.x = z.y;
    p.v = z.beta;
    for (std::size_t j = 0; j < z.w0.size(); ++j) p.u.push_back(Vec(z.w[j] / z.w0[j]));
    return p;
}

// --- distances ---------------------------------------------------------------

namespace {

// cell lookup for piecewise-constant (w0, w) on the process's own grid
struct ControlView {
    const ExtendedProcess* z;
    std::pair<double, Vec> at(double s) const {
        auto it = std::upper_bound(z->s.begin(), z->s.end(), s);
        std::size_t cell = static_cast<std::size_t>(std::max<long>(0, (it - z->s.begin()) - 1));
        cell = std::min(cell, z->w.size() - 1);
        return {z->w0[cell], z->w[cell]};
    }
};

Vec interp_state(const ExtendedProcess& z, double s) {
    const int n = static_cast<int>(z.y.front().size());
    Vec out(2 + n);
    if (s >= z.S) {
        out[0] = z.y0.back();
        out.segment(1, n) = z.y.back();
        out[1 + n] = z.beta.back();
        return out;
    }
    auto it = std::upper_bound(z.s.begin(), z.s.end(), s);
    std::size_t j = static_cast<std::size_t>(std::max<long>(0, (it - z.s.begin()) - 1));
    j = std::min(j, z.s.size() - 2);
    double a = z.s[j], b = z.s[j + 1];
    double lam = (s - a) / (b - a);
    out[0] = (1 - lam) * z.y0[j] + lam * z.y0[j + 1];
    out.segment(1, n) = (1 - lam) * z.y[j] + lam * z.y[j + 1];
    out[1 + n] = (1 - lam) * z.beta[j] + lam * z.beta[j + 1];
    return out;
}

}  // namespace

double distance_d(const ExtendedProcess& z1, const ExtendedProcess& z2) {
    if (z1.y.front().size() != z2.y.front().size())
        throw DimensionError("processes of mixed state dimension");
    double horizon = std::min(z1.S, z2.S);
    std::vector<double> merged;
    for (double s : z1.s)
        if (s < horizon) merged.push_back(s);
    for (double s : z2.s)
        if (s < horizon) merged.push_back(s);
    merged.push_back(horizon);
    merged.push_back(0.0);
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                 merged.end());

    ControlView v1{&z1}, v2{&z2};
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < merged.size(); ++j) {
        double mid = 0.5 * (merged[j] + merged[j + 1]);
        auto [w01, w1] = v1.at(mid);
        auto [w02, w2] = v2.at(mid);
        double len = merged[j + 1] - merged[j];
        acc += len * (std::abs(w01 - w02) + (w1 - w2).norm());
    }
    return std::abs(z1.S - z2.S) + acc;
}

double distance_dinf(const ExtendedProcess& z1, const ExtendedProcess& z2) {
    if (z1.y.front().size() != z2.y.front().size())
        throw DimensionError("processes of mixed state dimension");
    std::vector<double> merged = z1.s;
    merged.insert(merged.end(), z2.s.begin(), z2.s.end());
    std::sort(merged.begin(), merged.end());
    double sup = 0.0;
    for (double s : merged) sup = std::max(sup, (interp_state(z1, s) - interp_state(z2, s)).norm());
    return std::abs(z1.S - z2.S) + sup;
}

// --- feasibility and cost ------------------------------------------------------

FeasibilityReport is_feasible(const Scenario& sc, const ExtendedProcess& z) {
    FeasibilityReport rep;
    rep.target_distance = set_distance(sc.target, z.final_space_time());
    double b = z.beta.back();
    rep.energy_slack = std::isinf(sc.K) ? std::numeric_limits<double>::infinity() : sc.K - b;
    rep.feasible = rep.target_distance <= sc.tol.membership && b <= sc.K + sc.tol.energy;
    return rep;
}

double process_cost(const Scenario& sc, const ExtendedProcess& z) {
    return sc.cost(z.y0.back(), z.y.back());
}

double process_cost(const Scenario& sc, const StrictProcess& p) {
    return sc.cost(p.T, p.x.back());
}

// --- neighborhood probe --------------------------------------------------------

namespace {

// distance_d evaluated on raw controls, before integrating a candidate
double control_distance(double S1, const PiecewiseControl& c1, const ExtendedProcess& z2) {
    std::vector<double> merged;
    double horizon = std::min(S1, z2.S);
    for (double s : c1.nodes)
        if (s < horizon) merged.push_back(s);
    for (double s : z2.s)
        if (s < horizon) merged.push_back(s);
    merged.push_back(0.0);
    merged.push_back(horizon);
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                 merged.end());
    ControlView v2{&z2};
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < merged.size(); ++j) {
        double mid = 0.5 * (merged[j] + merged[j + 1]);
        Vec val = c1.value_at(mid);
        auto [w02, w2] = v2.at(mid);
        acc += (merged[j + 1] - merged[j]) *
               (std::abs(val[0] - w02) + (val.tail(val.size() - 1) - w2).norm());
    }
    return std::abs(S1 - z2.S) + acc;
}

}  // namespace

ProbeReport strict_neighborhood_probe(const Scenario& sc, const ExtendedProcess& zhat,
                                      double r, int samples) {
    if (samples < 1) throw DomainError("probe needs at least one sample");
    if (r <= 0) throw DomainError("probe radius must be positive");
    ProbeReport rep;
    Sampler rng(sc.seed);

    const int m = sc.m;
    auto to_simplex = [&](double a, const Vec& b) {
        Vec w2 = sc.cone.project(b);
        double w0 = std::max(a, sc.tol.w0_min);
        double nw = w2.norm();
        Vec val(1 + m);
        if (nw < 1e-14) {
            val[0] = 1.0;
            val.tail(m).setZero();
            return val;
        }
        double total = w0 + nw;
        w0 /= total;
        w0 = std::max(w0, sc.tol.w0_min);
        val[0] = w0;
        val.tail(m) = w2 * ((1.0 - w0) / nw);
        return val;
    };

    auto consider = [&](double S, const PiecewiseControl& ctrl) {
        double d = control_distance(S, ctrl, zhat);
        if (d >= r) return false;
        ExtendedProcess z = integrate_extended(sc, S, ctrl, sc.integrator.probe_h_max_rel);
        FeasibilityReport fr = is_feasible(sc, z);
        ++rep.sampled;
        ProbeWitness wit{S, d, process_cost(sc, z), fr.feasible};
        if (fr.feasible) {
            rep.feasible_found = true;
            ++rep.feasible_count;
            rep.best_cost = std::min(rep.best_cost, wit.cost);
            if (rep.witnesses.size() < 16) rep.witnesses.push_back(wit);
        }
        return true;
    };

    // candidate 0: the reference control itself, when it is embedded strict
    bool embedded = true;
    for (double w0c : zhat.w0)
        if (w0c < sc.tol.w0_min) embedded = false;
    if (embedded) {
        PiecewiseControl base;
        base.nodes = zhat.s;
        for (std::size_t j = 0; j < zhat.w.size(); ++j) {
            Vec val(1 + m);
            val[0] = zhat.w0[j];
            val.tail(m) = zhat.w[j];
            base.values.push_back(val);
        }
        consider(zhat.S, base);
    }

    // a modest resampling grid keeps candidate construction cheap
    const int cells = std::min<int>(64, static_cast<int>(zhat.w.size()));
    std::vector<double> coarse(cells + 1);
    for (int i = 0; i <= cells; ++i) coarse[i] = zhat.S * i / cells;
    ControlView view{&zhat};

    while (rep.sampled < samples) {
        double dS = r * rng.uniform(-0.45, 0.45);
        double S = std::max(zhat.S + dS, 0.05 * zhat.S);
        double amp = (r / zhat.S) * rng.uniform(0.05, 0.6);

        PiecewiseControl ctrl;
        ctrl.nodes.resize(coarse.size());
        for (std::size_t i = 0; i < coarse.size(); ++i)
            ctrl.nodes[i] = coarse[i] * (S / zhat.S);
        for (int i = 0; i < cells; ++i) {
            double mid = 0.5 * (coarse[i] + coarse[i + 1]);
            auto [w0c, wc] = view.at(std::min(mid, zhat.S - 1e-12));
            double a = w0c + amp * rng.uniform(-1, 1);
            Vec b = wc;
            for (int q = 0; q < m; ++q) b[q] += amp * rng.uniform(-1, 1);
            ctrl.values.push_back(to_simplex(a, b));
        }
        if (!consider(S, ctrl)) {
            // candidate fell outside the ball; count it as a draw to keep
            // the loop finite, but do not integrate
            ++rep.sampled;
        }
    }
    if (!rep.feasible_found) rep.best_cost = std::numeric_limits<double>::infinity();
    return rep;
}

}  // namespace conegap
