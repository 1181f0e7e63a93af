#include "conegap/extremality.hpp"

#include "conegap/lp.hpp"
#include "conegap/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace conegap {

double hamiltonian(const Scenario& sc, const Vec& x, const Vec& p, double p0,
                   double pi, double w0, const Vec& w) {
    Vec dyn = sc.extended_rhs(x, w0, w);
    return p0 * w0 + p.dot(dyn) + pi * w.norm();
}

HamiltonianMax max_hamiltonian(const Scenario& sc, const Vec& x, const Vec& p,
                               double p0, double pi) {
    HamiltonianMax out;
    double drift = p0 + p.dot(sc.f.eval(x));
    Vec q(sc.m);
    for (int i = 0; i < sc.m; ++i) q[i] = p.dot(sc.g[i].eval(x));
    Vec what;
    double impulse = sc.cone.support_on_unit_sphere(q, &what) + pi;
    if (drift >= impulse) {
        out.value = drift;
        out.w0 = 1.0;
        out.w = Vec::Zero(sc.m);
    } else {
        out.value = impulse;
        out.w0 = 0.0;
        out.w = what;
    }
    return out;
}

std::vector<Vec> integrate_adjoint(const Scenario& sc, const ExtendedProcess& z,
                                   const Vec& p_terminal) {
    const int n = sc.n;
    if (p_terminal.size() != n) throw DimensionError("adjoint terminal dimension mismatch");
    const std::size_t J = z.w.size();

    auto system_jacobian = [&](const Vec& y, double w0c, const Vec& wc) {
        Mat A = w0c * sc.f.jacobian(y);
        for (int i = 0; i < sc.m; ++i)
            if (wc[i] != 0.0) A += wc[i] * sc.g[i].jacobian(y);
        return A;
    };

    std::vector<Vec> p(z.y.size());
    p.back() = p_terminal;
    for (std::size_t jj = J; jj-- > 0;) {
        double a = z.s[jj], b = z.s[jj + 1];
        double h = b - a;
        double w0c = z.w0[jj];
        const Vec& wc = z.w[jj];

        // Hermite midpoint of the state inside the cell keeps the backward
        // step at RK4 accuracy.
        Vec ya = z.y[jj], yb = z.y[jj + 1];
        Vec da = sc.extended_rhs(ya, w0c, wc);
        Vec db = sc.extended_rhs(yb, w0c, wc);
        Vec ymid = 0.5 * (ya + yb) + (h / 8.0) * (da - db);

        Mat Aa = system_jacobian(ya, w0c, wc).transpose();
        Mat Am = system_jacobian(ymid, w0c, wc).transpose();
        Mat Ab = system_jacobian(yb, w0c, wc).transpose();

        // backward RK4: dp/ds = -A(s)^T p, integrating from b down to a
        const Vec& pb = p[jj + 1];
        Vec k1 = -(Ab * pb);
        Vec k2 = -(Am * (pb - 0.5 * h * k1));
        Vec k3 = -(Am * (pb - 0.5 * h * k2));
        Vec k4 = -(Aa * (pb - h * k3));
        p[jj] = pb - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return p;
}

const ConditionReport* ExtremalityReport::find(const std::string& id) const {
    for (const auto& c : conditions)
        if (c.id == id) return &c;
    return nullptr;
}

namespace {

double path_sup_norm(const std::vector<Vec>& p) {
    double s = 0.0;
    for (const Vec& v : p) s = std::max(s, v.norm());
    return s;
}

// generators of K-polar from whatever representation K_cone carries
std::vector<Vec> polar_generators(const PolyhedralCone& K_cone) {
    PolyhedralCone Kp = polar(K_cone);
    ensure_vrep(Kp);
    return *Kp.generators;
}

std::vector<Vec> polar_facets(const PolyhedralCone& K_cone) {
    PolyhedralCone Kp = polar(K_cone);
    ensure_hrep(Kp);
    return *Kp.halfspaces;
}

}  // namespace

ExtremalityReport check_extremal(const Scenario& sc, const ExtendedProcess& z,
                                 const MultiplierSet& M_in, const PolyhedralCone& K_cone) {
    if (K_cone.dim != 1 + sc.n)
        throw DimensionError("approximating cone must live in (t, x) space");

    MultiplierSet M = M_in;
    if (M.p_terminal.size() != sc.n)
        throw DimensionError("multiplier terminal dimension mismatch");
    if (M.p_path.empty()) M.p_path = integrate_adjoint(sc, z, M.p_terminal);
    if (M.p_path.size() != z.y.size())
        throw DimensionError("adjoint path does not match the process grid");

    ExtremalityReport rep;
    const double beta_final = z.beta.back();
    rep.beta_final = beta_final;
    rep.y0_final = z.y0.back();
    const bool strict_energy = beta_final < sc.K - sc.tol.energy;
    rep.boundary_energy_case =
        std::isfinite(sc.K) && std::abs(beta_final - sc.K) <= sc.tol.energy;

    const double tol = sc.tol.extremal;
    const double psup = path_sup_norm(M.p_path);

    // (i) nontriviality, with the strengthened form when y0(S) > 0
    {
        ConditionReport c;
        c.id = "i-nontriviality";
        c.description = "(p0, p, lambda) != 0; residual is the largest magnitude";
        c.residual = std::max({std::abs(M.p0), psup, M.lambda});
        c.tolerance = sc.tol.nontrivial;
        c.pass = c.residual > c.tolerance;
        rep.conditions.push_back(c);

        ConditionReport cs;
        cs.id = "i-strengthened";
        cs.description = "(p, lambda) != 0 when the process is not purely impulsive";
        cs.applicable = z.y0.back() > sc.tol.membership;
        cs.residual = std::max(psup, M.lambda);
        cs.tolerance = sc.tol.nontrivial;
        cs.pass = !cs.applicable || cs.residual > cs.tolerance;
        rep.conditions.push_back(cs);
    }

    // (ii) transversality: (p0, p(S)) + lambda DPsi in -Kpolar, pi gated by
    // the energy regime
    {
        Vec dpsi = sc.psi_gradient(z.y0.back(), z.y.back());
        Vec q(1 + sc.n);
        q[0] = M.p0;
        q.tail(sc.n) = M.p_path.back();
        q += M.lambda * dpsi;
        double dist = 0.0;
        project_onto_conic_hull(polar_generators(K_cone), Vec(-q), &dist);
        ConditionReport c;
        c.id = "ii-transversality";
        c.description = "(p0, p(S)) in -lambda DPsi - Kpolar";
        c.residual = dist;
        c.tolerance = sc.tol.transversality;
        c.pass = dist <= c.tolerance;
        rep.conditions.push_back(c);

        ConditionReport cp;
        cp.id = "ii-pi";
        cp.description = strict_energy ? "pi = 0 below the energy bound"
                                       : "pi <= 0 at the energy bound";
        cp.residual = strict_energy ? std::abs(M.pi) : std::max(M.pi, 0.0);
        cp.tolerance = tol;
        cp.pass = cp.residual <= cp.tolerance;
        rep.conditions.push_back(cp);
    }

    // (iii) Hamiltonian equations: adjoint reintegration deviation plus a
    // midpoint check of the state equation
    {
        std::vector<Vec> pre = integrate_adjoint(sc, z, M.p_path.back());
        double dev = 0.0;
        for (std::size_t j = 0; j < pre.size(); ++j)
            dev = std::max(dev, (pre[j] - M.p_path[j]).norm());
        ConditionReport c;
        c.id = "iii-adjoint";
        c.description = "p solves the adjoint equation along the process";
        c.residual = dev;
        c.tolerance = tol;
        c.pass = dev <= c.tolerance;
        rep.conditions.push_back(c);

        double max_h = 0.0;
        double traj = 0.0;
        for (std::size_t j = 0; j + 1 < z.s.size(); ++j) {
            double h = z.s[j + 1] - z.s[j];
            max_h = std::max(max_h, h);
            Vec mid = 0.5 * (z.y[j] + z.y[j + 1]);
            Vec fd = (z.y[j + 1] - z.y[j]) / h;
            traj = std::max(traj, (fd - sc.extended_rhs(mid, z.w0[j], z.w[j])).norm());
        }
        ConditionReport ct;
        ct.id = "iii-trajectory";
        ct.description = "y solves the extended system (midpoint check)";
        ct.residual = traj;
        ct.tolerance = std::max(tol, 100.0 * max_h * max_h);
        ct.pass = traj <= ct.tolerance;
        rep.conditions.push_back(ct);
    }

    // (iv) maximization, Goh orthogonality, (v) vanishing Hamiltonian
    {
        double res_max = 0.0, res_vanish = 0.0, res_goh = 0.0;
        for (std::size_t j = 0; j < z.y.size(); ++j) {
            std::size_t cell = std::min(j, z.w.size() - 1);
            double Hbar = hamiltonian(sc, z.y[j], M.p_path[j], M.p0, M.pi, z.w0[cell],
                                      z.w[cell]);
            HamiltonianMax mx = max_hamiltonian(sc, z.y[j], M.p_path[j], M.p0, M.pi);
            res_max = std::max(res_max, std::abs(Hbar - mx.value));
            res_vanish = std::max(res_vanish, std::abs(mx.value));
            for (int i = 0; i < sc.m1; ++i)
                res_goh = std::max(res_goh,
                                   std::abs(M.p_path[j].dot(sc.g[i].eval(z.y[j]))));
        }
        ConditionReport c;
        c.id = "iv-maximization";
        c.description = "H at the process controls attains the Hamiltonian maximum";
        c.residual = res_max;
        c.tolerance = tol;
        c.pass = res_max <= tol;
        rep.conditions.push_back(c);

        ConditionReport cg;
        cg.id = "iv-goh";
        cg.description = "p . g_i = 0 for the line-generating controls";
        cg.applicable = strict_energy && sc.m1 > 0;
        cg.residual = res_goh;
        cg.tolerance = tol;
        cg.pass = !cg.applicable || res_goh <= tol;
        rep.conditions.push_back(cg);

        ConditionReport cv;
        cv.id = "v-vanishing";
        cv.description = "the maximized Hamiltonian vanishes along the process";
        cv.residual = res_vanish;
        cv.tolerance = tol;
        cv.pass = res_vanish <= tol;
        rep.conditions.push_back(cv);
    }

    // (vi) higher-order bracket conditions, gated on beta(S) < K
    {
        std::vector<VectorFieldExpr> g_block(sc.g.begin(), sc.g.begin() + sc.m1);
        auto templates = enumerate_goh_brackets(g_block, sc.max_bracket_length, 0);
        auto templates1 = enumerate_goh_brackets(g_block, sc.max_bracket_length, 1);

        ConditionReport c0;
        c0.id = "vi-brackets";
        c0.description = "p . B(h) = 0 for admissible bracket pairs";
        c0.applicable = strict_energy && !templates.empty();
        if (c0.applicable) {
            for (const auto& A : templates) {
                VectorFieldExpr Bh = assemble_bracket_field(A);
                for (std::size_t j = 0; j < z.y.size(); ++j)
                    c0.residual =
                        std::max(c0.residual, std::abs(M.p_path[j].dot(Bh.eval(z.y[j]))));
            }
        }
        c0.tolerance = tol;
        c0.pass = !c0.applicable || c0.residual <= tol;
        rep.conditions.push_back(c0);

        ConditionReport c1;
        c1.id = "vi-brackets-dynamic";
        c1.description =
            "p . ([f, B(h)] w0 + sum [g_j, B(h)] w^j) = 0 for C^1 bracket pairs";
        c1.applicable = strict_energy && !templates1.empty();
        if (c1.applicable) {
            for (const auto& A : templates1) {
                VectorFieldExpr Bh = assemble_bracket_field(A);
                VectorFieldExpr fB = lie_bracket(sc.f, Bh);
                std::vector<VectorFieldExpr> gB;
                for (int i = sc.m1; i < sc.m; ++i) gB.push_back(lie_bracket(sc.g[i], Bh));
                for (std::size_t j = 0; j + 1 < z.s.size(); ++j) {
                    Vec val = z.w0[j] * fB.eval(z.y[j]);
                    for (int i = sc.m1; i < sc.m; ++i)
                        if (z.w[j][i] != 0.0) val += z.w[j][i] * gB[i - sc.m1].eval(z.y[j]);
                    c1.residual = std::max(c1.residual, std::abs(M.p_path[j].dot(val)));
                }
            }
        }
        c1.tolerance = tol;
        c1.pass = !c1.applicable || c1.residual <= tol;
        rep.conditions.push_back(c1);
    }

    rep.overall_pass = true;
    for (const auto& c : rep.conditions)
        if (c.applicable && !c.pass) rep.overall_pass = false;
    return rep;
}

// --- multiplier search ---------------------------------------------------------

namespace {

struct ConstraintSystem {
    // variables v = (p0, pS[0..n), pi, lambda)
    std::vector<Vec> eq;    // eq . v = 0
    std::vector<Vec> ineq;  // ineq . v <= 0
    int N = 0;

    void dedupe() {
        auto thin = [](std::vector<Vec>& rows) {
            std::set<std::vector<long long>> seen;
            std::vector<Vec> out;
            for (const Vec& r : rows) {
                double n = r.norm();
                if (n < 1e-13) continue;
                std::vector<long long> key(r.size());
                for (int i = 0; i < r.size(); ++i)
                    key[i] = llround(r[i] / n * 1e9);
                if (seen.insert(key).second) out.push_back(r);
            }
            rows = std::move(out);
        };
        thin(eq);
        thin(ineq);
    }
};

struct SearchWorkspace {
    const Scenario* sc = nullptr;
    const ExtendedProcess* z = nullptr;
    std::vector<Mat> PhiT;          // transposed fundamental matrix per node
    std::vector<std::size_t> nodes;  // constraint nodes (indices into z->s)
    std::vector<Vec> impulse_dirs;   // unit slice directions used for max-H rows
    Vec dpsi;
    std::vector<Vec> kperp_facets;
    bool strict_energy = false;
    std::vector<VectorFieldExpr> bracket_fields;       // for (5.10)
    std::vector<VectorFieldExpr> bracket_fields_f;     // [f, B(h)] for (5.11)
    std::vector<std::vector<VectorFieldExpr>> bracket_fields_g;  // [g_j, B(h)]

    int N() const { return sc->n + 3; }
    int idx_p0() const { return 0; }
    int idx_pS(int k) const { return 1 + k; }
    int idx_pi() const { return 1 + sc->n; }
    int idx_lambda() const { return 2 + sc->n; }

    Vec pS_coeff(std::size_t j, const Vec& vec_in_state) const {
        return PhiT[j] * vec_in_state;
    }

    ConstraintSystem build() const {
        ConstraintSystem cs;
        cs.N = N();
        const Scenario& s = *sc;
        const ExtendedProcess& zz = *z;

        for (std::size_t j : nodes) {
            std::size_t cell = std::min(j, zz.w.size() - 1);
            const Vec& y = zz.y[j];
            double w0c = zz.w0[cell];
            const Vec& wc = zz.w[cell];

            // H at the process control vanishes (iv)+(v)
            Vec row = Vec::Zero(cs.N);
            row[idx_p0()] = w0c;
            row.segment(1, s.n) = pS_coeff(j, s.extended_rhs(y, w0c, wc));
            row[idx_pi()] = wc.norm();
            cs.eq.push_back(row);

            // drift vertex of max-H
            Vec rd = Vec::Zero(cs.N);
            rd[idx_p0()] = 1.0;
            rd.segment(1, s.n) = pS_coeff(j, s.f.eval(y));
            cs.ineq.push_back(rd);

            // impulse vertices of max-H
            for (const Vec& dir : impulse_dirs) {
                Vec gd = Vec::Zero(s.n);
                for (int i = 0; i < s.m; ++i)
                    if (dir[i] != 0.0) gd += dir[i] * s.g[i].eval(y);
                Vec ri = Vec::Zero(cs.N);
                ri.segment(1, s.n) = pS_coeff(j, gd);
                ri[idx_pi()] = 1.0;
                cs.ineq.push_back(ri);
            }

            if (strict_energy) {
                for (int i = 0; i < s.m1; ++i) {
                    Vec rg = Vec::Zero(cs.N);
                    rg.segment(1, s.n) = pS_coeff(j, s.g[i].eval(y));
                    cs.eq.push_back(rg);
                }
                for (const auto& Bh : bracket_fields) {
                    Vec rb = Vec::Zero(cs.N);
                    rb.segment(1, s.n) = pS_coeff(j, Bh.eval(y));
                    cs.eq.push_back(rb);
                }
                for (std::size_t t = 0; t < bracket_fields_f.size(); ++t) {
                    Vec val = w0c * bracket_fields_f[t].eval(y);
                    for (int i = s.m1; i < s.m; ++i)
                        if (wc[i] != 0.0)
                            val += wc[i] * bracket_fields_g[t][i - s.m1].eval(y);
                    Vec rb = Vec::Zero(cs.N);
                    rb.segment(1, s.n) = pS_coeff(j, val);
                    cs.eq.push_back(rb);
                }
            }
        }

        // transversality facets: c.(p0, pS) + lambda c.DPsi >= 0
        for (const Vec& c : kperp_facets) {
            Vec r = Vec::Zero(cs.N);
            r[idx_p0()] = -c[0];
            r.segment(1, s.n) = -c.tail(s.n);
            r[idx_lambda()] = -c.dot(dpsi);
            cs.ineq.push_back(r);
        }

        // pi <= 0, lambda >= 0; pi = 0 below the energy bound
        Vec rpi = Vec::Zero(cs.N);
        rpi[idx_pi()] = 1.0;
        cs.ineq.push_back(rpi);
        Vec rl = Vec::Zero(cs.N);
        rl[idx_lambda()] = -1.0;
        cs.ineq.push_back(rl);
        if (strict_energy) {
            Vec re = Vec::Zero(cs.N);
            re[idx_pi()] = 1.0;
            cs.eq.push_back(re);
        }

        cs.dedupe();
        return cs;
    }
};

Mat stack_rows(const std::vector<Vec>& rows, int n) {
    Mat M(static_cast<int>(rows.size()), n);
    for (std::size_t i = 0; i < rows.size(); ++i) M.row(static_cast<int>(i)) = rows[i];
    return M;
}

struct BranchResult {
    bool feasible = false;
    Vec v;  // full multiplier coordinates when feasible
};

// Probes one lambda branch: maximize coordinate functionals of v = N y over
// {B y <= 0} plus box rows; lambda is pinned by an equality slice.
BranchResult probe_branch(const ConstraintSystem& cs, const SearchWorkspace& ws,
                          bool lambda_zero, const std::vector<int>& targets,
                          const SearchConfig& cfg) {
    BranchResult out;
    const int N = cs.N;

    std::vector<Vec> eqs = cs.eq;
    Vec lam_row = Vec::Zero(N);
    lam_row[ws.idx_lambda()] = 1.0;
    if (lambda_zero) eqs.push_back(lam_row);

    Mat E = stack_rows(eqs, N);
    Mat Nker = kernel_basis(E);
    const int q = static_cast<int>(Nker.cols());
    if (q == 0) return out;

    Mat B = stack_rows(cs.ineq, N) * Nker;

    // box: |v_i| <= bound per multiplier coordinate
    double bound = lambda_zero ? 1.0 : cfg.box_rest;
    Mat A(B.rows() + 2 * N, q);
    Vec b(B.rows() + 2 * N);
    A.topRows(B.rows()) = B;
    b.head(B.rows()).setZero();
    for (int i = 0; i < N; ++i) {
        A.row(B.rows() + 2 * i) = Nker.row(i);
        b[B.rows() + 2 * i] = bound;
        A.row(B.rows() + 2 * i + 1) = -Nker.row(i);
        b[B.rows() + 2 * i + 1] = bound;
    }

    Mat Eq(0, q);
    Vec dq(0);
    Mat Eq1(1, q);
    Vec dq1(1);
    if (!lambda_zero) {
        // slice lambda = 1 (homogeneous cone, so any positive lambda scales)
        Eq1.row(0) = Nker.row(ws.idx_lambda());
        dq1[0] = 1.0;
    }

    double best = 0.0;
    Vec best_v;
    for (int t : targets) {
        for (double sgn : {1.0, -1.0}) {
            Vec c = sgn * Nker.row(t).transpose();
            LpResult res = lambda_zero ? solve_lp(c, A, b, Eq, dq)
                                       : solve_lp(c, A, b, Eq1, dq1);
            if (res.status == LpStatus::NumericalFailure)
                throw std::runtime_error("lp failure");
            if (res.status != LpStatus::Optimal) continue;
            if (res.objective > best + 1e-12) {
                best = res.objective;
                best_v = Nker * res.x;
            }
        }
    }
    if (best > cfg.ray_tol) {
        out.feasible = true;
        out.v = best_v;
    }
    return out;
}

MultiplierSet to_multiplier(const SearchWorkspace& ws, const Vec& v) {
    MultiplierSet M;
    const Scenario& sc = *ws.sc;
    M.p0 = v[ws.idx_p0()];
    M.p_terminal = v.segment(1, sc.n);
    M.pi = std::min(v[ws.idx_pi()], 0.0);
    M.lambda = std::max(v[ws.idx_lambda()], 0.0);
    M.p_path = integrate_adjoint(sc, *ws.z, M.p_terminal);
    double norm = std::abs(M.p0) + path_sup_norm(M.p_path) + std::abs(M.pi);
    if (norm > 1e-300) {
        M.p0 /= norm;
        M.p_terminal /= norm;
        M.pi /= norm;
        M.lambda /= norm;
        for (Vec& pv : M.p_path) pv /= norm;
    }
    return M;
}

// Scan the full grid for nodes violating any node-wise condition and return
// them (plus maximizing impulse directions) as cutting planes.
bool find_violations(const SearchWorkspace& ws, const MultiplierSet& M, double tol,
                     std::vector<std::size_t>& extra_nodes, std::vector<Vec>& extra_dirs) {
    const Scenario& sc = *ws.sc;
    const ExtendedProcess& z = *ws.z;
    bool found = false;
    for (std::size_t j = 0; j < z.y.size(); ++j) {
        std::size_t cell = std::min(j, z.w.size() - 1);
        bool bad = false;
        double Hbar = hamiltonian(sc, z.y[j], M.p_path[j], M.p0, M.pi, z.w0[cell], z.w[cell]);
        HamiltonianMax mx = max_hamiltonian(sc, z.y[j], M.p_path[j], M.p0, M.pi);
        if (std::abs(Hbar) > tol || mx.value > tol) {
            bad = true;
            if (mx.w0 == 0.0) extra_dirs.push_back(mx.w);
        }
        if (ws.strict_energy) {
            for (int i = 0; i < sc.m1 && !bad; ++i)
                if (std::abs(M.p_path[j].dot(sc.g[i].eval(z.y[j]))) > tol) bad = true;
            for (const auto& Bh : ws.bracket_fields) {
                if (bad) break;
                if (std::abs(M.p_path[j].dot(Bh.eval(z.y[j]))) > tol) bad = true;
            }
            for (std::size_t t = 0; t < ws.bracket_fields_f.size() && !bad; ++t) {
                Vec val = z.w0[cell] * ws.bracket_fields_f[t].eval(z.y[j]);
                for (int i = sc.m1; i < sc.m; ++i)
                    if (z.w[cell][i] != 0.0)
                        val += z.w[cell][i] * ws.bracket_fields_g[t][i - sc.m1].eval(z.y[j]);
                if (std::abs(M.p_path[j].dot(val)) > tol) bad = true;
            }
        }
        if (bad) {
            extra_nodes.push_back(j);
            found = true;
        }
    }
    return found;
}

SearchResult grid_fallback(const SearchWorkspace& ws, const ConstraintSystem& cs,
                           const PolyhedralCone& K_cone, const SearchConfig& cfg) {
    SearchResult res;
    res.used_grid_fallback = true;
    res.notes = "lp failed; dense sphere grid evidence only";
    const Scenario& sc = *ws.sc;
    Sampler rng(sc.seed ^ 0x5eedf001u);
    const int N = cs.N;
    Mat E = stack_rows(cs.eq, N);
    Mat A = stack_rows(cs.ineq, N);
    auto feasible_dir = [&](const Vec& v) {
        if (E.rows() > 0 && (E * v).cwiseAbs().maxCoeff() > 1e-7) return false;
        if (A.rows() > 0 && (A * v).maxCoeff() > 1e-7) return false;
        return true;
    };
    for (int trial = 0; trial < 10000; ++trial) {
        Vec v = rng.unit_vector(N);
        v[ws.idx_lambda()] = std::abs(v[ws.idx_lambda()]);
        v[ws.idx_pi()] = -std::abs(v[ws.idx_pi()]);
        for (int zero_lambda = 0; zero_lambda < 2; ++zero_lambda) {
            Vec cand = v;
            if (zero_lambda) cand[ws.idx_lambda()] = 0.0;
            if (cand.norm() < 1e-9) continue;
            cand /= cand.norm();
            if (!feasible_dir(cand)) continue;
            MultiplierSet M = to_multiplier(ws, cand);
            ExtremalityReport check = check_extremal(sc, *ws.z, M, K_cone);
            if (check.overall_pass) {
                res.rays.push_back(M);
                (cand[ws.idx_lambda()] > cfg.ray_tol ? res.lambda1_feasible
                                                     : res.lambda0_feasible) = true;
            }
        }
        if (res.rays.size() >= 4) break;
    }
    res.classification = Classification::Inconclusive;
    return res;
}

}  // namespace

std::string to_string(Classification c) {
    switch (c) {
        case Classification::Normal: return "normal";
        case Classification::Abnormal: return "abnormal";
        case Classification::Inconclusive: return "inconclusive";
        case Classification::NoMultipliers: return "no_multipliers";
    }
    return "?";
}

SearchResult search_multipliers(const Scenario& sc, const ExtendedProcess& z,
                                const PolyhedralCone& K_cone, const SearchConfig& config) {
    if (K_cone.dim != 1 + sc.n)
        throw DimensionError("approximating cone must live in (t, x) space");

    SearchWorkspace ws;
    ws.sc = &sc;
    ws.z = &z;
    ws.strict_energy = z.beta.back() < sc.K - sc.tol.energy;
    ws.dpsi = sc.psi_gradient(z.y0.back(), z.y.back());
    ws.kperp_facets = polar_facets(K_cone);

    // fundamental solution columns: adjoint flows of the basis vectors
    std::vector<std::vector<Vec>> basis(sc.n);
    for (int k = 0; k < sc.n; ++k) {
        Vec e = Vec::Zero(sc.n);
        e[k] = 1.0;
        basis[k] = integrate_adjoint(sc, z, e);
    }
    ws.PhiT.resize(z.y.size());
    for (std::size_t j = 0; j < z.y.size(); ++j) {
        Mat Phi(sc.n, sc.n);
        for (int k = 0; k < sc.n; ++k) Phi.col(k) = basis[k][j];
        ws.PhiT[j] = Phi.transpose();
    }

    Sampler rng(sc.seed ^ 0xc0ffee11u);
    ws.impulse_dirs = sc.cone.unit_directions(config.direction_refinement, rng);

    // constraint nodes: uniform subsample including endpoints
    const std::size_t J = z.y.size();
    const std::size_t want = std::min<std::size_t>(J, config.node_subsample);
    for (std::size_t i = 0; i < want; ++i)
        ws.nodes.push_back(i * (J - 1) / std::max<std::size_t>(1, want - 1));
    std::sort(ws.nodes.begin(), ws.nodes.end());
    ws.nodes.erase(std::unique(ws.nodes.begin(), ws.nodes.end()), ws.nodes.end());

    if (ws.strict_energy && sc.m1 > 0) {
        std::vector<VectorFieldExpr> g_block(sc.g.begin(), sc.g.begin() + sc.m1);
        for (const auto& A : enumerate_goh_brackets(g_block, sc.max_bracket_length, 0))
            ws.bracket_fields.push_back(assemble_bracket_field(A));
        for (const auto& A : enumerate_goh_brackets(g_block, sc.max_bracket_length, 1)) {
            VectorFieldExpr Bh = assemble_bracket_field(A);
            ws.bracket_fields_f.push_back(lie_bracket(sc.f, Bh));
            std::vector<VectorFieldExpr> gB;
            for (int i = sc.m1; i < sc.m; ++i) gB.push_back(lie_bracket(sc.g[i], Bh));
            ws.bracket_fields_g.push_back(std::move(gB));
        }
    }

    SearchResult res;
    const bool not_purely_impulsive = z.y0.back() > sc.tol.membership;
    std::vector<int> targets0;
    if (not_purely_impulsive) {
        for (int k = 0; k < sc.n; ++k) targets0.push_back(ws.idx_pS(k));
    } else {
        targets0.push_back(ws.idx_p0());
        for (int k = 0; k < sc.n; ++k) targets0.push_back(ws.idx_pS(k));
        if (!ws.strict_energy) targets0.push_back(ws.idx_pi());
    }
    std::vector<int> targets1;
    targets1.push_back(ws.idx_p0());
    for (int k = 0; k < sc.n; ++k) targets1.push_back(ws.idx_pS(k));
    if (!ws.strict_energy) targets1.push_back(ws.idx_pi());

    bool unverified_branch = false;
    try {
        for (int branch = 0; branch < 2; ++branch) {
            bool lambda_zero = (branch == 0);
            const std::vector<int>& targets = lambda_zero ? targets0 : targets1;
            for (int round = 0; round <= config.max_cut_rounds; ++round) {
                ConstraintSystem cs = ws.build();
                BranchResult br = probe_branch(cs, ws, lambda_zero, targets, config);
                if (!br.feasible) break;
                MultiplierSet M = to_multiplier(ws, br.v);
                ExtremalityReport check = check_extremal(sc, z, M, K_cone);
                if (check.overall_pass) {
                    (lambda_zero ? res.lambda0_feasible : res.lambda1_feasible) = true;
                    res.rays.push_back(std::move(M));
                    break;
                }
                std::vector<std::size_t> extra_nodes;
                std::vector<Vec> extra_dirs;
                bool refinable =
                    find_violations(ws, M, sc.tol.extremal, extra_nodes, extra_dirs);
                if (!refinable || round == config.max_cut_rounds) {
                    // LP says feasible but the full-grid check disagrees and
                    // no further cuts help: do not claim either way
                    unverified_branch = true;
                    res.notes += lambda_zero ? "lambda=0 branch unverified; "
                                             : "lambda=1 branch unverified; ";
                    break;
                }
                for (std::size_t j : extra_nodes) ws.nodes.push_back(j);
                std::sort(ws.nodes.begin(), ws.nodes.end());
                ws.nodes.erase(std::unique(ws.nodes.begin(), ws.nodes.end()),
                               ws.nodes.end());
                for (const Vec& d : extra_dirs) ws.impulse_dirs.push_back(d);
            }
        }
    } catch (const std::runtime_error&) {
        ConstraintSystem cs = ws.build();
        return grid_fallback(ws, cs, K_cone, config);
    }

    if (unverified_branch)
        res.classification = Classification::Inconclusive;
    else if (res.lambda0_feasible && !res.lambda1_feasible)
        res.classification = Classification::Abnormal;
    else if (!res.lambda0_feasible && res.lambda1_feasible)
        res.classification = Classification::Normal;
    else if (res.lambda0_feasible && res.lambda1_feasible)
        res.classification = Classification::Inconclusive;
    else
        res.classification = Classification::NoMultipliers;
    return res;
}

}  // namespace conegap
