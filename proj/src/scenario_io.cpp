#include "conegap/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace conegap {

namespace {

Vec vec_from_json(const Json& j) {
    Vec v(static_cast<int>(j.size()));
    int i = 0;
    for (const auto& x : j) v[i++] = x.get<double>();
    return v;
}

Json vec_to_json(const Vec& v) {
    Json j = Json::array();
    for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void bad_input(const std::string& what) {
    throw DomainError("scenario input: " + what);
}

}  // namespace

SetDescriptor set_from_json(const Json& j) {
    if (!j.contains("kind")) bad_input("set descriptor missing 'kind'");
    std::string kind = j.at("kind").get<std::string>();
    SetDescriptor S;
    if (kind == "polyhedron") {
        std::vector<Vec> rows;
        for (const auto& r : j.at("rows")) rows.push_back(vec_from_json(r));
        S = SetDescriptor::polyhedron(std::move(rows), vec_from_json(j.at("rhs")));
    } else if (kind == "ball") {
        S = SetDescriptor::ball(vec_from_json(j.at("center")), j.at("radius").get<double>());
    } else if (kind == "sphere") {
        S = SetDescriptor::sphere(vec_from_json(j.at("center")), j.at("radius").get<double>());
    } else if (kind == "box") {
        S = SetDescriptor::box(vec_from_json(j.at("lo")), vec_from_json(j.at("hi")));
    } else if (kind == "singleton") {
        S = SetDescriptor::singleton(vec_from_json(j.at("point")));
    } else if (kind == "product") {
        std::vector<SetDescriptor> parts;
        for (const auto& p : j.at("parts")) parts.push_back(set_from_json(p));
        S = SetDescriptor::product(std::move(parts));
    } else {
        throw UnsupportedKindError("unknown set kind '" + kind + "'");
    }
    if (j.contains("prox_radius")) {
        const auto& pr = j.at("prox_radius");
        S.declared_prox_radius = pr.is_string()
                                     ? std::numeric_limits<double>::infinity()
                                     : pr.get<double>();
    }
    return S;
}

Json set_to_json(const SetDescriptor& S) {
    Json j;
    switch (S.kind) {
        case SetKind::ConvexPolyhedron: {
            j["kind"] = "polyhedron";
            Json rows = Json::array();
            for (const Vec& r : S.rows) rows.push_back(vec_to_json(r));
            j["rows"] = rows;
            j["rhs"] = vec_to_json(S.rhs);
            break;
        }
        case SetKind::Ball:
            j["kind"] = "ball";
            j["center"] = vec_to_json(S.center);
            j["radius"] = S.radius;
            break;
        case SetKind::Sphere:
            j["kind"] = "sphere";
            j["center"] = vec_to_json(S.center);
            j["radius"] = S.radius;
            break;
        case SetKind::Box:
            j["kind"] = "box";
            j["lo"] = vec_to_json(S.lo);
            j["hi"] = vec_to_json(S.hi);
            break;
        case SetKind::Singleton:
            j["kind"] = "singleton";
            j["point"] = vec_to_json(S.point);
            break;
        case SetKind::Product: {
            j["kind"] = "product";
            Json parts = Json::array();
            for (const auto& p : S.parts) parts.push_back(set_to_json(p));
            j["parts"] = parts;
            break;
        }
    }
    if (!std::isinf(S.declared_prox_radius)) j["prox_radius"] = S.declared_prox_radius;
    return j;
}

Scenario scenario_from_json(const Json& j) {
    Scenario sc;
    try {
        sc.n = j.at("n").get<int>();
        sc.m = j.at("m").get<int>();
        sc.m1 = j.at("m1").get<int>();
        sc.m2 = j.at("m2").get<int>();

        std::vector<std::string> ftexts;
        for (const auto& s : j.at("f")) ftexts.push_back(s.get<std::string>());
        sc.f = VectorFieldExpr::parse(ftexts);
        for (const auto& gj : j.at("g")) {
            std::vector<std::string> gtexts;
            for (const auto& s : gj) gtexts.push_back(s.get<std::string>());
            sc.g.push_back(VectorFieldExpr::parse(gtexts));
        }

        const Json& cj = j.at("cone");
        std::string ckind = cj.at("kind").get<std::string>();
        if (ckind == "lines") {
            sc.cone = ConeSpec::lines_only(sc.m1);
        } else if (ckind == "orthant") {
            sc.cone = ConeSpec::orthant(sc.m1, sc.m2);
        } else if (ckind == "halfline") {
            sc.cone = ConeSpec::halfline(sc.m1);
        } else if (ckind == "polyhedral") {
            std::vector<Vec> gens;
            for (const auto& g : cj.at("generators")) gens.push_back(vec_from_json(g));
            sc.cone = ConeSpec::polyhedral(sc.m1, std::move(gens));
        } else {
            throw UnsupportedKindError("unknown cone kind '" + ckind + "'");
        }

        sc.target = set_from_json(j.at("target"));
        if (j.contains("K")) {
            const auto& K = j.at("K");
            sc.K = K.is_string() ? std::numeric_limits<double>::infinity()
                                 : K.get<double>();
        }
        sc.psi = Expr::parse(j.at("psi").get<std::string>());
        sc.x0 = vec_from_json(j.at("x0"));

        if (j.contains("integrator")) {
            const Json& ij = j.at("integrator");
            if (ij.contains("h_max_rel"))
                sc.integrator.h_max_rel = ij.at("h_max_rel").get<double>();
            if (ij.contains("probe_h_max_rel"))
                sc.integrator.probe_h_max_rel = ij.at("probe_h_max_rel").get<double>();
        }
        if (j.contains("tolerances")) {
            const Json& tj = j.at("tolerances");
            auto get = [&](const char* key, double& slot) {
                if (tj.contains(key)) slot = tj.at(key).get<double>();
            };
            get("membership", sc.tol.membership);
            get("simplex_identity", sc.tol.simplex_identity);
            get("energy", sc.tol.energy);
            get("extremal", sc.tol.extremal);
            get("transversality", sc.tol.transversality);
            get("w0_min", sc.tol.w0_min);
            get("nontrivial", sc.tol.nontrivial);
        }
        if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("max_bracket_length"))
            sc.max_bracket_length = j.at("max_bracket_length").get<int>();
    } catch (const Json::exception& e) {
        bad_input(e.what());
    }
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad_input("cannot open scenario file '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        bad_input(std::string("malformed scenario JSON: ") + e.what());
    }
    return scenario_from_json(j);
}

ControlSpec control_from_json(const Json& j, int m) {
    ControlSpec spec;
    try {
        std::string type = j.at("type").get<std::string>();
        if (type == "strict") {
            spec.extended = false;
            spec.horizon = j.at("T").get<double>();
        } else if (type == "extended") {
            spec.extended = true;
            spec.horizon = j.at("S").get<double>();
        } else {
            bad_input("control type must be 'strict' or 'extended'");
        }
        for (const auto& t : j.at("grid")) spec.control.nodes.push_back(t.get<double>());
        if (spec.extended) {
            std::vector<double> w0;
            for (const auto& x : j.at("w0")) w0.push_back(x.get<double>());
            std::vector<Vec> w;
            for (const auto& r : j.at("w")) w.push_back(vec_from_json(r));
            if (w0.size() != w.size()) bad_input("w0 and w cell counts differ");
            for (std::size_t i = 0; i < w0.size(); ++i) {
                Vec val(1 + m);
                if (w[i].size() != m) bad_input("control w has wrong dimension");
                val[0] = w0[i];
                val.tail(m) = w[i];
                spec.control.values.push_back(val);
            }
        } else {
            for (const auto& r : j.at("u")) {
                Vec val = vec_from_json(r);
                if (val.size() != m) bad_input("control u has wrong dimension");
                spec.control.values.push_back(val);
            }
        }
    } catch (const Json::exception& e) {
        bad_input(e.what());
    }
    spec.control.validate_grid();
    return spec;
}

ControlSpec load_control(const std::string& path, int m) {
    std::ifstream in(path);
    if (!in) bad_input("cannot open control file '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        bad_input(std::string("malformed control JSON: ") + e.what());
    }
    return control_from_json(j, m);
}

void write_process_tsv(std::ostream& os, const ExtendedProcess& z) {
    const int m = static_cast<int>(z.w.front().size());
    const int n = static_cast<int>(z.y.front().size());
    os << "s\tw0";
    for (int i = 1; i <= m; ++i) os << "\tw" << i;
    os << "\ty0";
    for (int i = 1; i <= n; ++i) os << "\ty" << i;
    os << "\tbeta\n";
    for (std::size_t j = 0; j < z.s.size(); ++j) {
        std::size_t cell = std::min(j, z.w.size() - 1);
        os << fmt(z.s[j]) << '\t' << fmt(z.w0[cell]);
        for (int i = 0; i < m; ++i) os << '\t' << fmt(z.w[cell][i]);
        os << '\t' << fmt(z.y0[j]);
        for (int i = 0; i < n; ++i) os << '\t' << fmt(z.y[j][i]);
        os << '\t' << fmt(z.beta[j]) << '\n';
    }
}

void write_process_tsv(const std::string& path, const ExtendedProcess& z) {
    std::ofstream out(path);
    if (!out) bad_input("cannot write '" + path + "'");
    write_process_tsv(out, z);
}

ExtendedProcess read_process_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad_input("cannot open process file '" + path + "'");
    std::string header;
    std::getline(in, header);
    int m = 0, n = 0;
    {
        std::istringstream hs(header);
        std::string col;
        while (hs >> col) {
            if (col.size() > 1 && col[0] == 'w' && col != "w0") ++m;
            if (col.size() > 1 && col[0] == 'y' && col != "y0") ++n;
        }
    }
    if (m == 0 || n == 0) bad_input("process table header is malformed");

    ExtendedProcess z;
    std::vector<double> w0_nodes;
    std::vector<Vec> w_nodes;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double s, w0v, b;
        ls >> s >> w0v;
        Vec wv(m);
        for (int i = 0; i < m; ++i) ls >> wv[i];
        double y0v;
        ls >> y0v;
        Vec yv(n);
        for (int i = 0; i < n; ++i) ls >> yv[i];
        ls >> b;
        if (!ls) bad_input("short row in process table");
        z.s.push_back(s);
        w0_nodes.push_back(w0v);
        w_nodes.push_back(wv);
        z.y0.push_back(y0v);
        z.y.push_back(yv);
        z.beta.push_back(b);
    }
    if (z.s.size() < 2) bad_input("process table needs at least two rows");
    z.S = z.s.back();
    z.w0.assign(w0_nodes.begin(), w0_nodes.end() - 1);
    z.w.assign(w_nodes.begin(), w_nodes.end() - 1);
    return z;
}

Json feasibility_to_json(const FeasibilityReport& fr) {
    Json j;
    j["feasible"] = fr.feasible;
    j["target_distance"] = fr.target_distance;
    if (std::isinf(fr.energy_slack))
        j["energy_slack"] = "infinite";
    else
        j["energy_slack"] = fr.energy_slack;
    return j;
}

Json extremality_report_to_json(const ExtremalityReport& rep) {
    Json j;
    j["overall_pass"] = rep.overall_pass;
    j["boundary_energy_case"] = rep.boundary_energy_case;
    j["beta_final"] = rep.beta_final;
    j["y0_final"] = rep.y0_final;
    Json conds = Json::array();
    for (const auto& c : rep.conditions) {
        Json cj;
        cj["id"] = c.id;
        cj["description"] = c.description;
        cj["residual"] = c.residual;
        cj["tolerance"] = c.tolerance;
        cj["applicable"] = c.applicable;
        cj["pass"] = c.pass;
        conds.push_back(cj);
    }
    j["conditions"] = conds;
    return j;
}

Json multiplier_to_json(const MultiplierSet& M) {
    Json j;
    j["p0"] = M.p0;
    j["p_terminal"] = vec_to_json(M.p_terminal);
    j["pi"] = M.pi;
    j["lambda"] = M.lambda;
    return j;
}

MultiplierSet multiplier_from_json(const Json& j) {
    MultiplierSet M;
    try {
        M.p0 = j.at("p0").get<double>();
        M.p_terminal = vec_from_json(j.at("p_terminal"));
        M.pi = j.value("pi", 0.0);
        M.lambda = j.value("lambda", 0.0);
    } catch (const Json::exception& e) {
        bad_input(e.what());
    }
    return M;
}

Json search_result_to_json(const SearchResult& res) {
    Json j;
    j["classification"] = to_string(res.classification);
    j["lambda0_feasible"] = res.lambda0_feasible;
    j["lambda1_feasible"] = res.lambda1_feasible;
    j["used_grid_fallback"] = res.used_grid_fallback;
    if (!res.notes.empty()) j["notes"] = res.notes;
    Json rays = Json::array();
    for (const auto& M : res.rays) rays.push_back(multiplier_to_json(M));
    j["rays"] = rays;
    return j;
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) bad_input("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace conegap
