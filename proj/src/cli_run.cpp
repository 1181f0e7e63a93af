#include "conegap/cli_run.hpp"

#include "conegap/cones.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace conegap {

namespace {

namespace fs = std::filesystem;

Vec vec_of(const Json& j) {
    Vec v(static_cast<int>(j.size()));
    int i = 0;
    for (const auto& x : j) v[i++] = x.get<double>();
    return v;
}

Json vec_json(const Vec& v) {
    Json j = Json::array();
    for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

struct CommonOpts {
    std::string scenario_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int grid = 0;
    double tol = 0.0;
    int max_bracket_length = 0;
    bool seed_set = false, tol_set = false;
};

void apply_overrides(Scenario& sc, const CommonOpts& o) {
    if (o.grid > 0) sc.integrator.h_max_rel = 1.0 / o.grid;
    if (o.seed_set) sc.seed = o.seed;
    if (o.tol_set) sc.tol.extremal = o.tol;
    if (o.max_bracket_length > 0) sc.max_bracket_length = o.max_bracket_length;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool scenario_required = true) {
    auto* s = cmd->add_option("--scenario", o.scenario_path, "scenario JSON file");
    if (scenario_required) s->required();
    cmd->add_option("--out", o.out_dir, "output directory for report files");
    cmd->add_option("--seed", o.seed, "sampler seed override")
        ->each([&o](const std::string&) { o.seed_set = true; });
    cmd->add_option("--grid", o.grid, "steps per unit horizon (h_max_rel = 1/grid)");
    cmd->add_option("--tol", o.tol, "extremality tolerance override")
        ->each([&o](const std::string&) { o.tol_set = true; });
    cmd->add_option("--max-bracket-length", o.max_bracket_length,
                    "bracket enumeration bound");
}

void ensure_out(const std::string& dir) {
    if (!dir.empty()) fs::create_directories(dir);
}

std::string out_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir.empty() ? "." : dir) / name).string();
}

ExtendedProcess realize(const Scenario& sc, const ControlSpec& spec) {
    if (spec.extended) return integrate_extended(sc, spec.horizon, spec.control);
    return embed(sc, integrate_strict(sc, spec.horizon, spec.control));
}

PolyhedralCone default_target_cone(const Scenario& sc, const ExtendedProcess& z) {
    return clarke_tangent_cone(sc.target, z.final_space_time());
}

int cmd_simulate(const CommonOpts& o, const std::string& control_path) {
    Scenario sc = load_scenario(o.scenario_path);
    CommonOpts oo = o;
    apply_overrides(sc, oo);
    ControlSpec spec = load_control(control_path, sc.m);
    ExtendedProcess z;
    Json summary;
    if (spec.extended) {
        z = integrate_extended(sc, spec.horizon, spec.control);
        summary["mode"] = "extended";
    } else {
        StrictProcess p = integrate_strict(sc, spec.horizon, spec.control);
        summary["mode"] = "strict";
        summary["strict_cost"] = process_cost(sc, p);
        z = embed(sc, p);
    }
    ensure_out(o.out_dir);
    write_process_tsv(out_path(o.out_dir, "process.tsv"), z);
    summary["final_space_time"] = vec_json(z.final_space_time());
    summary["beta_final"] = z.beta.back();
    summary["cost"] = process_cost(sc, z);
    summary["feasibility"] = feasibility_to_json(is_feasible(sc, z));
    write_json_file(out_path(o.out_dir, "summary.json"), summary);
    std::cout << summary.dump(2) << std::endl;
    return 0;
}

int cmd_embed(const CommonOpts& o, const std::string& control_path) {
    Scenario sc = load_scenario(o.scenario_path);
    CommonOpts oo = o;
    apply_overrides(sc, oo);
    ControlSpec spec = load_control(control_path, sc.m);
    if (spec.extended)
        throw DomainError("embed expects a strict-sense control file");
    StrictProcess p = integrate_strict(sc, spec.horizon, spec.control);
    ExtendedProcess z = embed(sc, p);
    StrictProcess back = unembed(sc, z);
    double sup = std::abs(back.T - p.T);
    for (std::size_t j = 0; j < p.x.size(); ++j)
        sup = std::max(sup, (p.x[j] - back.x[j]).norm());
    ensure_out(o.out_dir);
    write_process_tsv(out_path(o.out_dir, "embedded.tsv"), z);
    Json rep;
    rep["S"] = z.S;
    rep["roundtrip_sup_error"] = sup;
    rep["roundtrip_ok"] = sup <= 1e-8;
    write_json_file(out_path(o.out_dir, "embed.json"), rep);
    std::cout << rep.dump(2) << std::endl;
    return sup <= 1e-8 ? 0 : 1;
}

int cmd_distance(const std::string& a_path, const std::string& b_path) {
    ExtendedProcess a = read_process_tsv(a_path);
    ExtendedProcess b = read_process_tsv(b_path);
    std::cout << "d = " << distance_d(a, b) << "\n";
    std::cout << "d_inf = " << distance_dinf(a, b) << std::endl;
    return 0;
}

int cmd_check_extremal(const CommonOpts& o, const std::string& control_path,
                       const std::string& multipliers_path) {
    Scenario sc = load_scenario(o.scenario_path);
    CommonOpts oo = o;
    apply_overrides(sc, oo);
    ExtendedProcess z = realize(sc, load_control(control_path, sc.m));
    std::ifstream min(multipliers_path);
    if (!min) throw DomainError("cannot open multipliers file '" + multipliers_path + "'");
    Json mj;
    min >> mj;
    MultiplierSet M = multiplier_from_json(mj);
    ExtremalityReport rep = check_extremal(sc, z, M, default_target_cone(sc, z));
    Json j = extremality_report_to_json(rep);
    ensure_out(o.out_dir);
    write_json_file(out_path(o.out_dir, "extremality.json"), j);
    std::cout << j.dump(2) << std::endl;
    return rep.overall_pass ? 0 : 1;
}

int cmd_search(const CommonOpts& o, const std::string& control_path) {
    Scenario sc = load_scenario(o.scenario_path);
    CommonOpts oo = o;
    apply_overrides(sc, oo);
    ExtendedProcess z = realize(sc, load_control(control_path, sc.m));
    SearchResult res = search_multipliers(sc, z, default_target_cone(sc, z));
    Json j = search_result_to_json(res);
    ensure_out(o.out_dir);
    write_json_file(out_path(o.out_dir, "multipliers.json"), j);
    std::cout << j.dump(2) << std::endl;
    switch (res.classification) {
        case Classification::Normal:
        case Classification::Abnormal: return 0;
        case Classification::Inconclusive: return 3;
        case Classification::NoMultipliers: return 1;
    }
    return 3;
}

int cmd_bracket(const std::string& op, const std::string& text, int k,
                const std::string& fields_path, const std::string& at_text) {
    FormalBracket B = FormalBracket::parse(text);
    if (op == "parse") {
        std::cout << B.to_string() << std::endl;
        return 0;
    }
    if (op == "length") {
        std::cout << B.length() << std::endl;
        return 0;
    }
    if (op == "switch") {
        std::cout << switch_number(B) << std::endl;
        return 0;
    }
    if (op == "smoothness") {
        auto req = required_smoothness(B, k);
        Json j;
        for (auto [letter, cls] : req.per_letter)
            j["X" + std::to_string(letter)] = cls;
        if (req.rule_unverified_beyond_length_4)
            j["note"] = "depth rule unverified beyond length 4";
        std::cout << j.dump(2) << std::endl;
        return 0;
    }
    if (op == "eval") {
        if (fields_path.empty() || at_text.empty())
            throw DomainError("bracket eval needs --fields and --at");
        std::ifstream in(fields_path);
        if (!in) throw DomainError("cannot open fields file '" + fields_path + "'");
        Json fj;
        in >> fj;
        BracketAssignment A{B, {}};
        for (const auto& comps : fj) {
            std::vector<std::string> texts;
            for (const auto& s : comps) texts.push_back(s.get<std::string>());
            A.fields.push_back(VectorFieldExpr::parse(texts));
        }
        Vec x = vec_of(Json::parse(at_text));
        std::cout << vec_json(eval_bracket(A, x)).dump() << std::endl;
        return 0;
    }
    throw DomainError("unknown bracket operation '" + op + "'");
}

int cmd_cones(const std::string& op, const std::string& arg1, const std::string& arg2,
              const std::string& point_text, const std::string& ladder_text, int samples) {
    auto cone_of = [](const std::string& text) {
        Json j = Json::parse(text);
        if (j.contains("generators")) {
            std::vector<Vec> gens;
            for (const auto& g : j.at("generators")) gens.push_back(vec_of(g));
            return conic_hull(gens);
        }
        if (j.contains("halfspaces")) {
            std::vector<Vec> rows;
            for (const auto& r : j.at("halfspaces")) rows.push_back(vec_of(r));
            return PolyhedralCone::from_halfspaces(rows, static_cast<int>(rows.at(0).size()));
        }
        throw DomainError("cone JSON needs 'generators' or 'halfspaces'");
    };
    auto cone_json = [](PolyhedralCone K) {
        Json j;
        ensure_vrep(K);
        ensure_hrep(K);
        Json gens = Json::array();
        for (const Vec& g : *K.generators) gens.push_back(vec_json(g));
        Json rows = Json::array();
        for (const Vec& r : *K.halfspaces) rows.push_back(vec_json(r));
        j["generators"] = gens;
        j["halfspaces"] = rows;
        return j;
    };

    if (op == "polar") {
        std::cout << cone_json(polar(cone_of(arg1))).dump(2) << std::endl;
        return 0;
    }
    if (op == "hull") {
        std::cout << cone_json(cone_of(arg1)).dump(2) << std::endl;
        return 0;
    }
    if (op == "transversal") {
        auto rep = transversality_report(cone_of(arg1), cone_of(arg2));
        Json j;
        j["transversal"] = rep.transversal;
        j["strongly_transversal"] = rep.strongly_transversal;
        if (rep.separating_functional)
            j["separating_functional"] = vec_json(*rep.separating_functional);
        std::cout << j.dump(2) << std::endl;
        return 0;
    }
    if (op == "project") {
        SetDescriptor S = set_from_json(Json::parse(arg1));
        auto pr = set_project(S, vec_of(Json::parse(point_text)));
        Json j;
        j["multivalued"] = pr.multivalued;
        Json pts = Json::array();
        for (const Vec& p : pr.points) pts.push_back(vec_json(p));
        j["points"] = pts;
        std::cout << j.dump(2) << std::endl;
        return 0;
    }
    if (op == "tangent") {
        SetDescriptor S = set_from_json(Json::parse(arg1));
        std::cout << cone_json(clarke_tangent_cone(S, vec_of(Json::parse(point_text))))
                         .dump(2)
                  << std::endl;
        return 0;
    }
    if (op == "qdq") {
        SetDescriptor S = set_from_json(Json::parse(arg1));
        std::vector<double> ladder;
        for (const auto& d : Json::parse(ladder_text)) ladder.push_back(d.get<double>());
        QdqCertificate cert =
            qdq_certificate(S, vec_of(Json::parse(point_text)), ladder, samples);
        Json j;
        j["delta_ladder"] = cert.delta_ladder;
        j["ratios"] = cert.ratios;
        j["verdict"] = cert.verdict == QdqVerdict::Supported ? "supported" : "inconclusive";
        j["note"] = cert.note;
        std::cout << j.dump(2) << std::endl;
        return cert.verdict == QdqVerdict::Supported ? 0 : 3;
    }
    throw DomainError("unknown cones operation '" + op + "'");
}

}  // namespace

Json example_4_4_report(const Scenario& sc, const ExampleConfig& cfg, bool* all_pass) {
    Json report;
    bool ok = true;
    auto record = [&](Json& dst, const std::string& name, double value, double expected,
                      double tolv) {
        Json j;
        j["value"] = value;
        j["expected"] = expected;
        j["residual"] = std::abs(value - expected);
        j["tolerance"] = tolv;
        bool pass = std::abs(value - expected) <= tolv;
        j["pass"] = pass;
        ok = ok && pass;
        dst[name] = j;
    };

    // reference process: the zero strict control embedded through the graph
    // completion
    PiecewiseControl uzero;
    uzero.nodes = {0.0, 1.0};
    uzero.values = {Vec::Zero(sc.m)};
    StrictProcess pbar = integrate_strict(sc, 1.0, uzero);
    ExtendedProcess zbar = embed(sc, pbar);

    Json jbar;
    Vec final_bar = zbar.final_space_time();
    record(jbar, "final_t", final_bar[0], 1.0, 1e-6);
    record(jbar, "final_x1", final_bar[1], 0.0, 1e-6);
    record(jbar, "final_x2", final_bar[2], 1.0, 1e-6);
    record(jbar, "cost", process_cost(sc, zbar), 1.0, 1e-9);
    jbar["feasibility"] = feasibility_to_json(is_feasible(sc, zbar));
    ok = ok && is_feasible(sc, zbar).feasible;
    report["reference_process"] = jbar;

    // the jump family
    Json family = Json::array();
    for (double r : cfg.r_list) {
        Json jr;
        jr["r"] = r;
        PiecewiseControl ctrl;
        ctrl.nodes = {0.0, 1.0, 1.0 + r};
        Vec drift(1 + sc.m), jump(1 + sc.m);
        drift.setZero();
        drift[0] = 1.0;
        jump.setZero();
        jump[1] = 1.0;
        ctrl.values = {drift, jump};
        ExtendedProcess zr = integrate_extended(sc, 1.0 + r, ctrl);

        FeasibilityReport fr = is_feasible(sc, zr);
        jr["feasibility"] = feasibility_to_json(fr);
        if (!fr.feasible) {
            jr["note"] = "process leaves the target/energy set; gap checks skipped";
            family.push_back(jr);
            continue;
        }
        record(jr, "beta_final", zr.beta.back(), r, 1e-8);
        record(jr, "distance_d", distance_d(zr, zbar), r, 1e-10);
        jr["distance_dinf"] = distance_dinf(zr, zbar);
        double cost = process_cost(sc, zr);
        record(jr, "cost", cost, sqr(1.0 - r), 1e-9);
        bool gap = cost < 1.0;
        jr["gap_below_reference"] = gap;
        jr["cost_note"] =
            "cost evaluates to (1-r)^2; the linear value 1-r circulates for this "
            "family but does not match direct evaluation of (x1-1)^2 at x1 = r; "
            "the asserted fact is the strict gap below 1";
        ok = ok && gap;

        ProbeReport probe =
            strict_neighborhood_probe(sc, zr, cfg.probe_radius_factor * r, cfg.probe_samples);
        Json jp;
        jp["radius"] = cfg.probe_radius_factor * r;
        jp["samples"] = probe.sampled;
        jp["feasible_found"] = probe.feasible_found;
        jp["isolation_evidence"] = !probe.feasible_found;
        jr["probe"] = jp;
        ok = ok && !probe.feasible_found;
        family.push_back(jr);
    }
    report["jump_family"] = family;

    // the constructive isolated-sequence check: z_{2^-n} approaches the
    // reference process while staying isolation-evidence-positive
    {
        Json seq = Json::array();
        for (int nterm = 1; nterm <= cfg.prop41_terms; ++nterm) {
            double r = std::pow(2.0, -nterm);
            PiecewiseControl ctrl;
            ctrl.nodes = {0.0, 1.0, 1.0 + r};
            Vec drift(1 + sc.m), jump(1 + sc.m);
            drift.setZero();
            drift[0] = 1.0;
            jump.setZero();
            jump[1] = 1.0;
            ctrl.values = {drift, jump};
            ExtendedProcess zr = integrate_extended(sc, 1.0 + r, ctrl);
            ProbeReport probe =
                strict_neighborhood_probe(sc, zr, 0.4 * r, cfg.prop41_samples);
            Json je;
            je["r"] = r;
            je["d_to_reference"] = distance_d(zr, zbar);
            je["isolation_evidence"] = !probe.feasible_found;
            ok = ok && !probe.feasible_found;
            seq.push_back(je);
        }
        report["isolated_sequence"] = seq;
    }

    // multiplier search at the reference process
    {
        PolyhedralCone K = clarke_tangent_cone(sc.target, zbar.final_space_time());
        SearchResult res = search_multipliers(sc, zbar, K);
        Json js = search_result_to_json(res);
        ok = ok && res.classification == Classification::Abnormal;
        if (!res.rays.empty()) {
            ExtremalityReport check = check_extremal(sc, zbar, res.rays.front(), K);
            js["reference_ray_check"] = extremality_report_to_json(check);
            ok = ok && check.overall_pass;
        }
        report["multiplier_search"] = js;
    }

    report["all_pass"] = ok;
    if (all_pass) *all_pass = ok;
    return report;
}

namespace {

int cmd_example(const CommonOpts& o, const std::string& r_list_text, int probe_n,
                double probe_factor) {
    Scenario sc = load_scenario(o.scenario_path);
    CommonOpts oo = o;
    apply_overrides(sc, oo);
    ExampleConfig cfg;
    cfg.out_dir = o.out_dir;
    if (probe_n > 0) cfg.probe_samples = probe_n;
    if (probe_factor > 0) cfg.probe_radius_factor = probe_factor;
    if (!r_list_text.empty()) {
        cfg.r_list.clear();
        std::stringstream ss(r_list_text);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) cfg.r_list.push_back(std::stod(tok));
        }
    }
    bool ok = false;
    Json report = example_4_4_report(sc, cfg, &ok);
    ensure_out(o.out_dir);
    write_json_file(out_path(o.out_dir, "example_4_4_report.json"), report);
    std::cout << report.dump(2) << std::endl;
    return ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"impulsive control toolkit: graph-completion simulation, cone "
                 "geometry, and higher-order extremality checks"};
    app.require_subcommand(1);

    CommonOpts o_sim, o_emb, o_chk, o_sea, o_ex;
    std::string control_path, control_path2, multipliers_path;
    std::string a_path, b_path;
    std::string bracket_op, bracket_text, fields_path, at_text;
    int bracket_k = 0;
    std::string cones_op, cone_a, cone_b, point_text, ladder_text;
    int qdq_samples = 64;
    std::string r_list_text;
    int probe_n = 0;
    double probe_factor = 0.0;

    auto* sim = app.add_subcommand("simulate", "integrate a control and report the process");
    add_common(sim, o_sim);
    sim->add_option("--control", control_path, "control JSON file")->required();

    auto* emb = app.add_subcommand("embed", "embed a strict process and verify the round trip");
    add_common(emb, o_emb);
    emb->add_option("--control", control_path2, "strict control JSON file")->required();

    auto* dist = app.add_subcommand("distance", "d and d_inf between two process tables");
    dist->add_option("--a", a_path, "first process TSV")->required();
    dist->add_option("--b", b_path, "second process TSV")->required();

    auto* chk = app.add_subcommand("check-extremal", "evaluate the extremality conditions");
    add_common(chk, o_chk);
    chk->add_option("--control", control_path, "control JSON file")->required();
    chk->add_option("--multipliers", multipliers_path, "multiplier JSON file")->required();

    auto* sea = app.add_subcommand("search-multipliers", "search for extremal multipliers");
    add_common(sea, o_sea);
    sea->add_option("--control", control_path, "control JSON file")->required();

    auto* brk = app.add_subcommand("bracket", "formal bracket utilities");
    brk->add_option("op", bracket_op, "parse|length|switch|smoothness|eval")->required();
    brk->add_option("bracket", bracket_text, "bracket text, e.g. [[X1,X2],X3]")->required();
    brk->add_option("--k", bracket_k, "smoothness offset k");
    brk->add_option("--fields", fields_path, "JSON list of field component lists");
    brk->add_option("--at", at_text, "evaluation point as a JSON array");

    auto* con = app.add_subcommand("cones", "cone and set-geometry utilities");
    con->add_option("op", cones_op, "polar|hull|transversal|project|tangent|qdq")->required();
    con->add_option("--cone", cone_a, "cone JSON (generators or halfspaces)");
    con->add_option("--cone2", cone_b, "second cone JSON");
    con->add_option("--set", cone_a, "set descriptor JSON (project/tangent/qdq)");
    con->add_option("--point", point_text, "point as a JSON array");
    con->add_option("--ladder", ladder_text, "delta ladder as a JSON array");
    con->add_option("--samples", qdq_samples, "sample count for certificates");

    auto* ex = app.add_subcommand("example-4-4", "golden worked-example pipeline");
    add_common(ex, o_ex);
    ex->add_option("--r-list", r_list_text, "comma-separated jump sizes");
    ex->add_option("--probe-n", probe_n, "probe sample count");
    ex->add_option("--probe-factor", probe_factor, "probe radius as a fraction of r");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(o_sim, control_path);
        if (emb->parsed()) return cmd_embed(o_emb, control_path2);
        if (dist->parsed()) return cmd_distance(a_path, b_path);
        if (chk->parsed()) return cmd_check_extremal(o_chk, control_path, multipliers_path);
        if (sea->parsed()) return cmd_search(o_sea, control_path);
        if (brk->parsed())
            return cmd_bracket(bracket_op, bracket_text, bracket_k, fields_path, at_text);
        if (con->parsed())
            return cmd_cones(cones_op, cone_a, cone_b, point_text, ladder_text, qdq_samples);
        if (ex->parsed()) return cmd_example(o_ex, r_list_text, probe_n, probe_factor);
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << std::endl;
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "input error: " << e.what() << std::endl;
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "input error: " << e.what() << std::endl;
        return 2;
    } catch (const UnsupportedKindError& e) {
        std::cerr << "input error: " << e.what() << std::endl;
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "input error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 2;
}

}  // namespace conegap
