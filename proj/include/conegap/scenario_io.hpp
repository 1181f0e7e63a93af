#pragma once

#include "conegap/extremality.hpp"
#include "conegap/process.hpp"

#include <json.hpp>

#include <iosfwd>

namespace conegap {

using Json = nlohmann::json;

SetDescriptor set_from_json(const Json& j);
Json set_to_json(const SetDescriptor& S);

Scenario scenario_from_json(const Json& j);
Scenario load_scenario(const std::string& path);

// Control files: {"type": "strict"|"extended", "T"/"S": ..., "grid": [...],
// "u"/"w0"+"w": ...}.
struct ControlSpec {
    bool extended = false;
    double horizon = 0.0;
    PiecewiseControl control;  // extended: values stacked (w0, w)
};

ControlSpec control_from_json(const Json& j, int m);
ControlSpec load_control(const std::string& path, int m);

// Columnar trajectory table: s, w0, w..., y0, y..., beta. Controls are
// cell values written on the cell's left node (the final row repeats the
// last cell). Deterministic %.17g formatting.
void write_process_tsv(std::ostream& os, const ExtendedProcess& z);
void write_process_tsv(const std::string& path, const ExtendedProcess& z);
ExtendedProcess read_process_tsv(const std::string& path);

Json feasibility_to_json(const FeasibilityReport& fr);
Json extremality_report_to_json(const ExtremalityReport& rep);
Json search_result_to_json(const SearchResult& res);
Json multiplier_to_json(const MultiplierSet& M);
MultiplierSet multiplier_from_json(const Json& j);

void write_json_file(const std::string& path, const Json& j);

}  // namespace conegap
