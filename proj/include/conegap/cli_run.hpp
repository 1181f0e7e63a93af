#pragma once

#include "conegap/scenario_io.hpp"

namespace conegap {

// Exit codes: 0 pass, 1 failed check, 2 input error, 3 inconclusive.
int run_cli(int argc, const char* const* argv);

struct ExampleConfig {
    std::vector<double> r_list{1.0, 0.5, 0.25, 0.125};
    double probe_radius_factor = 0.4;  // probe radius = factor * r
    int probe_samples = 400;
    int prop41_terms = 5;   // z_{2^-n} family length
    int prop41_samples = 120;
    std::string out_dir;
};

// Full golden pipeline on the bundled scenario: reference process, the jump
// family with feasibility/energy/distance/cost checks, isolation probes, and
// the multiplier search. Returns the report; `all_pass` receives the
// aggregate verdict.
Json example_4_4_report(const Scenario& sc, const ExampleConfig& cfg, bool* all_pass);

}  // namespace conegap
