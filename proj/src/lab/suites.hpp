#pragma once

#include <string>

#include "lab/config.hpp"
#include "lab/report.hpp"

namespace starlab::lab {

const char* build_version();

// Runs one named suite (or "all") on the scenario. Config problems throw
// Error(Config); everything else a check raises becomes a failed row.
Report run_suite(const Scenario& s, const std::string& suite);

// Coupled run written as CSV (t,tau,min_eig_g,int_u_dV,metric_change), plus
// optional per-step field snapshots in `dump_dir`. Returns the CSV text.
std::string run_flow(const Scenario& s, const std::string& csv_path, const std::string& dump_dir, bool force);

// "F" or "omega" at t = 0 for the scenario's fields.
double evaluate_functional(const Scenario& s, const std::string& which);

}  // namespace starlab::lab
