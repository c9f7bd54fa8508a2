#pragma once

// Scenario-level operations shared by the C API: full simulation with
// telemetry, routing, dispatch and parameter sweeps.

#include "scenario.hpp"
#include "telemetry.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace maglev::runner {

struct SimulationOutput {
    std::string trajectory_csv;
    std::string events_json;
    std::string summary_json;
    telemetry::RunSummary summary;
};

/// Runs the line with one linearized gap loop per mover and records telemetry
/// every `record_every` ticks, on every tick with an event, and on the last tick.
SimulationOutput simulate(const scenario::Scenario& sc);

/// Writes trajectory.csv, events.json and summary.json, creating `dir`.
void write_outputs(const SimulationOutput& out, const std::filesystem::path& dir);

/// {"from","to","reachable","path":[nodes],"segments":[ids],"eta"}.
std::string route_json(const scenario::Scenario& sc, const std::string& from, const std::string& to);

/// Solves the scenario's jobs with "greedy", "local" (greedy then local
/// search) or "brute".
std::string dispatch_json(const scenario::Scenario& sc, const std::string& method);

/// One simulate run per value in `<dir>/<param>=<value>/` plus `<dir>/sweep.csv`.
void sweep(const nlohmann::json& document, const std::string& param, const std::vector<double>& values,
           const std::filesystem::path& dir);

}  // namespace maglev::runner
