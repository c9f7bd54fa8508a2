#pragma once

// Scenario files: one JSON document describing the line, the levitation and
// drive hardware, the job list and the timed command script.

#include "control.hpp"
#include "dispatch.hpp"
#include "dynamics.hpp"
#include "emfield.hpp"
#include "line.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace maglev::scenario {

struct LevitationConfig {
    emfield::GapGeometry geometry{100, 1e-4, 1e-3};  ///< gap is the setpoint
    double initial_gap = 1e-3;
    control::PIDGains pid{6125.0, 43500.0, 36.25, -20.0, 20.0, 1e-3};
};

struct MotorConfig {
    double psi_d = 0.5;
    double psi_q = 0.1;
    double tau = 0.25;
};

struct Scenario {
    std::string name;
    double dt = 1e-3;
    double t_end = 0.0;
    std::uint64_t rng_seed = 0;
    int record_every = 1;
    int search_iterations = 200;
    line::LineConfig line;
    LevitationConfig levitation;
    MotorConfig motor;
    dynamics::DragModel drag;
    std::optional<emfield::MagnetSpec> magnet;
    std::vector<dispatch::Job> jobs;
    dispatch::CongestionMap congestion;
    std::vector<line::TimedCommand> script;
};

struct Loaded {
    nlohmann::json document;
    Scenario scenario;
    std::vector<std::string> diagnostics;  ///< empty iff the scenario is usable

    bool ok() const { return diagnostics.empty(); }
};

/// Throws IoError when the text is not JSON. Schema and consistency problems
/// become diagnostics.
Loaded parse(const std::string& text);
Loaded from_document(nlohmann::json document);

/// Throws IoError when the file cannot be read or is not JSON.
Loaded load(const std::filesystem::path& path);

/// Overwrites the numeric field at a dotted path ("line.min_headway",
/// "line.segments.0.length"). Throws DomainError when the path is missing
/// or does not address a number.
void set_param(nlohmann::json& document, const std::string& dotted, double value);

/// Node a mover starts at for dispatch purposes and the time to get there.
dispatch::MoverStart mover_start(const track::TrackGraph& graph, const line::MoverConfig& mover);

}  // namespace maglev::scenario
