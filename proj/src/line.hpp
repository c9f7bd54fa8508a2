#pragma once

// Multi-mover conveyor line: movers travel along a directed track between
// stations, following rest-to-rest motion profiles, dwelling at stations and
// braking whenever continuing would break the minimum headway.

#include "control.hpp"
#include "dynamics.hpp"
#include "track.hpp"

#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace maglev::line {

using track::TrackSegment;

struct Station {
    std::string id;
    std::string node;
    double process_time = 0.0;  ///< dwell [s]
    std::string name;
};

struct MoverConfig {
    std::string id;
    std::string segment;  ///< segment the mover starts on
    double offset = 0.0;  ///< [m] from the segment start
    double mass = 1.0;    ///< [kg]
};

struct LineConfig {
    std::vector<TrackSegment> segments;
    std::vector<Station> stations;
    std::vector<MoverConfig> movers;
    double min_headway = 0.1;  ///< [m], includes the mover length
    double dt = 1e-3;          ///< [s]
};

/// One message per violated invariant; empty when the config is usable.
std::vector<std::string> validate(const LineConfig& config);

struct GoalCommand {
    std::string mover;
    std::string station;
};

struct TimedCommand {
    double t = 0.0;
    std::string mover;
    std::string station;
};

/// HeadwayIntervention is logged for every tick on which the headway rule
/// overrides a mover's plan.
enum class EventType { Arrival, DwellComplete, HeadwayIntervention };

const char* to_string(EventType type);

struct Event {
    double t = 0.0;
    long long tick = 0;
    std::string mover;
    EventType type = EventType::Arrival;
    std::string station;  ///< empty for headway interventions
};

enum class MoverMode { Idle, Moving, Dwelling };

struct MoverRuntime {
    std::string id;
    double mass = 1.0;
    int segment = -1;
    double offset = 0.0;
    double velocity = 0.0;
    double acceleration = 0.0;
    double odometer = 0.0;  ///< distance travelled since the run started [m]
    MoverMode mode = MoverMode::Idle;
    std::deque<std::string> queue;  ///< pending station goals

    // Valid while Moving.
    std::string goal;
    std::vector<int> path;    ///< segment indices, path[0] is the departure segment
    double path_pos = 0.0;    ///< distance from the start of path[0]
    double path_length = 0.0;
    double v_cap = 0.0;       ///< slowest v_limit on the path
    double a_cap = 0.0;       ///< weakest a_limit on the path; also the braking rate
    control::MotionProfile profile;
    double profile_origin = 0.0;
    long long profile_ticks = 0;
    bool replan = false;

    // Valid while Dwelling.
    long long dwell_left = 0;
};

struct LineState {
    std::vector<MoverRuntime> movers;
    long long tick = 0;
    double clock = 0.0;
    std::vector<Event> events;
};

class LineSimulator {
public:
    /// Throws DomainError listing every diagnostic if the config is invalid.
    explicit LineSimulator(LineConfig config);

    const LineConfig& config() const { return config_; }
    const track::TrackGraph& graph() const { return graph_; }

    LineState initial_state() const;

    /// Advances one dt. Commands are checked before anything changes; an
    /// unknown mover or station throws DomainError and leaves `state` intact.
    void advance(LineState& state, std::span<const GoalCommand> commands) const;

    /// Along-track distance to the nearest obstacle ahead of a moving mover,
    /// or +inf. Used by the headway rule.
    double obstacle_distance(const LineState& state, std::size_t mover) const;

    /// Smallest separation between two movers on the same segment, +inf if none share one.
    static double min_same_segment_separation(const LineState& state);

    const Station* station(const std::string& id) const;

private:
    int mover_index(const std::string& id) const;
    long long dwell_ticks(const Station& s) const;
    bool start_goal(LineState& state, std::size_t i, std::vector<Event>& events) const;
    double slack(const LineState& state, std::size_t i) const;
    void place(MoverRuntime& m) const;

    LineConfig config_;
    track::TrackGraph graph_;
};

/// Pure form of LineSimulator::advance.
LineState advance(LineState state, const LineConfig& config, std::span<const GoalCommand> commands);

struct MoverTrajectory {
    std::string mover;
    dynamics::Trajectory samples;  ///< position is the mover's odometer
};

struct RunResult {
    LineState final_state;
    std::vector<Event> events;
    std::vector<MoverTrajectory> trajectories;
};

using TickObserver = std::function<void(const LineSimulator&, const LineState&)>;

/// Replays a time-sorted script for floor(t_end/dt) ticks. Commands fire on the
/// first tick whose start time is at or after their timestamp. The observer
/// sees the initial state and the state after every tick.
RunResult run(const LineConfig& config, std::span<const TimedCommand> script, double t_end,
              const TickObserver& observer = {});

}  // namespace maglev::line
