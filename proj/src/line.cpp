#include "line.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace maglev::line {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

// Index of the path segment containing path_pos. A position exactly on a
// node belongs to the segment that ends there.
std::size_t path_segment(const track::TrackGraph& g, const MoverRuntime& m, double* start_of = nullptr) {
    double cum = 0.0;
    for (std::size_t k = 0; k < m.path.size(); ++k) {
        const double len = g.segment(m.path[k]).length;
        if (m.path_pos <= cum + len || k + 1 == m.path.size()) {
            if (start_of) *start_of = cum;
            return k;
        }
        cum += len;
    }
    if (start_of) *start_of = 0.0;
    return 0;
}

// The node this mover will finally rest at (or rests at now) and how far
// short of it the rest position is.
struct RestPoint {
    int segment = -1;
    double offset = 0.0;
};

RestPoint rest_point(const track::TrackGraph& g, const MoverRuntime& m) {
    if (m.mode == MoverMode::Moving && !m.path.empty()) {
        const int last = m.path.back();
        return {last, g.segment(last).length};
    }
    return {m.segment, m.offset};
}

}  // namespace

const char* to_string(EventType type) {
    switch (type) {
        case EventType::Arrival: return "arrival";
        case EventType::DwellComplete: return "dwell_complete";
        case EventType::HeadwayIntervention: return "headway";
    }
    return "unknown";
}

std::vector<std::string> validate(const LineConfig& config) {
    std::vector<std::string> out;
    if (!positive_finite(config.dt)) out.push_back("dt must be > 0");
    if (!positive_finite(config.min_headway)) out.push_back("min_headway must be > 0");

    std::set<std::string> seg_ids;
    bool segments_ok = true;
    for (const auto& s : config.segments) {
        if (!seg_ids.insert(s.id).second) {
            out.push_back("segment '" + s.id + "': duplicate id");
            segments_ok = false;
        }
        if (!positive_finite(s.length)) out.push_back("segment '" + s.id + "': length must be > 0");
        if (!positive_finite(s.v_limit)) out.push_back("segment '" + s.id + "': v_limit must be > 0");
        if (!positive_finite(s.a_limit)) out.push_back("segment '" + s.id + "': a_limit must be > 0");
        if (s.from_node.empty() || s.to_node.empty()) out.push_back("segment '" + s.id + "': missing node id");
        if (s.from_node == s.to_node) out.push_back("segment '" + s.id + "': starts and ends at the same node");
    }
    const track::TrackGraph graph(config.segments);
    if (!graph.weakly_connected()) out.push_back("track graph is not connected");

    std::set<std::string> station_ids;
    for (const auto& st : config.stations) {
        if (!station_ids.insert(st.id).second) out.push_back("station '" + st.id + "': duplicate id");
        if (!graph.has_node(st.node)) out.push_back("station '" + st.id + "': node '" + st.node + "' does not exist");
        if (!(st.process_time >= 0.0) || !std::isfinite(st.process_time)) {
            out.push_back("station '" + st.id + "': process_time must be >= 0");
        }
    }

    std::set<std::string> mover_ids;
    std::vector<std::pair<std::string, track::TrackPosition>> placed;
    for (const auto& m : config.movers) {
        if (!mover_ids.insert(m.id).second) out.push_back("mover '" + m.id + "': duplicate id");
        if (!positive_finite(m.mass)) out.push_back("mover '" + m.id + "': mass must be > 0");
        const auto idx = graph.segment_index(m.segment);
        if (!idx) {
            out.push_back("mover '" + m.id + "': segment '" + m.segment + "' does not exist");
            continue;
        }
        const double len = graph.segment(*idx).length;
        if (!(m.offset >= 0.0 && m.offset <= len)) {
            out.push_back("mover '" + m.id + "': offset must lie within segment '" + m.segment + "'");
            continue;
        }
        placed.emplace_back(m.id, track::TrackPosition{*idx, m.offset});
    }
    if (segments_ok && positive_finite(config.min_headway)) {
        for (std::size_t a = 0; a < placed.size(); ++a) {
            for (std::size_t b = a + 1; b < placed.size(); ++b) {
                const double sep = std::min(graph.distance(placed[a].second, placed[b].second),
                                            graph.distance(placed[b].second, placed[a].second));
                if (sep < config.min_headway) {
                    std::ostringstream msg;
                    msg << "movers '" << placed[a].first << "' and '" << placed[b].first << "' are " << sep
                        << " m apart, closer than min_headway " << config.min_headway << " m";
                    out.push_back(msg.str());
                }
            }
        }
    }
    return out;
}

LineSimulator::LineSimulator(LineConfig config) : config_(std::move(config)) {
    const auto diagnostics = validate(config_);
    if (!diagnostics.empty()) {
        std::string msg = "invalid line config:";
        for (const auto& d : diagnostics) msg += "\n  " + d;
        throw DomainError(msg);
    }
    graph_ = track::TrackGraph(config_.segments);
}

const Station* LineSimulator::station(const std::string& id) const {
    for (const auto& s : config_.stations) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

int LineSimulator::mover_index(const std::string& id) const {
    for (std::size_t i = 0; i < config_.movers.size(); ++i) {
        if (config_.movers[i].id == id) return static_cast<int>(i);
    }
    return -1;
}

long long LineSimulator::dwell_ticks(const Station& s) const {
    return static_cast<long long>(std::ceil(s.process_time / config_.dt - 1e-9));
}

LineState LineSimulator::initial_state() const {
    LineState st;
    for (const auto& mc : config_.movers) {
        MoverRuntime m;
        m.id = mc.id;
        m.mass = mc.mass;
        m.segment = *graph_.segment_index(mc.segment);
        m.offset = mc.offset;
        st.movers.push_back(std::move(m));
    }
    return st;
}

void LineSimulator::place(MoverRuntime& m) const {
    double start = 0.0;
    const std::size_t k = path_segment(graph_, m, &start);
    m.segment = m.path[k];
    m.offset = std::clamp(m.path_pos - start, 0.0, graph_.segment(m.segment).length);
}

double LineSimulator::obstacle_distance(const LineState& state, std::size_t i) const {
    const MoverRuntime& a = state.movers[i];
    if (a.mode != MoverMode::Moving || a.path.empty()) return inf;
    const double headway = config_.min_headway;

    double start0 = 0.0;
    const std::size_t k0 = path_segment(graph_, a, &start0);

    // Distance from `a` to the start of each remaining path segment and to the
    // node each one ends at.
    std::vector<double> seg_start(a.path.size(), 0.0);
    {
        double cum = 0.0;
        for (std::size_t k = 0; k < a.path.size(); ++k) {
            seg_start[k] = cum - a.path_pos;
            cum += graph_.segment(a.path[k]).length;
        }
    }
    std::map<std::string, std::pair<std::size_t, double>> path_nodes;  // node -> (k, distance)
    for (std::size_t k = k0; k < a.path.size(); ++k) {
        const auto& seg = graph_.segment(a.path[k]);
        path_nodes.emplace(seg.to_node, std::pair{k, seg_start[k] + seg.length});
    }

    double nearest = inf;
    for (std::size_t j = 0; j < state.movers.size(); ++j) {
        if (j == i) continue;
        const MoverRuntime& m = state.movers[j];

        // Directly ahead on the planned path, or behind on a segment already used.
        const auto on_path = std::find(a.path.begin(), a.path.end(), m.segment);
        if (on_path != a.path.end()) {
            const auto k = static_cast<std::size_t>(on_path - a.path.begin());
            if (k < k0) continue;
            const double rel = seg_start[k] + m.offset;
            if (k == k0 && (rel < 0.0 || (rel == 0.0 && j > i))) continue;
            nearest = std::min(nearest, rel);
            continue;
        }

        // Just past a node on the path, on a branch the path does not take.
        const auto& mseg = graph_.segment(m.segment);
        if (const auto it = path_nodes.find(mseg.from_node); it != path_nodes.end() && m.offset < headway) {
            nearest = std::min(nearest, it->second.second + m.offset);
        }

        // Converging on a node of the path from another branch: the mover that
        // is closer to the node goes first (ties by order in the config).
        std::set<std::string> passes;
        if (m.mode == MoverMode::Moving && !m.path.empty()) {
            double mstart = 0.0;
            const std::size_t mk = path_segment(graph_, m, &mstart);
            double cum = mstart;
            for (std::size_t k = mk; k < m.path.size(); ++k) {
                const auto& seg = graph_.segment(m.path[k]);
                cum += seg.length;
                const auto it = path_nodes.find(seg.to_node);
                if (it == path_nodes.end()) continue;
                passes.insert(seg.to_node);
                const double d_node_a = it->second.second;
                const double d_node_m = cum - m.path_pos;
                if (d_node_m < d_node_a || (d_node_m == d_node_a && j < i)) {
                    nearest = std::min(nearest, d_node_a - d_node_m);
                }
            }
        }
        // Resting (now or at the end of its plan) just short of a path node.
        const RestPoint rest = rest_point(graph_, m);
        const auto& rseg = graph_.segment(rest.segment);
        if (const auto it = path_nodes.find(rseg.to_node); it != path_nodes.end() && !passes.count(rseg.to_node)) {
            const double short_by = rseg.length - rest.offset;
            if (short_by < headway) nearest = std::min(nearest, it->second.second + short_by);
        }
    }
    return nearest;
}

double LineSimulator::slack(const LineState& state, std::size_t i) const {
    const MoverRuntime& m = state.movers[i];
    if (m.mode != MoverMode::Moving) return inf;
    const double stopping = m.velocity * m.velocity / (2.0 * m.a_cap);
    return obstacle_distance(state, i) - config_.min_headway - stopping;
}

bool LineSimulator::start_goal(LineState& state, std::size_t i, std::vector<Event>& events) const {
    MoverRuntime& m = state.movers[i];
    const std::string goal = m.queue.front();
    const Station& st = *station(goal);
    const auto& seg = graph_.segment(m.segment);
    const double t_after = static_cast<double>(state.tick + 1) * config_.dt;

    const bool at_end = seg.to_node == st.node && m.offset == seg.length;
    const bool at_start = seg.from_node == st.node && m.offset == 0.0;
    if (at_end || at_start) {
        m.queue.pop_front();
        m.goal = goal;
        events.push_back({t_after, state.tick + 1, m.id, EventType::Arrival, goal});
        m.mode = MoverMode::Dwelling;
        m.dwell_left = dwell_ticks(st);
        m.velocity = 0.0;
        m.acceleration = 0.0;
        if (m.dwell_left <= 0) {
            events.push_back({t_after, state.tick + 1, m.id, EventType::DwellComplete, goal});
            m.mode = MoverMode::Idle;
        }
        return true;
    }

    const auto tail = graph_.shortest_path(seg.to_node, st.node, track::traversal_time);
    if (!tail) {
        throw SimulationError(state.tick + 1, "mover '" + m.id + "' cannot reach station '" + goal + "'");
    }
    std::vector<double> before(state.movers.size());
    for (std::size_t j = 0; j < state.movers.size(); ++j) before[j] = slack(state, j);

    MoverRuntime saved = m;
    m.goal = goal;
    m.path = {m.segment};
    m.path.insert(m.path.end(), tail->segments.begin(), tail->segments.end());
    m.path_pos = m.offset;
    m.path_length = 0.0;
    m.v_cap = inf;
    m.a_cap = inf;
    for (const int s : m.path) {
        const auto& ps = graph_.segment(s);
        m.path_length += ps.length;
        m.v_cap = std::min(m.v_cap, ps.v_limit);
        m.a_cap = std::min(m.a_cap, ps.a_limit);
    }
    m.profile = control::plan_trapezoid(m.path_length - m.path_pos, m.v_cap, m.a_cap);
    m.profile_origin = m.path_pos;
    m.profile_ticks = 0;
    m.replan = false;
    m.mode = MoverMode::Moving;

    // Departing must not leave any other moving mover unable to stop in time.
    for (std::size_t j = 0; j < state.movers.size(); ++j) {
        if (j == i || state.movers[j].mode != MoverMode::Moving) continue;
        const double after = slack(state, j);
        if (after < -1e-12 && after < before[j] - 1e-12) {
            state.movers[i] = std::move(saved);
            return false;
        }
    }
    m.queue.pop_front();
    return true;
}

void LineSimulator::advance(LineState& state, std::span<const GoalCommand> commands) const {
    std::vector<int> targets;
    targets.reserve(commands.size());
    for (const auto& c : commands) {
        const int idx = mover_index(c.mover);
        if (idx < 0) throw DomainError("command names unknown mover '" + c.mover + "'");
        if (!station(c.station)) throw DomainError("command names unknown station '" + c.station + "'");
        targets.push_back(idx);
    }
    for (std::size_t c = 0; c < commands.size(); ++c) {
        state.movers[static_cast<std::size_t>(targets[c])].queue.push_back(commands[c].station);
    }

    const long long tick = state.tick + 1;
    const double t_after = static_cast<double>(tick) * config_.dt;
    const double dt = config_.dt;
    const double headway = config_.min_headway;
    std::vector<Event> events;

    // A mover that finishes dwelling this tick spent the whole tick at the
    // station, so its next goal starts on the following tick.
    std::vector<bool> just_released(state.movers.size(), false);
    for (std::size_t i = 0; i < state.movers.size(); ++i) {
        auto& m = state.movers[i];
        if (m.mode != MoverMode::Dwelling) continue;
        if (--m.dwell_left <= 0) {
            events.push_back({t_after, tick, m.id, EventType::DwellComplete, m.goal});
            m.mode = MoverMode::Idle;
            just_released[i] = true;
        }
    }

    for (std::size_t i = 0; i < state.movers.size(); ++i) {
        auto& m = state.movers[i];
        if (m.mode == MoverMode::Idle && !just_released[i]) {
            m.velocity = 0.0;
            m.acceleration = 0.0;
            if (!m.queue.empty()) start_goal(state, i, events);
        }
    }

    // Every mover reacts to where the others were at the start of the tick.
    const LineState view{state.movers, state.tick, state.clock, {}};
    for (std::size_t i = 0; i < state.movers.size(); ++i) {
        auto& m = state.movers[i];
        if (m.mode != MoverMode::Moving) continue;

        if (m.replan) {
            m.profile = control::plan_from_velocity(m.velocity, std::max(0.0, m.path_length - m.path_pos), m.v_cap,
                                                    m.a_cap);
            m.profile_origin = m.path_pos;
            m.profile_ticks = 0;
            m.replan = false;
        }

        const double limit = obstacle_distance(view, i);
        const auto next = control::profile_sample(m.profile, static_cast<double>(m.profile_ticks + 1) * dt);
        const double travel = m.profile_origin + next.position - m.path_pos;
        const double stopping = next.velocity * next.velocity / (2.0 * m.a_cap);

        double moved = 0.0;
        if (travel + stopping + headway <= limit * (1.0 + 1e-12)) {
            m.path_pos = m.profile_origin + next.position;
            moved = travel;
            m.velocity = next.velocity;
            m.acceleration = next.acceleration;
            ++m.profile_ticks;
        } else {
            const double v = std::max(0.0, m.velocity - m.a_cap * dt);
            moved = std::min(v * dt, std::max(0.0, m.path_length - m.path_pos));
            m.acceleration = (v - m.velocity) / dt;
            m.velocity = v;
            m.path_pos += moved;
            m.replan = true;
            events.push_back({t_after, tick, m.id, EventType::HeadwayIntervention, {}});
        }
        if (!std::isfinite(m.path_pos) || !std::isfinite(m.velocity)) {
            throw SimulationError(tick, "mover '" + m.id + "' state became non-finite");
        }
        m.odometer += moved;
        place(m);

        const bool finished = !m.replan && static_cast<double>(m.profile_ticks) * dt >= m.profile.total_time - 1e-9 * dt;
        if (finished) {
            m.odometer += m.path_length - m.path_pos;
            m.path_pos = m.path_length;
            place(m);
            m.velocity = 0.0;
            m.acceleration = 0.0;
            m.mode = MoverMode::Dwelling;
            const Station& st = *station(m.goal);
            m.dwell_left = dwell_ticks(st);
            events.push_back({t_after, tick, m.id, EventType::Arrival, m.goal});
            if (m.dwell_left <= 0) {
                events.push_back({t_after, tick, m.id, EventType::DwellComplete, m.goal});
                m.mode = MoverMode::Idle;
            }
        }
    }

    state.tick = tick;
    state.clock = t_after;
    state.events.insert(state.events.end(), events.begin(), events.end());
}

double LineSimulator::min_same_segment_separation(const LineState& state) {
    double best = inf;
    for (std::size_t a = 0; a < state.movers.size(); ++a) {
        for (std::size_t b = a + 1; b < state.movers.size(); ++b) {
            if (state.movers[a].segment == state.movers[b].segment) {
                best = std::min(best, std::abs(state.movers[a].offset - state.movers[b].offset));
            }
        }
    }
    return best;
}

LineState advance(LineState state, const LineConfig& config, std::span<const GoalCommand> commands) {
    const LineSimulator sim(config);
    sim.advance(state, commands);
    return state;
}

RunResult run(const LineConfig& config, std::span<const TimedCommand> script, double t_end,
              const TickObserver& observer) {
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be >= 0");
    for (std::size_t k = 1; k < script.size(); ++k) {
        if (script[k].t < script[k - 1].t) throw DomainError("script timestamps must be sorted");
    }
    const LineSimulator sim(config);
    LineState state = sim.initial_state();

    RunResult result;
    for (const auto& m : state.movers) result.trajectories.push_back({m.id, {}});
    const auto record = [&] {
        for (std::size_t i = 0; i < state.movers.size(); ++i) {
            const auto& m = state.movers[i];
            result.trajectories[i].samples.push_back({state.clock, m.odometer, m.velocity, m.acceleration});
        }
        if (observer) observer(sim, state);
    };
    record();

    const double dt = sim.config().dt;
    const long long ticks = dynamics::full_steps(t_end, dt);
    std::size_t next = 0;
    std::vector<GoalCommand> due;
    for (long long k = 0; k < ticks; ++k) {
        due.clear();
        const double start = static_cast<double>(k) * dt;
        while (next < script.size() && script[next].t <= start + 1e-9 * dt) {
            due.push_back({script[next].mover, script[next].station});
            ++next;
        }
        try {
            sim.advance(state, due);
        } catch (const SimulationError&) {
            throw;
        } catch (const DomainError& e) {
            throw SimulationError(k + 1, e.what());
        }
        record();
    }
    result.events = state.events;
    result.final_state = std::move(state);
    return result;
}

}  // namespace maglev::line
