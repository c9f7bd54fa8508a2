#include "runner.hpp"

#include "control.hpp"
#include "dispatch.hpp"
#include "error.hpp"
#include "line.hpp"

#include <future>
#include <fstream>
#include <sstream>

namespace maglev::runner {

using nlohmann::ordered_json;

SimulationOutput simulate(const scenario::Scenario& sc) {
    std::vector<control::GapLoop> loops;
    for (const auto& m : sc.line.movers) {
        loops.emplace_back(control::linearize_gap(sc.levitation.geometry, m.mass), sc.levitation.pid,
                           sc.levitation.initial_gap);
    }
    const long long last_tick = dynamics::full_steps(sc.t_end, sc.dt);

    std::vector<telemetry::TelemetryRecord> records;
    std::size_t seen_events = 0;
    const auto observe = [&](const line::LineSimulator&, const line::LineState& state) {
        std::vector<control::GapLoop::Sample> gap(loops.size());
        for (std::size_t i = 0; i < loops.size(); ++i) {
            gap[i] = state.tick == 0 ? loops[i].current() : loops[i].step(sc.dt);
        }
        std::vector<std::string> tags(state.movers.size());
        bool any_event = false;
        for (; seen_events < state.events.size(); ++seen_events) {
            const auto& e = state.events[seen_events];
            for (std::size_t i = 0; i < state.movers.size(); ++i) {
                if (state.movers[i].id != e.mover) continue;
                if (!tags[i].empty()) tags[i] += ';';
                tags[i] += line::to_string(e.type);
                any_event = true;
            }
        }
        const bool due = state.tick % sc.record_every == 0 || state.tick == last_tick || any_event;
        if (!due) return;
        for (std::size_t i = 0; i < state.movers.size(); ++i) {
            const auto& m = state.movers[i];
            const double force = sc.drag.drive_for(m.mass, m.acceleration, m.velocity);
            telemetry::TelemetryRecord r;
            r.t = state.clock;
            r.mover = m.id;
            r.position = m.odometer;
            r.velocity = m.velocity;
            r.gap = gap[i].gap;
            r.lev_current = gap[i].current;
            r.drive_iq = control::iq_for_force(sc.motor.psi_d, sc.motor.tau, force);
            r.event = std::move(tags[i]);
            records.push_back(std::move(r));
        }
    };
    const auto result = line::run(sc.line, sc.script, sc.t_end, observe);

    // Records are grouped per tick; summarize expects each mover's stream in order, which holds.
    SimulationOutput out;
    out.summary = telemetry::summarize(records, result.events, static_cast<double>(last_tick) * sc.dt);
    std::ostringstream csv;
    telemetry::write_csv(csv, records);
    out.trajectory_csv = csv.str();
    out.events_json = telemetry::events_json(result.events);
    out.summary_json = telemetry::summary_json(out.summary);
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f << text;
    f.close();
    if (!f) throw IoError("error writing '" + path.string() + "'");
}

void make_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::vector<dispatch::StationRef> station_refs(const scenario::Scenario& sc) {
    std::vector<dispatch::StationRef> out;
    for (const auto& s : sc.line.stations) out.push_back({s.id, s.node});
    return out;
}

}  // namespace

void write_outputs(const SimulationOutput& out, const std::filesystem::path& dir) {
    make_dir(dir);
    write_file(dir / "trajectory.csv", out.trajectory_csv);
    write_file(dir / "events.json", out.events_json);
    write_file(dir / "summary.json", out.summary_json);
}

std::string route_json(const scenario::Scenario& sc, const std::string& from, const std::string& to) {
    const track::TrackGraph graph(sc.line.segments);
    const auto r = dispatch::route(graph, from, to, sc.congestion);
    ordered_json j;
    j["from"] = from;
    j["to"] = to;
    j["reachable"] = r.has_value();
    if (r) {
        j["path"] = r->path.nodes;
        ordered_json segs = ordered_json::array();
        for (const int s : r->path.segments) segs.push_back(graph.segment(static_cast<std::size_t>(s)).id);
        j["segments"] = segs;
        j["eta"] = r->eta;
    }
    return j.dump(2) + "\n";
}

std::string dispatch_json(const scenario::Scenario& sc, const std::string& method) {
    const track::TrackGraph graph(sc.line.segments);
    std::vector<dispatch::MoverStart> starts;
    for (const auto& m : sc.line.movers) starts.push_back(scenario::mover_start(graph, m));
    const auto problem = dispatch::make_problem(graph, station_refs(sc), starts, sc.jobs, sc.congestion);

    dispatch::Schedule s;
    if (method == "greedy") {
        s = dispatch::assign_greedy(problem);
    } else if (method == "local") {
        s = dispatch::assign_local_search(problem, dispatch::assign_greedy(problem), sc.search_iterations,
                                          sc.rng_seed);
    } else if (method == "brute") {
        s = dispatch::brute_force(problem);
    } else {
        throw DomainError("unknown dispatch method '" + method + "' (greedy, local, brute)");
    }

    ordered_json j;
    j["method"] = method;
    j["makespan"] = s.makespan;
    ordered_json movers = ordered_json::array();
    for (std::size_t m = 0; m < s.sequences.size(); ++m) {
        ordered_json entry;
        entry["mover"] = problem.movers[m].id;
        ordered_json jobs = ordered_json::array();
        for (const std::size_t k : s.sequences[m]) {
            ordered_json job;
            job["job"] = problem.jobs[k].id;
            job["station"] = problem.jobs[k].station;
            job["start"] = s.timing[k].start;
            job["end"] = s.timing[k].end;
            jobs.push_back(std::move(job));
        }
        entry["jobs"] = std::move(jobs);
        movers.push_back(std::move(entry));
    }
    j["movers"] = std::move(movers);
    return j.dump(2) + "\n";
}

void sweep(const nlohmann::json& document, const std::string& param, const std::vector<double>& values,
           const std::filesystem::path& dir) {
    if (values.empty()) throw DomainError("sweep needs at least one value");
    std::vector<scenario::Scenario> runs;
    for (const double v : values) {
        auto doc = document;
        scenario::set_param(doc, param, v);
        auto loaded = scenario::from_document(std::move(doc));
        if (!loaded.ok()) {
            std::string msg = param + "=" + telemetry::format_number(v) + ": invalid scenario";
            for (const auto& d : loaded.diagnostics) msg += "\n  " + d;
            throw DomainError(msg);
        }
        runs.push_back(std::move(loaded.scenario));
    }

    std::vector<std::future<SimulationOutput>> jobs;
    for (const auto& sc : runs) jobs.push_back(std::async(std::launch::async, [&sc] { return simulate(sc); }));
    std::vector<SimulationOutput> outputs;
    for (auto& f : jobs) outputs.push_back(f.get());

    make_dir(dir);
    std::ostringstream csv;
    csv << "value,jobs_completed,throughput,energy_proxy,headway_interventions,total_distance\n";
    for (std::size_t k = 0; k < values.size(); ++k) {
        const std::string v = telemetry::format_number(values[k]);
        write_outputs(outputs[k], dir / (param + "=" + v));
        const auto& s = outputs[k].summary;
        double distance = 0.0;
        for (const auto& [id, d] : s.distance_per_mover) distance += d;
        csv << v << ',' << s.jobs_completed << ',' << telemetry::format_number(s.throughput) << ','
            << telemetry::format_number(s.energy_proxy) << ',' << s.headway_interventions << ','
            << telemetry::format_number(distance) << '\n';
    }
    write_file(dir / "sweep.csv", csv.str());
}

}  // namespace maglev::runner
