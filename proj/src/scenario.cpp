#include "scenario.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace maglev::scenario {

using nlohmann::json;

namespace {

// Walks the document, recording one diagnostic per missing or mistyped field.
class Reader {
public:
    explicit Reader(std::vector<std::string>& diags) : diags_(diags) {}

    const json* object(const json& parent, const std::string& key, const std::string& path, bool required) {
        const json* v = find(parent, key, path, required);
        if (v && !v->is_object()) {
            fail(join(path, key) + " must be an object");
            return nullptr;
        }
        return v;
    }

    const json* array(const json& parent, const std::string& key, const std::string& path, bool required) {
        const json* v = find(parent, key, path, required);
        if (v && !v->is_array()) {
            fail(join(path, key) + " must be an array");
            return nullptr;
        }
        return v;
    }

    double number(const json& parent, const std::string& key, const std::string& path, std::optional<double> fallback) {
        const json* v = find(parent, key, path, !fallback.has_value());
        if (!v) return fallback.value_or(0.0);
        if (!v->is_number()) {
            fail(join(path, key) + " must be a number");
            return fallback.value_or(0.0);
        }
        return v->get<double>();
    }

    long long integer(const json& parent, const std::string& key, const std::string& path, std::optional<long long> fallback) {
        const double d = number(parent, key, path, fallback ? std::optional<double>(static_cast<double>(*fallback)) : std::nullopt);
        if (d != std::floor(d)) {
            fail(join(path, key) + " must be an integer");
            return fallback.value_or(0);
        }
        return static_cast<long long>(d);
    }

    std::string string(const json& parent, const std::string& key, const std::string& path, std::optional<std::string> fallback) {
        const json* v = find(parent, key, path, !fallback.has_value());
        if (!v) return fallback.value_or("");
        if (!v->is_string()) {
            fail(join(path, key) + " must be a string");
            return fallback.value_or("");
        }
        return v->get<std::string>();
    }

    bool has(const json& parent, const std::string& key) const { return parent.is_object() && parent.contains(key); }

    void fail(std::string msg) { diags_.push_back(std::move(msg)); }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

private:
    const json* find(const json& parent, const std::string& key, const std::string& path, bool required) {
        if (parent.is_object()) {
            const auto it = parent.find(key);
            if (it != parent.end()) return &*it;
        }
        if (required) fail("missing required field '" + join(path, key) + "'");
        return nullptr;
    }

    std::vector<std::string>& diags_;
};

std::string at(const std::string& path, std::size_t i) { return path + "." + std::to_string(i); }

void read_line(Reader& r, const json& doc, Scenario& sc) {
    const json* ln = r.object(doc, "line", "", true);
    if (!ln) return;
    sc.line.min_headway = r.number(*ln, "min_headway", "line", std::nullopt);

    if (const json* segs = r.array(*ln, "segments", "line", true)) {
        for (std::size_t i = 0; i < segs->size(); ++i) {
            const json& s = (*segs)[i];
            const std::string p = at("line.segments", i);
            track::TrackSegment seg;
            seg.id = r.string(s, "id", p, std::nullopt);
            seg.from_node = r.string(s, "from", p, std::nullopt);
            seg.to_node = r.string(s, "to", p, std::nullopt);
            seg.length = r.number(s, "length", p, std::nullopt);
            seg.v_limit = r.number(s, "v_limit", p, std::nullopt);
            seg.a_limit = r.number(s, "a_limit", p, std::nullopt);
            sc.line.segments.push_back(std::move(seg));
        }
    }
    if (const json* sts = r.array(*ln, "stations", "line", false)) {
        for (std::size_t i = 0; i < sts->size(); ++i) {
            const json& s = (*sts)[i];
            const std::string p = at("line.stations", i);
            line::Station st;
            st.id = r.string(s, "id", p, std::nullopt);
            st.node = r.string(s, "node", p, std::nullopt);
            st.process_time = r.number(s, "process_time", p, 0.0);
            st.name = r.string(s, "name", p, st.id);
            sc.line.stations.push_back(std::move(st));
        }
    }
    const track::TrackGraph graph(sc.line.segments);
    if (const json* mvs = r.array(*ln, "movers", "line", false)) {
        for (std::size_t i = 0; i < mvs->size(); ++i) {
            const json& m = (*mvs)[i];
            const std::string p = at("line.movers", i);
            line::MoverConfig mc;
            mc.id = r.string(m, "id", p, std::nullopt);
            mc.mass = r.number(m, "mass", p, 1.0);
            if (r.has(m, "node")) {
                const std::string node = r.string(m, "node", p, std::nullopt);
                if (const auto& in = graph.in_segments(node); !in.empty()) {
                    mc.segment = graph.segment(in.front()).id;
                    mc.offset = graph.segment(in.front()).length;
                } else if (const auto& out = graph.out_segments(node); !out.empty()) {
                    mc.segment = graph.segment(out.front()).id;
                    mc.offset = 0.0;
                } else {
                    r.fail(p + ".node: node '" + node + "' does not exist");
                    continue;
                }
            } else {
                mc.segment = r.string(m, "segment", p, std::nullopt);
                mc.offset = r.number(m, "offset", p, 0.0);
            }
            sc.line.movers.push_back(std::move(mc));
        }
    }
}

void read_hardware(Reader& r, const json& doc, Scenario& sc) {
    if (const json* lev = r.object(doc, "levitation", "", false)) {
        auto& L = sc.levitation;
        L.geometry.turns = static_cast<int>(r.integer(*lev, "turns", "levitation", L.geometry.turns));
        L.geometry.pole_area = r.number(*lev, "pole_area", "levitation", L.geometry.pole_area);
        L.geometry.gap = r.number(*lev, "gap", "levitation", L.geometry.gap);
        L.initial_gap = r.number(*lev, "initial_gap", "levitation", L.geometry.gap);
        if (const json* pid = r.object(*lev, "pid", "levitation", false)) {
            auto& g = L.pid;
            g.kp = r.number(*pid, "kp", "levitation.pid", g.kp);
            g.ki = r.number(*pid, "ki", "levitation.pid", g.ki);
            g.kd = r.number(*pid, "kd", "levitation.pid", g.kd);
            g.output_min = r.number(*pid, "output_min", "levitation.pid", g.output_min);
            g.output_max = r.number(*pid, "output_max", "levitation.pid", g.output_max);
            g.integral_limit = r.number(*pid, "integral_limit", "levitation.pid", g.integral_limit);
        }
    } else {
        sc.levitation.initial_gap = sc.levitation.geometry.gap;
    }
    if (const json* mot = r.object(doc, "motor", "", false)) {
        sc.motor.psi_d = r.number(*mot, "psi_d", "motor", sc.motor.psi_d);
        sc.motor.psi_q = r.number(*mot, "psi_q", "motor", sc.motor.psi_q);
        sc.motor.tau = r.number(*mot, "tau", "motor", sc.motor.tau);
    }
    if (const json* drag = r.object(doc, "drag", "", false)) {
        sc.drag.friction = r.number(*drag, "friction", "drag", 0.0);
        sc.drag.c_b = r.number(*drag, "c_b", "drag", 0.0);
    }
    if (const json* mag = r.object(doc, "magnet", "", false)) {
        emfield::MagnetSpec m;
        m.remanence = r.number(*mag, "remanence", "magnet", std::nullopt);
        m.volume = r.number(*mag, "volume", "magnet", std::nullopt);
        m.density = r.number(*mag, "density", "magnet", m.density);
        sc.magnet = m;
    }
}

void read_work(Reader& r, const json& doc, Scenario& sc) {
    if (const json* jobs = r.array(doc, "jobs", "", false)) {
        for (std::size_t i = 0; i < jobs->size(); ++i) {
            const json& j = (*jobs)[i];
            const std::string p = at("jobs", i);
            dispatch::Job job;
            job.id = r.string(j, "id", p, std::nullopt);
            job.station = r.string(j, "station", p, std::nullopt);
            job.processing_time = r.number(j, "processing_time", p, std::nullopt);
            job.release_time = r.number(j, "release_time", p, 0.0);
            sc.jobs.push_back(std::move(job));
        }
    }
    if (const json* cong = r.object(doc, "congestion", "", false)) {
        for (const auto& [seg, v] : cong->items()) {
            sc.congestion[seg] = r.number(*cong, seg, "congestion", std::nullopt);
        }
    }
    if (const json* script = r.array(doc, "script", "", false)) {
        for (std::size_t i = 0; i < script->size(); ++i) {
            const json& c = (*script)[i];
            const std::string p = at("script", i);
            line::TimedCommand cmd;
            cmd.t = r.number(c, "t", p, std::nullopt);
            cmd.mover = r.string(c, "mover", p, std::nullopt);
            cmd.station = r.string(c, "station", p, std::nullopt);
            sc.script.push_back(std::move(cmd));
        }
    }
}

template <typename F>
void guard(std::vector<std::string>& diags, const std::string& prefix, F&& f) {
    try {
        f();
    } catch (const DomainError& e) {
        diags.push_back(prefix + e.what());
    }
}

void cross_check(const Scenario& sc, std::vector<std::string>& diags) {
    if (!(sc.t_end >= 0.0) || !std::isfinite(sc.t_end)) diags.push_back("t_end must be >= 0");
    if (sc.record_every < 1) diags.push_back("record_every must be >= 1");
    if (sc.search_iterations < 0) diags.push_back("search_iterations must be >= 0");

    for (auto& d : line::validate(sc.line)) diags.push_back("line: " + d);

    std::set<std::string> movers;
    for (const auto& m : sc.line.movers) movers.insert(m.id);
    std::set<std::string> stations;
    for (const auto& s : sc.line.stations) stations.insert(s.id);

    for (std::size_t i = 0; i < sc.script.size(); ++i) {
        const auto& c = sc.script[i];
        const std::string p = "script." + std::to_string(i);
        if (!movers.count(c.mover)) diags.push_back(p + ": unknown mover '" + c.mover + "'");
        if (!stations.count(c.station)) diags.push_back(p + ": unknown station '" + c.station + "'");
        if (!(c.t >= 0.0) || !std::isfinite(c.t)) diags.push_back(p + ": t must be >= 0");
        if (i > 0 && c.t < sc.script[i - 1].t) diags.push_back(p + ": script timestamps must be sorted");
    }
    std::set<std::string> job_ids;
    for (const auto& j : sc.jobs) {
        if (!job_ids.insert(j.id).second) diags.push_back("job '" + j.id + "': duplicate id");
        if (!stations.count(j.station)) diags.push_back("job '" + j.id + "': unknown station '" + j.station + "'");
        if (!(j.processing_time >= 0.0)) diags.push_back("job '" + j.id + "': processing_time must be >= 0");
        if (!(j.release_time >= 0.0)) diags.push_back("job '" + j.id + "': release_time must be >= 0");
    }
    guard(diags, "congestion: ", [&] { dispatch::validate(sc.congestion, track::TrackGraph(sc.line.segments)); });
    guard(diags, "levitation: ", [&] {
        emfield::validate(sc.levitation.geometry);
        control::validate(sc.levitation.pid);
        if (!(sc.levitation.initial_gap > 0.0)) throw DomainError("initial_gap must be > 0");
    });
    guard(diags, "motor: ", [&] {
        if (!(sc.motor.tau > 0.0)) throw DomainError("tau must be > 0");
        if (sc.motor.psi_d == 0.0) throw DomainError("psi_d must be non-zero");
    });
    guard(diags, "drag: ", [&] {
        if (!(sc.drag.friction >= 0.0) || !(sc.drag.c_b >= 0.0)) throw DomainError("friction and c_b must be >= 0");
    });
    if (sc.magnet) guard(diags, "magnet: ", [&] { emfield::validate(*sc.magnet); });
}

}  // namespace

Loaded from_document(json document) {
    Loaded out;
    out.document = std::move(document);
    auto& diags = out.diagnostics;
    Reader r(diags);
    const json& doc = out.document;
    if (!doc.is_object()) {
        diags.push_back("scenario must be a JSON object");
        return out;
    }
    Scenario& sc = out.scenario;
    sc.name = r.string(doc, "name", "", std::string{});
    sc.dt = r.number(doc, "dt", "", std::nullopt);
    sc.t_end = r.number(doc, "t_end", "", std::nullopt);
    sc.rng_seed = static_cast<std::uint64_t>(r.integer(doc, "rng_seed", "", 0));
    sc.record_every = static_cast<int>(r.integer(doc, "record_every", "", 1));
    sc.search_iterations = static_cast<int>(r.integer(doc, "search_iterations", "", 200));
    read_line(r, doc, sc);
    sc.line.dt = sc.dt;
    read_hardware(r, doc, sc);
    read_work(r, doc, sc);
    if (diags.empty()) cross_check(sc, diags);
    return out;
}

Loaded parse(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("malformed scenario JSON: ") + e.what());
    }
    return from_document(std::move(doc));
}

Loaded load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read scenario file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("error reading scenario file '" + path.string() + "'");
    return parse(buf.str());
}

void set_param(json& document, const std::string& dotted, double value) {
    if (dotted.empty()) throw DomainError("empty parameter path");
    json* node = &document;
    std::stringstream parts(dotted);
    std::string part;
    while (std::getline(parts, part, '.')) {
        if (node->is_object()) {
            const auto it = node->find(part);
            if (it == node->end()) throw DomainError("parameter '" + dotted + "' not found at '" + part + "'");
            node = &*it;
        } else if (node->is_array()) {
            std::size_t idx = 0;
            try {
                std::size_t used = 0;
                idx = std::stoul(part, &used);
                if (used != part.size()) throw std::invalid_argument(part);
            } catch (const std::exception&) {
                throw DomainError("parameter '" + dotted + "': '" + part + "' is not an array index");
            }
            if (idx >= node->size()) throw DomainError("parameter '" + dotted + "': index " + part + " out of range");
            node = &(*node)[idx];
        } else {
            throw DomainError("parameter '" + dotted + "' descends into a non-container at '" + part + "'");
        }
    }
    if (!node->is_number()) throw DomainError("parameter '" + dotted + "' is not a numeric field");
    *node = value;
}

dispatch::MoverStart mover_start(const track::TrackGraph& graph, const line::MoverConfig& mover) {
    const auto idx = graph.segment_index(mover.segment);
    if (!idx) throw DomainError("mover '" + mover.id + "' is on unknown segment '" + mover.segment + "'");
    const auto& seg = graph.segment(*idx);
    if (mover.offset == 0.0 && seg.length > 0.0) return {mover.id, seg.from_node, 0.0};
    const double rest = seg.length - mover.offset;
    const double lead = rest > 0.0 ? control::plan_trapezoid(rest, seg.v_limit, seg.a_limit).total_time : 0.0;
    return {mover.id, seg.to_node, lead};
}

}  // namespace maglev::scenario
