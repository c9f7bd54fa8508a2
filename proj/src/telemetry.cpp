#include "telemetry.hpp"

#include "error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>

namespace maglev::telemetry {

std::vector<std::size_t> zscore_anomalies(std::span<const double> series, std::size_t window, double threshold) {
    if (window < 2) throw DomainError("anomaly window must be >= 2");
    if (!(threshold > 0.0)) throw DomainError("anomaly threshold must be > 0");
    std::vector<std::size_t> flagged;
    if (window >= series.size()) return flagged;

    for (std::size_t i = window; i < series.size(); ++i) {
        const auto prev = series.subspan(i - window, window);
        const auto [lo, hi] = std::minmax_element(prev.begin(), prev.end());
        double mean = 0.0;
        double sigma = 0.0;
        if (*lo == *hi) {
            mean = *lo;
        } else {
            for (const double x : prev) mean += x;
            mean /= static_cast<double>(window);
            double ss = 0.0;
            for (const double x : prev) ss += (x - mean) * (x - mean);
            sigma = std::sqrt(ss / static_cast<double>(window));
        }
        const double dev = std::abs(series[i] - mean);
        const bool hit = sigma > 0.0 ? dev > threshold * sigma : (dev > 0.0 && std::isfinite(threshold));
        if (hit) flagged.push_back(i);
    }
    return flagged;
}

RunSummary summarize(std::span<const TelemetryRecord> records, std::span<const line::Event> events, double duration) {
    RunSummary s;
    for (const auto& e : events) {
        if (e.type == line::EventType::DwellComplete) ++s.jobs_completed;
        if (e.type == line::EventType::HeadwayIntervention) ++s.headway_interventions;
    }

    std::map<std::string, const TelemetryRecord*> last;
    std::map<std::string, std::size_t> slot;
    double t_min = 0.0;
    double t_max = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (i == 0) t_min = t_max = r.t;
        t_min = std::min(t_min, r.t);
        t_max = std::max(t_max, r.t);
        const auto it = last.find(r.mover);
        if (it == last.end()) {
            slot[r.mover] = s.distance_per_mover.size();
            s.distance_per_mover.emplace_back(r.mover, 0.0);
        } else {
            const TelemetryRecord& p = *it->second;
            s.distance_per_mover[slot[r.mover]].second += std::abs(r.position - p.position);
            s.energy_proxy += (p.lev_current * p.lev_current + p.drive_iq * p.drive_iq) * (r.t - p.t);
        }
        last[r.mover] = &r;
    }
    const double span = duration >= 0.0 ? duration : t_max - t_min;
    s.throughput = span > 0.0 ? static_cast<double>(s.jobs_completed) / span : 0.0;
    return s;
}

std::string format_number(double value) {
    if (value == 0.0) return "0";  // also folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, std::span<const TelemetryRecord> records) {
    out << csv_header << '\n';
    for (const auto& r : records) {
        out << format_number(r.t) << ',' << r.mover << ',' << format_number(r.position) << ','
            << format_number(r.velocity) << ',' << format_number(r.gap) << ',' << format_number(r.lev_current)
            << ',' << format_number(r.drive_iq) << ',' << r.event << '\n';
    }
}

std::string summary_json(const RunSummary& s) {
    nlohmann::ordered_json j;
    j["jobs_completed"] = s.jobs_completed;
    j["throughput"] = s.throughput;
    nlohmann::ordered_json dist = nlohmann::ordered_json::object();
    for (const auto& [mover, d] : s.distance_per_mover) dist[mover] = d;
    j["distance_per_mover"] = dist;
    j["energy_proxy"] = s.energy_proxy;
    j["headway_interventions"] = s.headway_interventions;
    return j.dump(2) + "\n";
}

std::string events_json(std::span<const line::Event> events) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : events) {
        nlohmann::ordered_json j;
        j["t"] = e.t;
        j["tick"] = e.tick;
        j["mover"] = e.mover;
        j["type"] = line::to_string(e.type);
        if (!e.station.empty()) j["station"] = e.station;
        arr.push_back(std::move(j));
    }
    nlohmann::ordered_json root;
    root["events"] = std::move(arr);
    return root.dump(2) + "\n";
}

}  // namespace maglev::telemetry
