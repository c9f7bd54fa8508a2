#pragma once

// Run recording, summary statistics and rolling z-score anomaly flags.

#include "line.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace maglev::telemetry {

struct TelemetryRecord {
    double t = 0.0;
    std::string mover;
    double position = 0.0;  ///< odometer [m]
    double velocity = 0.0;
    double gap = 0.0;
    double lev_current = 0.0;
    double drive_iq = 0.0;
    std::string event;  ///< event tags at this record, ';'-separated, may be empty
};

struct RunSummary {
    std::size_t jobs_completed = 0;
    double throughput = 0.0;  ///< jobs/s
    std::vector<std::pair<std::string, double>> distance_per_mover;  ///< [m], in first-seen order
    double energy_proxy = 0.0;  ///< integral of lev_current^2 + drive_iq^2 [A^2 s]
    std::size_t headway_interventions = 0;
};

/// Indices whose deviation from the mean of the preceding `window` samples
/// exceeds threshold standard deviations (population). A window with zero
/// spread flags any non-zero deviation unless the threshold is infinite.
/// The first `window` points are never flagged.
std::vector<std::size_t> zscore_anomalies(std::span<const double> series, std::size_t window, double threshold);

/// Aggregates one run. Energy uses the left rectangle rule between
/// consecutive records of each mover. Throughput divides by `duration`, or
/// by the record time span when duration is negative.
RunSummary summarize(std::span<const TelemetryRecord> records, std::span<const line::Event> events,
                     double duration = -1.0);

inline constexpr const char* csv_header = "t,mover,position,velocity,gap,lev_current,drive_iq,event";

/// Locale-independent shortest round-trip decimal.
std::string format_number(double value);

void write_csv(std::ostream& out, std::span<const TelemetryRecord> records);

std::string summary_json(const RunSummary& summary);
std::string events_json(std::span<const line::Event> events);

}  // namespace maglev::telemetry
