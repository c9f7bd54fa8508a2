#pragma once

// Congestion-aware routing and job-to-mover assignment: a greedy dispatcher,
// a local-search refinement, and an exhaustive oracle for small instances.

#include "track.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace maglev::dispatch {

struct Job {
    std::string id;
    std::string station;
    double processing_time = 0.0;  ///< [s]
    double release_time = 0.0;     ///< [s]
};

/// Where a mover becomes available: `lead_time` seconds after t = 0 it is at `node`.
struct MoverStart {
    std::string id;
    std::string node;
    double lead_time = 0.0;
};

/// Per-segment multiplier (>= 1) on nominal traversal time. Missing segments are 1.
using CongestionMap = std::map<std::string, double>;

/// Throws DomainError for a multiplier below 1, non-finite, or naming an unknown segment.
void validate(const CongestionMap& congestion, const track::TrackGraph& graph);

struct Route {
    track::Path path;
    double eta = 0.0;  ///< [s]
};

/// Minimal-ETA route. A segment costs its rest-to-rest traversal time times its
/// congestion multiplier. Ties go to the lexicographically smaller node path.
/// Returns nullopt when `to` is unreachable.
std::optional<Route> route(const track::TrackGraph& graph, const std::string& from, const std::string& to,
                           const CongestionMap& congestion);

struct Problem {
    std::vector<MoverStart> movers;
    std::vector<Job> jobs;
    std::vector<std::string> nodes;           ///< distinct nodes referenced by movers and jobs
    std::vector<std::size_t> mover_node;      ///< index into nodes
    std::vector<std::size_t> job_node;        ///< index into nodes
    std::vector<std::vector<double>> travel;  ///< ETA between nodes, +inf if unreachable
};

struct StationRef {
    std::string id;
    std::string node;
};

/// Resolves stations to nodes and precomputes the travel-time table.
/// Throws DomainError for unknown stations or nodes.
Problem make_problem(const track::TrackGraph& graph, const std::vector<StationRef>& stations,
                     std::vector<MoverStart> movers, std::vector<Job> jobs, const CongestionMap& congestion);

struct JobTiming {
    double start = 0.0;  ///< processing start [s]
    double end = 0.0;    ///< processing end [s]
};

struct Schedule {
    std::vector<std::vector<std::size_t>> sequences;  ///< per mover, ordered job indices
    std::vector<JobTiming> timing;                    ///< per job
    double makespan = 0.0;
};

/// Times a set of per-mover job sequences: each mover travels to the next
/// job's station, waits for its release, then processes it.
Schedule evaluate(const Problem& problem, std::vector<std::vector<std::size_t>> sequences);

/// Structural checks: every job exactly once, releases respected, no overlap
/// on a mover including travel, makespan equals the last end.
std::vector<std::string> check(const Problem& problem, const Schedule& schedule);

/// Jobs in release order (ties by id), each to the mover that would finish it
/// first (ties by mover order). Throws DomainError naming a job no mover can reach.
Schedule assign_greedy(const Problem& problem);

/// Best-improvement relocate/swap search over (makespan, sum of job ends),
/// kicked by a seeded random relocation at each local optimum. The result
/// never has a larger makespan than `seed`; iterations = 0 returns `seed`.
Schedule assign_local_search(const Problem& problem, const Schedule& seed, int iterations, std::uint64_t rng_seed);

inline constexpr std::size_t brute_force_max_jobs = 8;
inline constexpr std::size_t brute_force_max_movers = 4;

/// Exhaustive search over assignments and per-mover orders. The first
/// minimum-makespan schedule in enumeration order wins. Throws DomainError
/// beyond 8 jobs or 4 movers.
Schedule brute_force(const Problem& problem);

}  // namespace maglev::dispatch
