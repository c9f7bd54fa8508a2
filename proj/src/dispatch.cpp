#include "dispatch.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace maglev::dispatch {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double multiplier(const CongestionMap& congestion, const std::string& segment) {
    const auto it = congestion.find(segment);
    return it == congestion.end() ? 1.0 : it->second;
}

struct Key {
    double makespan = inf;
    double total = inf;
};

Key key_of(const Schedule& s) {
    double total = 0.0;
    for (const auto& t : s.timing) total += t.end;
    return {s.makespan, total};
}

bool improves(const Key& a, const Key& b) {
    const double tol = 1e-9;
    if (a.makespan < b.makespan - tol) return true;
    if (a.makespan > b.makespan + tol) return false;
    return a.total < b.total - tol;
}

}  // namespace

void validate(const CongestionMap& congestion, const track::TrackGraph& graph) {
    for (const auto& [seg, m] : congestion) {
        if (!graph.segment_index(seg)) throw DomainError("congestion names unknown segment '" + seg + "'");
        if (!std::isfinite(m) || m < 1.0) {
            throw DomainError("congestion multiplier for '" + seg + "' must be finite and >= 1");
        }
    }
}

std::optional<Route> route(const track::TrackGraph& graph, const std::string& from, const std::string& to,
                           const CongestionMap& congestion) {
    if (!graph.has_node(from)) throw DomainError("unknown node '" + from + "'");
    if (!graph.has_node(to)) throw DomainError("unknown node '" + to + "'");
    validate(congestion, graph);
    const auto path = graph.shortest_path(from, to, [&](const track::TrackSegment& s) {
        return track::traversal_time(s) * multiplier(congestion, s.id);
    });
    if (!path) return std::nullopt;
    return Route{*path, path->cost};
}

Problem make_problem(const track::TrackGraph& graph, const std::vector<StationRef>& stations,
                     std::vector<MoverStart> movers, std::vector<Job> jobs, const CongestionMap& congestion) {
    validate(congestion, graph);
    Problem p;
    const auto node_slot = [&p](const std::string& node) {
        const auto it = std::find(p.nodes.begin(), p.nodes.end(), node);
        if (it != p.nodes.end()) return static_cast<std::size_t>(it - p.nodes.begin());
        p.nodes.push_back(node);
        return p.nodes.size() - 1;
    };
    for (const auto& m : movers) {
        if (!graph.has_node(m.node)) throw DomainError("mover '" + m.id + "' starts at unknown node '" + m.node + "'");
        if (!(m.lead_time >= 0.0)) throw DomainError("mover '" + m.id + "' lead time must be >= 0");
        p.mover_node.push_back(node_slot(m.node));
    }
    for (const auto& j : jobs) {
        const auto st = std::find_if(stations.begin(), stations.end(), [&](const StationRef& s) { return s.id == j.station; });
        if (st == stations.end()) throw DomainError("job '" + j.id + "' names unknown station '" + j.station + "'");
        if (!graph.has_node(st->node)) throw DomainError("job '" + j.id + "' station node '" + st->node + "' does not exist");
        if (!(j.processing_time >= 0.0) || !std::isfinite(j.processing_time)) {
            throw DomainError("job '" + j.id + "': processing_time must be >= 0");
        }
        if (!(j.release_time >= 0.0) || !std::isfinite(j.release_time)) {
            throw DomainError("job '" + j.id + "': release_time must be >= 0");
        }
        p.job_node.push_back(node_slot(st->node));
    }
    p.movers = std::move(movers);
    p.jobs = std::move(jobs);
    const std::size_t n = p.nodes.size();
    p.travel.assign(n, std::vector<double>(n, inf));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (const auto r = route(graph, p.nodes[a], p.nodes[b], congestion)) p.travel[a][b] = r->eta;
        }
    }
    return p;
}

Schedule evaluate(const Problem& problem, std::vector<std::vector<std::size_t>> sequences) {
    Schedule s;
    s.sequences = std::move(sequences);
    s.sequences.resize(problem.movers.size());
    s.timing.assign(problem.jobs.size(), JobTiming{inf, inf});
    for (std::size_t k = 0; k < s.sequences.size(); ++k) {
        double t = problem.movers[k].lead_time;
        std::size_t at = problem.mover_node[k];
        for (const std::size_t j : s.sequences[k]) {
            const Job& job = problem.jobs[j];
            const double arrive = t + problem.travel[at][problem.job_node[j]];
            const double start = std::max(arrive, job.release_time);
            t = start + job.processing_time;
            at = problem.job_node[j];
            s.timing[j] = {start, t};
            s.makespan = std::max(s.makespan, t);
        }
    }
    return s;
}

std::vector<std::string> check(const Problem& problem, const Schedule& schedule) {
    std::vector<std::string> out;
    std::vector<int> seen(problem.jobs.size(), 0);
    for (const auto& seq : schedule.sequences) {
        for (const std::size_t j : seq) {
            if (j >= problem.jobs.size()) {
                out.push_back("schedule references job index " + std::to_string(j) + " out of range");
                continue;
            }
            ++seen[j];
        }
    }
    for (std::size_t j = 0; j < seen.size(); ++j) {
        if (seen[j] != 1) {
            out.push_back("job '" + problem.jobs[j].id + "' assigned " + std::to_string(seen[j]) + " times");
        }
    }
    if (!out.empty()) return out;

    double last = 0.0;
    const double tol = 1e-9;
    for (std::size_t k = 0; k < schedule.sequences.size(); ++k) {
        double free_at = problem.movers[k].lead_time;
        std::size_t at = problem.mover_node[k];
        for (const std::size_t j : schedule.sequences[k]) {
            const auto& t = schedule.timing[j];
            const Job& job = problem.jobs[j];
            if (t.start < job.release_time - tol) out.push_back("job '" + job.id + "' starts before its release");
            if (t.start < free_at + problem.travel[at][problem.job_node[j]] - tol) {
                out.push_back("job '" + job.id + "' overlaps the previous job or its travel");
            }
            if (std::abs(t.end - t.start - job.processing_time) > tol) {
                out.push_back("job '" + job.id + "' end does not match its processing time");
            }
            free_at = t.end;
            at = problem.job_node[j];
            last = std::max(last, t.end);
        }
    }
    if (std::abs(last - schedule.makespan) > tol) out.push_back("makespan is not the latest job end");
    return out;
}

Schedule assign_greedy(const Problem& problem) {
    std::vector<std::size_t> order(problem.jobs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Job& ja = problem.jobs[a];
        const Job& jb = problem.jobs[b];
        if (ja.release_time != jb.release_time) return ja.release_time < jb.release_time;
        return ja.id < jb.id;
    });

    const std::size_t m = problem.movers.size();
    std::vector<std::vector<std::size_t>> seqs(m);
    std::vector<double> free_at(m);
    std::vector<std::size_t> at(m);
    for (std::size_t k = 0; k < m; ++k) {
        free_at[k] = problem.movers[k].lead_time;
        at[k] = problem.mover_node[k];
    }
    for (const std::size_t j : order) {
        const Job& job = problem.jobs[j];
        std::size_t best = m;
        double best_end = inf;
        for (std::size_t k = 0; k < m; ++k) {
            const double arrive = free_at[k] + problem.travel[at[k]][problem.job_node[j]];
            const double end = std::max(arrive, job.release_time) + job.processing_time;
            if (end < best_end) {
                best_end = end;
                best = k;
            }
        }
        if (best == m) throw DomainError("job '" + job.id + "' is at a station no mover can reach");
        seqs[best].push_back(j);
        free_at[best] = best_end;
        at[best] = problem.job_node[j];
    }
    return evaluate(problem, std::move(seqs));
}

Schedule assign_local_search(const Problem& problem, const Schedule& seed, int iterations, std::uint64_t rng_seed) {
    if (iterations <= 0 || problem.jobs.empty()) return seed;
    std::mt19937_64 rng(rng_seed);

    Schedule current = evaluate(problem, seed.sequences);
    Schedule best = current;
    const std::size_t m = current.sequences.size();

    for (int it = 0; it < iterations; ++it) {
        Schedule candidate;
        Key candidate_key = key_of(current);
        bool found = false;
        const auto consider = [&](std::vector<std::vector<std::size_t>> seqs) {
            Schedule s = evaluate(problem, std::move(seqs));
            const Key k = key_of(s);
            if (improves(k, candidate_key)) {
                candidate_key = k;
                candidate = std::move(s);
                found = true;
            }
        };

        // Relocate: take one job out and reinsert it anywhere.
        for (std::size_t from = 0; from < m; ++from) {
            for (std::size_t p = 0; p < current.sequences[from].size(); ++p) {
                auto removed = current.sequences;
                const std::size_t job = removed[from][p];
                removed[from].erase(removed[from].begin() + static_cast<std::ptrdiff_t>(p));
                for (std::size_t to = 0; to < m; ++to) {
                    for (std::size_t q = 0; q <= removed[to].size(); ++q) {
                        if (to == from && q == p) continue;
                        auto seqs = removed;
                        seqs[to].insert(seqs[to].begin() + static_cast<std::ptrdiff_t>(q), job);
                        consider(std::move(seqs));
                    }
                }
            }
        }
        // Swap: exchange the positions of two jobs.
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t pa = 0; pa < current.sequences[a].size(); ++pa) {
                for (std::size_t b = a; b < m; ++b) {
                    for (std::size_t pb = (a == b ? pa + 1 : 0); pb < current.sequences[b].size(); ++pb) {
                        auto seqs = current.sequences;
                        std::swap(seqs[a][pa], seqs[b][pb]);
                        consider(std::move(seqs));
                    }
                }
            }
        }

        if (found) {
            current = std::move(candidate);
            if (improves(key_of(current), key_of(best))) best = current;
            continue;
        }
        // Local optimum: random relocation from the best schedule so far.
        auto seqs = best.sequences;
        std::vector<std::size_t> owners;
        for (std::size_t k = 0; k < m; ++k) {
            if (!seqs[k].empty()) owners.push_back(k);
        }
        const std::size_t from = owners[rng() % owners.size()];
        const std::size_t p = rng() % seqs[from].size();
        const std::size_t job = seqs[from][p];
        seqs[from].erase(seqs[from].begin() + static_cast<std::ptrdiff_t>(p));
        const std::size_t to = rng() % m;
        const std::size_t q = rng() % (seqs[to].size() + 1);
        seqs[to].insert(seqs[to].begin() + static_cast<std::ptrdiff_t>(q), job);
        current = evaluate(problem, std::move(seqs));
    }
    if (best.makespan > seed.makespan) return seed;
    return best;
}

namespace {

class Enumerator {
public:
    explicit Enumerator(const Problem& p) : p_(p), seqs_(p.movers.size()) {}

    Schedule solve() {
        if (p_.movers.empty()) {
            if (!p_.jobs.empty()) throw DomainError("no movers to assign jobs to");
            return evaluate(p_, {});
        }
        const std::uint32_t all = (p_.jobs.size() == 32) ? ~0u : ((1u << p_.jobs.size()) - 1u);
        visit(0, all, p_.movers[0].lead_time, p_.mover_node[0], 0.0);
        if (!std::isfinite(best_makespan_)) throw DomainError("no feasible schedule: some job is unreachable");
        return evaluate(p_, best_seqs_);
    }

private:
    void visit(std::size_t k, std::uint32_t remaining, double t, std::size_t at, double partial) {
        const double span = std::max(partial, seqs_[k].empty() ? 0.0 : t);
        if (span >= best_makespan_) return;
        if (remaining == 0) {
            best_makespan_ = span;
            best_seqs_ = seqs_;
            return;
        }
        for (std::size_t j = 0; j < p_.jobs.size(); ++j) {
            if (!(remaining & (1u << j))) continue;
            const Job& job = p_.jobs[j];
            const double travel = p_.travel[at][p_.job_node[j]];
            if (!std::isfinite(travel)) continue;
            const double end = std::max(t + travel, job.release_time) + job.processing_time;
            seqs_[k].push_back(j);
            visit(k, remaining & ~(1u << j), end, p_.job_node[j], partial);
            seqs_[k].pop_back();
        }
        if (k + 1 < p_.movers.size()) {
            visit(k + 1, remaining, p_.movers[k + 1].lead_time, p_.mover_node[k + 1], span);
        }
    }

    const Problem& p_;
    std::vector<std::vector<std::size_t>> seqs_;
    std::vector<std::vector<std::size_t>> best_seqs_;
    double best_makespan_ = inf;
};

}  // namespace

Schedule brute_force(const Problem& problem) {
    if (problem.jobs.size() > brute_force_max_jobs || problem.movers.size() > brute_force_max_movers) {
        std::ostringstream msg;
        msg << "instance too large for exhaustive search: " << problem.jobs.size() << " jobs, "
            << problem.movers.size() << " movers (limit " << brute_force_max_jobs << " jobs, "
            << brute_force_max_movers << " movers)";
        throw DomainError(msg.str());
    }
    return Enumerator(problem).solve();
}

}  // namespace maglev::dispatch
