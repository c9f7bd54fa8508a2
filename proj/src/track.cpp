#include "track.hpp"

#include "control.hpp"
#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace maglev::track {

double traversal_time(const TrackSegment& seg) {
    return control::plan_trapezoid(seg.length, seg.v_limit, seg.a_limit).total_time;
}

TrackGraph::TrackGraph(std::vector<TrackSegment> segments) : segments_(std::move(segments)) {
    std::set<std::string> names;
    for (const auto& s : segments_) {
        names.insert(s.from_node);
        names.insert(s.to_node);
    }
    nodes_.assign(names.begin(), names.end());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        node_index_[nodes_[i]] = static_cast<int>(i);
    }
    out_.resize(nodes_.size());
    in_.resize(nodes_.size());
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        segment_index_.emplace(s.id, static_cast<int>(i));
        out_[static_cast<std::size_t>(node_index_[s.from_node])].push_back(static_cast<int>(i));
        in_[static_cast<std::size_t>(node_index_[s.to_node])].push_back(static_cast<int>(i));
    }
    const auto by_id = [this](int a, int b) { return segments_[a].id < segments_[b].id; };
    for (auto& v : out_) std::sort(v.begin(), v.end(), by_id);
    for (auto& v : in_) std::sort(v.begin(), v.end(), by_id);
}

std::optional<int> TrackGraph::segment_index(const std::string& id) const {
    const auto it = segment_index_.find(id);
    if (it == segment_index_.end()) return std::nullopt;
    return it->second;
}

const std::vector<int>& TrackGraph::out_segments(const std::string& node) const {
    static const std::vector<int> none;
    const auto it = node_index_.find(node);
    return it == node_index_.end() ? none : out_[static_cast<std::size_t>(it->second)];
}

const std::vector<int>& TrackGraph::in_segments(const std::string& node) const {
    static const std::vector<int> none;
    const auto it = node_index_.find(node);
    return it == node_index_.end() ? none : in_[static_cast<std::size_t>(it->second)];
}

bool TrackGraph::weakly_connected() const {
    if (nodes_.empty()) return true;
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        for (const auto* adj : {&out_[static_cast<std::size_t>(n)], &in_[static_cast<std::size_t>(n)]}) {
            for (const int s : *adj) {
                const auto& seg = segments_[static_cast<std::size_t>(s)];
                for (const auto& name : {seg.from_node, seg.to_node}) {
                    const int m = node_index_.at(name);
                    if (!seen[static_cast<std::size_t>(m)]) {
                        seen[static_cast<std::size_t>(m)] = true;
                        stack.push_back(m);
                    }
                }
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

namespace {

struct Label {
    double cost = unreachable;
    std::vector<std::string> nodes;
    std::vector<std::string> segment_ids;
    std::vector<int> segments;
};

bool costs_tie(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

bool better(const Label& a, const Label& b) {
    if (!std::isfinite(a.cost)) return false;
    if (!std::isfinite(b.cost)) return true;
    if (!costs_tie(a.cost, b.cost)) return a.cost < b.cost;
    if (a.nodes != b.nodes) return a.nodes < b.nodes;
    return a.segment_ids < b.segment_ids;
}

}  // namespace

std::optional<Path> TrackGraph::shortest_path(const std::string& from, const std::string& to,
                                              const std::function<double(const TrackSegment&)>& cost) const {
    if (!has_node(from) || !has_node(to)) return std::nullopt;
    if (from == to) return Path{{}, {from}, 0.0};

    const std::size_t n = nodes_.size();
    std::vector<Label> label(n);
    std::vector<bool> done(n, false);
    const auto src = static_cast<std::size_t>(node_index_.at(from));
    label[src].cost = 0.0;
    label[src].nodes = {from};

    // O(V^2) selection keeps the lexicographic tie order exact.
    for (;;) {
        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!done[i] && std::isfinite(label[i].cost) && (pick == n || better(label[i], label[pick]))) {
                pick = i;
            }
        }
        if (pick == n) break;
        done[pick] = true;
        if (nodes_[pick] == to) break;
        for (const int s : out_[pick]) {
            const auto& seg = segments_[static_cast<std::size_t>(s)];
            const double c = cost(seg);
            if (!std::isfinite(c)) continue;
            const auto next = static_cast<std::size_t>(node_index_.at(seg.to_node));
            if (done[next]) continue;
            Label cand = label[pick];
            cand.cost += c;
            cand.nodes.push_back(seg.to_node);
            cand.segment_ids.push_back(seg.id);
            cand.segments.push_back(s);
            if (better(cand, label[next])) label[next] = std::move(cand);
        }
    }
    const auto dst = static_cast<std::size_t>(node_index_.at(to));
    if (!std::isfinite(label[dst].cost)) return std::nullopt;
    return Path{label[dst].segments, label[dst].nodes, label[dst].cost};
}

double TrackGraph::distance(const TrackPosition& a, const TrackPosition& b) const {
    if (a.segment == b.segment && b.offset >= a.offset) return b.offset - a.offset;
    const auto& sa = segment(a.segment);
    const auto& sb = segment(b.segment);
    const auto p = shortest_path(sa.to_node, sb.from_node, [](const TrackSegment& s) { return s.length; });
    if (!p) return unreachable;
    return (sa.length - a.offset) + p->cost + b.offset;
}

}  // namespace maglev::track
