#pragma once

// Directed track topology shared by the line simulator and the dispatcher.

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace maglev::track {

struct TrackSegment {
    std::string id;
    std::string from_node;
    std::string to_node;
    double length = 0.0;   ///< [m]
    double v_limit = 0.0;  ///< [m/s]
    double a_limit = 0.0;  ///< [m/s^2]
};

/// A point on the track: `offset` metres from the start of `segment`.
struct TrackPosition {
    int segment = -1;
    double offset = 0.0;
};

struct Path {
    std::vector<int> segments;       ///< indices into the graph's segment list
    std::vector<std::string> nodes;  ///< visited node ids, starting node first
    double cost = 0.0;
};

inline constexpr double unreachable = std::numeric_limits<double>::infinity();

/// Rest-to-rest traversal time of a whole segment under its own limits.
double traversal_time(const TrackSegment& seg);

class TrackGraph {
public:
    TrackGraph() = default;
    explicit TrackGraph(std::vector<TrackSegment> segments);

    const std::vector<TrackSegment>& segments() const { return segments_; }
    const TrackSegment& segment(int index) const { return segments_.at(static_cast<std::size_t>(index)); }
    const std::vector<std::string>& nodes() const { return nodes_; }

    std::optional<int> segment_index(const std::string& id) const;
    bool has_node(const std::string& id) const { return node_index_.count(id) != 0; }
    /// Outgoing / incoming segment indices of a node, in segment id order.
    const std::vector<int>& out_segments(const std::string& node) const;
    const std::vector<int>& in_segments(const std::string& node) const;

    /// True when every node can be reached from every other ignoring direction.
    bool weakly_connected() const;

    /// Least-cost directed path. Segments whose cost is not finite are skipped.
    /// Equal-cost candidates are ordered by node id sequence, then segment id
    /// sequence. Returns nullopt when `to` cannot be reached.
    std::optional<Path> shortest_path(const std::string& from, const std::string& to,
                                      const std::function<double(const TrackSegment&)>& cost) const;

    /// Directed along-track distance from a to b, or `unreachable`.
    double distance(const TrackPosition& a, const TrackPosition& b) const;

private:
    std::vector<TrackSegment> segments_;
    std::vector<std::string> nodes_;
    std::map<std::string, int> node_index_;
    std::map<std::string, int> segment_index_;
    std::vector<std::vector<int>> out_;
    std::vector<std::vector<int>> in_;
};

}  // namespace maglev::track
