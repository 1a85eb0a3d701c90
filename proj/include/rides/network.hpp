#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rides/grid.hpp"
#include "rides/trips.hpp"

namespace rides {

// Half-open window [t1, t2); a trip belongs iff t1 <= t_start < t2.
struct SnapshotWindow {
    Timestamp t1 = 0;
    Timestamp t2 = 0;
    bool valid() const { return t1 < t2; }
    bool contains(Timestamp t) const { return t >= t1 && t < t2; }
};

struct Departure {
    Timestamp t = 0;
    int passengers = 1;
    auto operator<=>(const Departure&) const = default;
};

struct EdgeData {
    std::uint64_t weight = 0;               // == departures.size()
    std::vector<Departure> departures;      // sorted ascending by t
};

struct EdgeKey {
    TileId from, to;
    auto operator<=>(const EdgeKey&) const = default;
};

// Directed multigraph snapshot: nodes are tiles active in the window, edges
// aggregate trips per (origin tile, destination tile). Self loops retained.
class RidesNetwork {
public:
    SnapshotWindow window;
    std::map<EdgeKey, EdgeData> edges;   // ordered for deterministic output
    std::vector<TileId> nodes;           // sorted, unique

    std::size_t n_nodes() const { return nodes.size(); }
    std::size_t n_edges() const { return edges.size(); }
    std::uint64_t total_trips() const;
};

RidesNetwork build_network(std::span<const TripRecord> trips, const TileGrid& grid,
                           const SnapshotWindow& window);

// Windows [start + k*step, start + k*step + window_len) while the window end
// <= span_end. Built in parallel against the read-only trip span.
std::vector<RidesNetwork> sliding_snapshots(std::span<const TripRecord> trips,
                                            const TileGrid& grid, Timestamp span_start,
                                            Timestamp span_end, std::int64_t window_len,
                                            std::int64_t step);

std::vector<SnapshotWindow> sliding_windows(Timestamp span_start, Timestamp span_end,
                                            std::int64_t window_len, std::int64_t step);

enum class Direction { In, Out, Total };

// Degrees count unique neighbor tiles, not trips.
std::map<int, int> degree_distribution(const RidesNetwork& net, Direction dir);

// Histogram of edge weights (weight -> edge count).
std::map<std::uint64_t, int> edge_weight_distribution(const RidesNetwork& net);

// Edge-list serialization with a departures sidecar; round-trips losslessly.
void write_snapshot(const std::string& edge_path, const std::string& sidecar_path,
                    const RidesNetwork& net);
RidesNetwork read_snapshot(const std::string& edge_path, const std::string& sidecar_path);

}  // namespace rides
