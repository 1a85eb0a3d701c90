#include "rides/network.hpp"

#include <algorithm>
#include <exception>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rides/errors.hpp"

namespace rides {

std::uint64_t RidesNetwork::total_trips() const {
    std::uint64_t n = 0;
    for (const auto& [k, e] : edges) n += e.weight;
    return n;
}

RidesNetwork build_network(std::span<const TripRecord> trips, const TileGrid& grid,
                           const SnapshotWindow& window) {
    if (!window.valid()) throw ConfigError("invalid snapshot window");
    RidesNetwork net;
    net.window = window;
    std::set<TileId> nodes;
    for (const auto& t : trips) {
        if (!window.contains(t.t_start)) continue;
        EdgeKey key{grid.tile_of(t.origin_lon, t.origin_lat),
                    grid.tile_of(t.dest_lon, t.dest_lat)};
        auto& e = net.edges[key];
        e.departures.push_back({t.t_start, t.passengers});
        nodes.insert(key.from);
        nodes.insert(key.to);
    }
    for (auto& [k, e] : net.edges) {
        std::sort(e.departures.begin(), e.departures.end());
        e.weight = e.departures.size();
    }
    net.nodes.assign(nodes.begin(), nodes.end());
    return net;
}

std::vector<SnapshotWindow> sliding_windows(Timestamp span_start, Timestamp span_end,
                                            std::int64_t window_len, std::int64_t step) {
    if (window_len <= 0 || step <= 0 || span_end - span_start < window_len)
        throw ConfigError("invalid sliding-window span");
    std::vector<SnapshotWindow> out;
    for (Timestamp t = span_start; t + window_len <= span_end; t += step)
        out.push_back({t, t + window_len});
    return out;
}

std::vector<RidesNetwork> sliding_snapshots(std::span<const TripRecord> trips,
                                            const TileGrid& grid, Timestamp span_start,
                                            Timestamp span_end, std::int64_t window_len,
                                            std::int64_t step) {
    auto windows = sliding_windows(span_start, span_end, window_len, step);
    std::vector<RidesNetwork> out(windows.size());
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < windows.size(); ++i) {
        try {
            out[i] = build_network(trips, grid, windows[i]);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

std::map<int, int> degree_distribution(const RidesNetwork& net, Direction dir) {
    std::map<TileId, std::set<TileId>> nbrs;
    for (const auto& t : net.nodes) nbrs[t];
    for (const auto& [k, e] : net.edges) {
        switch (dir) {
            case Direction::Out: nbrs[k.from].insert(k.to); break;
            case Direction::In: nbrs[k.to].insert(k.from); break;
            case Direction::Total:
                nbrs[k.from].insert(k.to);
                nbrs[k.to].insert(k.from);
                break;
        }
    }
    std::map<int, int> hist;
    for (const auto& [t, s] : nbrs) ++hist[static_cast<int>(s.size())];
    return hist;
}

std::map<std::uint64_t, int> edge_weight_distribution(const RidesNetwork& net) {
    std::map<std::uint64_t, int> hist;
    for (const auto& [k, e] : net.edges) ++hist[e.weight];
    return hist;
}

void write_snapshot(const std::string& edge_path, const std::string& sidecar_path,
                    const RidesNetwork& net) {
    std::ofstream out(edge_path);
    if (!out) throw DataError("cannot write snapshot: " + edge_path);
    out << "#rides-snapshot\t1\t" << net.window.t1 << "\t" << net.window.t2 << "\n";
    for (const auto& [k, e] : net.edges)
        out << k.from.col << " " << k.from.row << " " << k.to.col << " " << k.to.row
            << " " << e.weight << "\n";
    std::ofstream side(sidecar_path);
    if (!side) throw DataError("cannot write snapshot sidecar: " + sidecar_path);
    for (const auto& [k, e] : net.edges) {
        side << k.from.col << " " << k.from.row << " " << k.to.col << " " << k.to.row;
        for (const auto& d : e.departures) side << " " << d.t << ":" << d.passengers;
        side << "\n";
    }
}

RidesNetwork read_snapshot(const std::string& edge_path, const std::string& sidecar_path) {
    std::ifstream in(edge_path);
    if (!in) throw DataError("cannot read snapshot: " + edge_path);
    RidesNetwork net;
    std::string magic;
    in >> magic;
    if (magic != "#rides-snapshot") throw DataError("not a snapshot file: " + edge_path);
    int version;
    in >> version >> net.window.t1 >> net.window.t2;
    EdgeKey k;
    std::uint64_t w;
    std::set<TileId> nodes;
    while (in >> k.from.col >> k.from.row >> k.to.col >> k.to.row >> w) {
        net.edges[k].weight = w;
        nodes.insert(k.from);
        nodes.insert(k.to);
    }
    net.nodes.assign(nodes.begin(), nodes.end());
    std::ifstream side(sidecar_path);
    if (!side) throw DataError("cannot read snapshot sidecar: " + sidecar_path);
    std::string line;
    while (std::getline(side, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        ss >> k.from.col >> k.from.row >> k.to.col >> k.to.row;
        auto it = net.edges.find(k);
        if (it == net.edges.end()) throw DataError("sidecar edge missing from edge list");
        std::string tok;
        while (ss >> tok) {
            auto colon = tok.find(':');
            if (colon == std::string::npos) throw DataError("malformed sidecar departure");
            Departure d;
            d.t = std::stoll(tok.substr(0, colon));
            d.passengers = std::stoi(tok.substr(colon + 1));
            it->second.departures.push_back(d);
        }
        if (it->second.departures.size() != it->second.weight)
            throw DataError("sidecar departure count disagrees with edge weight");
    }
    return net;
}

}  // namespace rides
