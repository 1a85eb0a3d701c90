#include "rides/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "rides/errors.hpp"

namespace rides {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

int sample_passengers(const PassengerDistribution& d, double u) {
    if (u < d.p1) return 1;
    if (u < d.p1 + d.p2) return 2;
    if (u < d.p1 + d.p2 + d.p3) return 3;
    return 4;
}

}  // namespace

bool SynthSpec::valid() const {
    if (n_days < 1 || n_cols < 1 || n_rows < 1 || n_edges < 1) return false;
    if (!bbox.valid()) return false;
    if (base_rate_per_hour < 0 || weekend_amplitude < 0) return false;
    for (double m : hourly_profile)
        if (m < 0) return false;
    return passengers.valid();
}

SynthResult generate(const SynthSpec& spec) {
    if (!spec.valid()) throw ConfigError("invalid synthetic generator spec");

    // choose distinct O-D tile pairs from the seed stream
    std::mt19937_64 rng(splitmix64(spec.seed));
    std::uniform_int_distribution<int> col_d(0, spec.n_cols - 1), row_d(0, spec.n_rows - 1);
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    std::vector<PlantedEdge> edges;
    const long max_pairs = static_cast<long>(spec.n_cols) * spec.n_rows *
                           static_cast<long>(spec.n_cols) * spec.n_rows;
    if (spec.n_edges > max_pairs) throw ConfigError("more edges requested than tile pairs");
    while (static_cast<int>(edges.size()) < spec.n_edges) {
        TileId o{col_d(rng), row_d(rng)};
        TileId d{col_d(rng), row_d(rng)};
        if (!seen.insert({o.key(), d.key()}).second) continue;
        edges.push_back({o, d, 0.0});
    }
    double pop_sum = 0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        edges[i].popularity = std::pow(static_cast<double>(i + 1), -spec.popularity_exponent);
        pop_sum += edges[i].popularity;
    }
    for (auto& e : edges) e.popularity *= static_cast<double>(edges.size()) / pop_sum;

    const double tile_w = (spec.bbox.lon_max - spec.bbox.lon_min) / spec.n_cols;
    const double tile_h = (spec.bbox.lat_max - spec.bbox.lat_min) / spec.n_rows;
    const int n_hours = spec.n_days * 24;

    std::vector<std::vector<TripRecord>> per_edge(edges.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
        // one RNG stream per edge so parallel and serial runs agree
        std::mt19937_64 erng(splitmix64(spec.seed ^ splitmix64(ei + 1)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const auto& e = edges[ei];
        for (int h = 0; h < n_hours; ++h) {
            const int day = h / 24;
            const int weekday = (spec.start_weekday + day) % 7;
            const bool weekend = weekday >= 5;
            double rate = spec.base_rate_per_hour * e.popularity *
                          spec.hourly_profile[h % 24] *
                          (weekend ? spec.weekend_amplitude : 1.0);
            if (rate <= 0) continue;
            std::poisson_distribution<int> pois(rate);
            int count = pois(erng);
            for (int k = 0; k < count; ++k) {
                TripRecord t;
                t.t_start = spec.start_time + static_cast<Timestamp>(h) * 3600 +
                            static_cast<Timestamp>(unit(erng) * 3600.0);
                t.t_end = t.t_start + 300 + static_cast<Timestamp>(unit(erng) * 900.0);
                t.origin_lon = spec.bbox.lon_min + (e.origin.col + unit(erng)) * tile_w;
                t.origin_lat = spec.bbox.lat_min + (e.origin.row + unit(erng)) * tile_h;
                t.dest_lon = spec.bbox.lon_min + (e.dest.col + unit(erng)) * tile_w;
                t.dest_lat = spec.bbox.lat_min + (e.dest.row + unit(erng)) * tile_h;
                t.passengers = sample_passengers(spec.passengers, unit(erng));
                per_edge[ei].push_back(t);
            }
        }
    }

    SynthResult out;
    for (auto& v : per_edge)
        out.trips.insert(out.trips.end(), v.begin(), v.end());
    std::sort(out.trips.begin(), out.trips.end(), [](const TripRecord& a, const TripRecord& b) {
        return std::tie(a.t_start, a.origin_lon, a.origin_lat, a.dest_lon, a.dest_lat,
                        a.passengers) <
               std::tie(b.t_start, b.origin_lon, b.origin_lat, b.dest_lon, b.dest_lat,
                        b.passengers);
    });
    out.truth.edges = std::move(edges);
    out.truth.hourly_profile = spec.hourly_profile;
    out.truth.passengers = spec.passengers;
    out.truth.popularity_exponent = spec.popularity_exponent;
    return out;
}

void write_ground_truth(const std::string& path, const GroundTruth& truth) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write ground truth: " + path);
    char buf[256];
    out << "{\n  \"popularity_exponent\": " << truth.popularity_exponent << ",\n";
    out << "  \"passengers\": [" << truth.passengers.p1 << ", " << truth.passengers.p2
        << ", " << truth.passengers.p3 << ", " << truth.passengers.p4 << "],\n";
    out << "  \"hourly_profile\": [";
    for (int h = 0; h < 24; ++h) out << (h ? ", " : "") << truth.hourly_profile[h];
    out << "],\n  \"edges\": [\n";
    for (std::size_t i = 0; i < truth.edges.size(); ++i) {
        const auto& e = truth.edges[i];
        std::snprintf(buf, sizeof buf,
                      "    [%d, %d, %d, %d, %.9f]%s\n", e.origin.col, e.origin.row,
                      e.dest.col, e.dest.row, e.popularity,
                      i + 1 < truth.edges.size() ? "," : "");
        out << buf;
    }
    out << "  ]\n}\n";
}

}  // namespace rides
