#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rides/grid.hpp"
#include "rides/sharing.hpp"
#include "rides/trips.hpp"

namespace rides {

// Deterministic synthetic demand: power-law edge popularities, a 24-hour
// demand profile with a weekend multiplier, Poisson departures per edge.
// Each edge owns an RNG stream keyed by (seed, edge index) so parallel and
// serial generation agree byte for byte.
struct SynthSpec {
    std::uint64_t seed = 1;
    int n_days = 31;
    int n_cols = 10, n_rows = 10;
    BoundingBox bbox = {-74.03, 40.68, -73.93, 40.77};
    int n_edges = 200;
    double popularity_exponent = 1.5;  // popularity of rank-i edge ~ (i+1)^-exponent
    std::array<double, 24> hourly_profile = {0.3, 0.2, 0.15, 0.1, 0.1, 0.2, 0.5, 1.0,
                                             1.4, 1.2, 1.0, 1.0, 1.1, 1.0, 1.0, 1.1,
                                             1.3, 1.6, 1.7, 1.6, 1.3, 1.0, 0.7, 0.5};
    double weekend_amplitude = 0.6;    // multiplier on Saturday/Sunday
    int start_weekday = 2;             // 0 = Monday; Jan 1 2013 was a Tuesday
    PassengerDistribution passengers = default_passenger_distribution();
    double base_rate_per_hour = 2.0;   // mean departures per edge-hour at profile 1
    Timestamp start_time = 1356998400; // 2013-01-01 00:00:00 UTC

    bool valid() const;
};

struct PlantedEdge {
    TileId origin, dest;
    double popularity = 0;  // normalized to mean 1 across edges
};

struct GroundTruth {
    std::vector<PlantedEdge> edges;
    std::array<double, 24> hourly_profile{};
    PassengerDistribution passengers;
    double popularity_exponent = 0;
};

struct SynthResult {
    std::vector<TripRecord> trips;  // sorted by t_start
    GroundTruth truth;
};

SynthResult generate(const SynthSpec& spec);

void write_ground_truth(const std::string& path, const GroundTruth& truth);

}  // namespace rides
