#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rides/grid.hpp"
#include "rides/network.hpp"
#include "rides/trips.hpp"

namespace rides {

struct PassengerDistribution {
    double p1 = 0, p2 = 0, p3 = 0, p4 = 0;  // fractions of trips with 1..4 passengers
    double mean_passengers = 0;
    double over_capacity_fraction = 0;  // trips with > 4 passengers, reported separately

    bool valid() const;
};

// NYC January 2013 distribution; the default for capacity bounds.
inline PassengerDistribution default_passenger_distribution() {
    return {0.4922, 0.2422, 0.1572, 0.1084, 1.7, 0.0};
}

struct MergingFactors {
    double lower = 0;  // two-phase greedy, as a fraction of naive alpha
    double upper = 0;  // optimal capacity-respecting scheme
    bool inverted = false;  // lower > upper on degenerate distributions
};

// Capacity-corrected bounds on utilization as fractions of naive alpha.
// Lower: phase-1 pairs from the product distribution with pairs containing a
// 4-passenger trip, {2,3} or {3,3} blocked, then the (1,1)-merged trips pair
// again. Upper: 2-passenger trips merge among themselves, 3-passenger trips
// pick up matching singles, remaining singles merge 4-to-1.
MergingFactors merging_factors(const PassengerDistribution& dist);

struct SharingConfig {
    std::int64_t max_delay_s = 300;
    TileGrid merge_grid;  // tile edge realizes the distance tolerance
    MergingFactors factors = merging_factors(default_passenger_distribution());
};

// Maximum-cardinality pairing of sorted departure times where each pair
// differs by <= max_delay. Greedy left-to-right is maximum here.
std::size_t match_edge(std::span<const Timestamp> departures, std::int64_t max_delay_s);

struct UtilizationResult {
    std::uint64_t total_trips = 0;
    std::uint64_t matched_trips = 0;  // 2 * pairs, always even
    double alpha = 0;                 // matched / total
    double saved_fraction = 0;        // alpha / 2 (vehicles removed)
    double lower_bound = 0;
    double upper_bound = 0;
    bool zero_trips = false;
    bool factors_inverted = false;
};

UtilizationResult utilization(std::span<const TripRecord> trips, const SharingConfig& config);

PassengerDistribution passenger_distribution(std::span<const TripRecord> trips);

struct UtilizationSeries {
    std::vector<Timestamp> window_start;
    std::vector<UtilizationResult> results;
    std::vector<double> pct_change_vs_mean;  // alpha as percent change from series mean
};

// One result per window; trips must be sorted by t_start.
UtilizationSeries utilization_series(std::span<const TripRecord> trips,
                                     const std::vector<SnapshotWindow>& windows,
                                     const SharingConfig& config);

namespace serial {
UtilizationResult utilization(std::span<const TripRecord> trips, const SharingConfig& config);
}  // namespace serial

}  // namespace rides
