#include "rides/sharing.hpp"

#include <algorithm>
#include <exception>
#include <cmath>
#include <unordered_map>

#include "rides/errors.hpp"

namespace rides {

bool PassengerDistribution::valid() const {
    if (p1 < 0 || p2 < 0 || p3 < 0 || p4 < 0) return false;
    return std::abs(p1 + p2 + p3 + p4 - 1.0) <= 1e-9;
}

MergingFactors merging_factors(const PassengerDistribution& dist) {
    if (!dist.valid()) throw DataError("invalid passenger distribution");
    const double p1 = dist.p1, p2 = dist.p2, p3 = dist.p3, p4 = dist.p4;
    // Phase 1 draws pairs from the product distribution. Blocked pairs:
    // any pair with a 4-passenger trip, a {2,3} pair, or a {3,3} pair.
    const double blocked = (1.0 - (1.0 - p4) * (1.0 - p4)) + 2.0 * p2 * p3 + p3 * p3;
    // Phase 2 re-merges pairs of (1,1)-merged trips; each such pair frees
    // two of the original pairs.
    const double pair11 = p1 * p1;
    MergingFactors f;
    f.lower = 1.0 - blocked + 2.0 * pair11 * pair11;
    f.upper = p2 + 2.0 * std::min(p3, p1) + 1.5 * std::max(p1 - p3, 0.0);
    f.inverted = f.lower > f.upper;
    return f;
}

std::size_t match_edge(std::span<const Timestamp> departures, std::int64_t max_delay_s) {
    std::size_t pairs = 0;
    std::size_t i = 0;
    while (i + 1 < departures.size()) {
        if (departures[i + 1] - departures[i] <= max_delay_s) {
            ++pairs;
            i += 2;
        } else {
            ++i;
        }
    }
    return pairs;
}

namespace {

UtilizationResult finalize(std::uint64_t total, std::uint64_t pairs,
                           const MergingFactors& factors) {
    UtilizationResult r;
    r.total_trips = total;
    r.matched_trips = 2 * pairs;
    if (total == 0) {
        r.zero_trips = true;
        return r;
    }
    r.alpha = static_cast<double>(r.matched_trips) / static_cast<double>(total);
    r.saved_fraction = 0.5 * r.alpha;
    r.lower_bound = factors.lower * r.alpha;
    r.upper_bound = factors.upper * r.alpha;
    r.factors_inverted = factors.inverted;
    return r;
}

using Buckets = std::unordered_map<std::uint64_t, std::vector<Timestamp>>;

Buckets bucket_trips(std::span<const TripRecord> trips, const TileGrid& merge_grid) {
    Buckets buckets;
    for (const auto& t : trips) {
        TileId o = merge_grid.tile_of(t.origin_lon, t.origin_lat);
        TileId d = merge_grid.tile_of(t.dest_lon, t.dest_lat);
        // origin tile in the high bits; col/row fit in 16 bits each
        std::uint64_t key = (static_cast<std::uint64_t>(o.col) << 48) |
                            (static_cast<std::uint64_t>(o.row) << 32) |
                            (static_cast<std::uint64_t>(d.col) << 16) |
                            static_cast<std::uint64_t>(d.row);
        buckets[key].push_back(t.t_start);
    }
    return buckets;
}

}  // namespace

UtilizationResult utilization(std::span<const TripRecord> trips, const SharingConfig& config) {
    auto buckets = bucket_trips(trips, config.merge_grid);
    std::vector<std::vector<Timestamp>*> lists;
    lists.reserve(buckets.size());
    for (auto& [k, v] : buckets) lists.push_back(&v);
    std::uint64_t pairs = 0;
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : pairs)
    for (std::size_t i = 0; i < lists.size(); ++i) {
        std::sort(lists[i]->begin(), lists[i]->end());
        pairs += match_edge(*lists[i], config.max_delay_s);
    }
    return finalize(trips.size(), pairs, config.factors);
}

PassengerDistribution passenger_distribution(std::span<const TripRecord> trips) {
    if (trips.empty()) throw DataError("passenger distribution needs at least one trip");
    std::uint64_t counts[4] = {0, 0, 0, 0};
    std::uint64_t over = 0;
    double pax_sum = 0;
    for (const auto& t : trips) {
        pax_sum += t.passengers;
        if (t.passengers >= 1 && t.passengers <= 4)
            ++counts[t.passengers - 1];
        else
            ++over;
    }
    const std::uint64_t in_range = trips.size() - over;
    PassengerDistribution d;
    if (in_range > 0) {
        d.p1 = static_cast<double>(counts[0]) / in_range;
        d.p2 = static_cast<double>(counts[1]) / in_range;
        d.p3 = static_cast<double>(counts[2]) / in_range;
        d.p4 = static_cast<double>(counts[3]) / in_range;
    }
    d.mean_passengers = pax_sum / static_cast<double>(trips.size());
    d.over_capacity_fraction = static_cast<double>(over) / static_cast<double>(trips.size());
    return d;
}

UtilizationSeries utilization_series(std::span<const TripRecord> trips,
                                     const std::vector<SnapshotWindow>& windows,
                                     const SharingConfig& config) {
    if (windows.empty()) throw ConfigError("utilization series needs at least one window");
    UtilizationSeries s;
    s.window_start.resize(windows.size());
    s.results.resize(windows.size());
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < windows.size(); ++i) {
        try {
            const auto& w = windows[i];
            auto lo = std::lower_bound(trips.begin(), trips.end(), w.t1,
                                       [](const TripRecord& t, Timestamp v) { return t.t_start < v; });
            auto hi = std::lower_bound(trips.begin(), trips.end(), w.t2,
                                       [](const TripRecord& t, Timestamp v) { return t.t_start < v; });
            s.window_start[i] = w.t1;
            s.results[i] = utilization(trips.subspan(lo - trips.begin(), hi - lo), config);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    double mean = 0;
    for (const auto& r : s.results) mean += r.alpha;
    mean /= static_cast<double>(s.results.size());
    s.pct_change_vs_mean.resize(windows.size(), 0.0);
    if (mean > 0)
        for (std::size_t i = 0; i < windows.size(); ++i)
            s.pct_change_vs_mean[i] = (s.results[i].alpha - mean) / mean * 100.0;
    return s;
}

namespace serial {

UtilizationResult utilization(std::span<const TripRecord> trips, const SharingConfig& config) {
    auto buckets = bucket_trips(trips, config.merge_grid);
    std::uint64_t pairs = 0;
    for (auto& [k, v] : buckets) {
        std::sort(v.begin(), v.end());
        pairs += rides::match_edge(v, config.max_delay_s);
    }
    return finalize(trips.size(), pairs, config.factors);
}

}  // namespace serial

}  // namespace rides
