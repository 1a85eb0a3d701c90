#pragma once

#include <span>
#include <vector>

#include "rides/metrics.hpp"
#include "rides/network.hpp"
#include "rides/regress.hpp"
#include "rides/sharing.hpp"

namespace rides {

struct FeatureSeries {
    std::vector<Timestamp> window_start;
    std::vector<FeatureVector> features;
};

// One feature vector per window, computed in parallel across snapshots.
FeatureSeries feature_series(std::span<const TripRecord> trips, const TileGrid& grid,
                             const std::vector<SnapshotWindow>& windows,
                             LambdaMode lambda_mode);

}  // namespace rides
