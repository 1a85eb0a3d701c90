#include "rides/pipeline.hpp"

#include <algorithm>
#include <exception>

#include "rides/errors.hpp"

namespace rides {

FeatureSeries feature_series(std::span<const TripRecord> trips, const TileGrid& grid,
                             const std::vector<SnapshotWindow>& windows,
                             LambdaMode lambda_mode) {
    FeatureSeries s;
    s.window_start.resize(windows.size());
    s.features.resize(windows.size());
    // exceptions cannot cross the parallel region; capture and rethrow
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < windows.size(); ++i) {
        try {
            auto net = build_network(trips, grid, windows[i]);
            s.window_start[i] = windows[i].t1;
            s.features[i] = serial::features(net, lambda_mode);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return s;
}

std::vector<GridCell> fit_grid(std::span<const TripRecord> trips, const TileGrid& analysis_grid,
                               const std::vector<SnapshotWindow>& windows,
                               const GridSpec& grid, TargetMode mode,
                               std::int64_t step_s, LambdaMode lambda_mode,
                               bool include_lambda) {
    auto fs = feature_series(trips, analysis_grid, windows, lambda_mode);

    std::vector<GridCell> cells;
    for (double dist : grid.distance_tolerances_m) {
        SharingConfig cfg;
        cfg.merge_grid = TileGrid(analysis_grid.bbox(), dist);
        for (std::int64_t delay : grid.time_tolerances_s) {
            cfg.max_delay_s = delay;
            auto series = utilization_series(trips, windows, cfg);
            std::vector<double> alphas(series.results.size());
            std::transform(series.results.begin(), series.results.end(), alphas.begin(),
                           [](const UtilizationResult& r) { return r.alpha; });
            for (std::int64_t horizon : grid.horizons_s) {
                GridCell cell;
                cell.spec.distance_tolerance_m = dist;
                cell.spec.time_tolerance_s = delay;
                cell.spec.horizon_s = horizon;
                cell.spec.target_mode = mode;
                cell.spec.include_lambda = include_lambda;
                try {
                    auto d = build_design(fs.window_start, fs.features, alphas, cell.spec,
                                          step_s);
                    cell.model = fit_ols(d.X, d.y);
                } catch (const std::exception& ex) {
                    cell.failed = true;
                    cell.error = ex.what();
                }
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

}  // namespace rides
