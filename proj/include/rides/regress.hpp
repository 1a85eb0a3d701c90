#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rides/metrics.hpp"
#include "rides/sharing.hpp"

namespace rides {

struct AnovaTable {
    double ss_regression = 0;
    double ss_residual = 0;
    double ss_total = 0;
    double f_statistic = 0;
    int df_regression = 0;
    int df_residual = 0;
};

struct RegressionModel {
    std::vector<double> coefficients;      // intercept first, original units
    std::vector<double> coefficients_std;  // intercept first, z-scored predictors
    std::vector<double> std_errors;        // original units, per coefficient
    std::vector<double> t_stats;
    double r2 = 0;
    double adjusted_r2 = 0;
    int n_samples = 0;
    int n_predictors = 0;
    std::vector<double> residuals;
    AnovaTable anova;

    double predict(const std::vector<double>& x) const;
};

// OLS with intercept via Householder QR; predictors are z-scored internally
// for conditioning and coefficients reported in both unit systems.
// X is n x p without the intercept column.
RegressionModel fit_ols(const std::vector<std::vector<double>>& X,
                        const std::vector<double>& y);

enum class TargetMode { Level, Change };

struct ForecastSpec {
    double distance_tolerance_m = 400;  // merge-grid tile edge
    std::int64_t time_tolerance_s = 300;
    std::int64_t horizon_s = 0;
    TargetMode target_mode = TargetMode::Change;
    bool include_lambda = true;  // whether the eigenvalue joins the design
};

struct Design {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    std::vector<Timestamp> window_start;  // per row
    std::vector<std::string> feature_names;
};

// Row t pairs features at window T_t with the target at T_t + horizon.
// Change mode: y_t = (U(T_t+h) - U(T_t)) as percent of the series mean.
Design build_design(const std::vector<Timestamp>& window_starts,
                    const std::vector<FeatureVector>& features,
                    const std::vector<double>& utilization, const ForecastSpec& spec,
                    std::int64_t step_s);

struct GridCell {
    ForecastSpec spec;
    RegressionModel model;
    bool failed = false;
    std::string error;
};

struct GridSpec {
    std::vector<double> distance_tolerances_m = {400, 800};
    std::vector<std::int64_t> time_tolerances_s = {30, 120, 300};
    std::vector<std::int64_t> horizons_s = {0, 3600, 7200};
};

// One model per (distance tolerance, time tolerance, horizon) cell. The
// feature series is shared across cells; utilization is recomputed per
// tolerance pair. Cell failures are isolated.
std::vector<GridCell> fit_grid(std::span<const TripRecord> trips, const TileGrid& analysis_grid,
                               const std::vector<SnapshotWindow>& windows,
                               const GridSpec& grid, TargetMode mode,
                               std::int64_t step_s, LambdaMode lambda_mode,
                               bool include_lambda);

struct HorizonEntry {
    std::int64_t horizon_s = 0;
    double r2 = 0;
    double adjusted_r2 = 0;
    bool failed = false;
    std::string error;
};

using HorizonSweep = std::vector<HorizonEntry>;

HorizonSweep horizon_sweep(const std::vector<Timestamp>& window_starts,
                           const std::vector<FeatureVector>& features,
                           const std::vector<double>& utilization,
                           const std::vector<std::int64_t>& horizons_s,
                           const ForecastSpec& spec, std::int64_t step_s);

struct ValidationReport {
    RegressionModel train;
    double validation_r2 = 0;
    int n_train = 0;
    int n_validation = 0;
    std::vector<double> predicted;  // validation rows
    std::vector<double> observed;
};

// Fit on windows before split_point, evaluate out-of-sample at/after it.
ValidationReport split_validate(const std::vector<Timestamp>& window_starts,
                                const std::vector<FeatureVector>& features,
                                const std::vector<double>& utilization,
                                Timestamp split_point, const ForecastSpec& spec,
                                std::int64_t step_s);

}  // namespace rides
