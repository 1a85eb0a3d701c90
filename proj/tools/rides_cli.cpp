#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rides/config.hpp"
#include "rides/errors.hpp"
#include "rides/pipeline.hpp"
#include "rides/synth.hpp"

namespace fs = std::filesystem;
using namespace rides;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

struct SpanWindows {
    Timestamp span_start = 0, span_end = 0;
    std::vector<SnapshotWindow> windows;
};

// Windows aligned to the step, covering every trip start.
SpanWindows windows_for(const std::vector<TripRecord>& trips, std::int64_t window_len,
                        std::int64_t step) {
    if (trips.empty()) return {};
    Timestamp t_min = trips.front().t_start, t_max = trips.front().t_start;
    for (const auto& t : trips) {
        t_min = std::min(t_min, t.t_start);
        t_max = std::max(t_max, t.t_start);
    }
    SpanWindows s;
    s.span_start = (t_min / step) * step;
    s.span_end = s.span_start + window_len;
    while (s.span_end <= t_max) s.span_end += step;
    s.windows = sliding_windows(s.span_start, s.span_end, window_len, step);
    return s;
}

std::string utilization_csv(const UtilizationSeries& s) {
    std::string out = "window_start,alpha,saved_fraction,lower_bound,upper_bound,pct_change_vs_mean\n";
    for (std::size_t i = 0; i < s.results.size(); ++i) {
        const auto& r = s.results[i];
        out += std::to_string(s.window_start[i]) + "," + fmt(r.alpha) + "," +
               fmt(r.saved_fraction) + "," + fmt(r.lower_bound) + "," + fmt(r.upper_bound) +
               "," + fmt(s.pct_change_vs_mean[i]) + "\n";
    }
    return out;
}

std::string features_csv(const FeatureSeries& s) {
    std::string out =
        "window_start,n_nodes,n_edges,density,avg_betweenness,avg_closeness,"
        "avg_eigenvector,largest_eigenvalue\n";
    for (std::size_t i = 0; i < s.features.size(); ++i) {
        const auto& f = s.features[i];
        out += std::to_string(s.window_start[i]);
        for (int j = 0; j < FeatureVector::kCount; ++j) out += "," + fmt(f[j]);
        out += "\n";
    }
    return out;
}

json model_json(const GridCell& cell) {
    json j;
    j["distance_tolerance_m"] = cell.spec.distance_tolerance_m;
    j["time_tolerance_s"] = cell.spec.time_tolerance_s;
    j["horizon_s"] = cell.spec.horizon_s;
    j["target_mode"] = cell.spec.target_mode == TargetMode::Level ? "level" : "change";
    if (cell.failed) {
        j["failed"] = true;
        j["error"] = cell.error;
        return j;
    }
    const auto& m = cell.model;
    j["n_samples"] = m.n_samples;
    j["n_predictors"] = m.n_predictors;
    j["coefficients"] = m.coefficients;
    j["coefficients_standardized"] = m.coefficients_std;
    j["std_errors"] = m.std_errors;
    j["t_stats"] = m.t_stats;
    j["r2"] = m.r2;
    j["adjusted_r2"] = m.adjusted_r2;
    j["anova"] = {{"ss_regression", m.anova.ss_regression},
                  {"ss_residual", m.anova.ss_residual},
                  {"ss_total", m.anova.ss_total},
                  {"f_statistic", m.anova.f_statistic},
                  {"df_regression", m.anova.df_regression},
                  {"df_residual", m.anova.df_residual}};
    return j;
}

std::string cell_tag(const ForecastSpec& s) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "d%g_t%lld_h%lld", s.distance_tolerance_m,
                  (long long)s.time_tolerance_s, (long long)s.horizon_s);
    return buf;
}

int cmd_synth(const PipelineConfig& cfg) {
    auto result = generate(cfg.synth);
    fs::create_directories(cfg.output_dir);
    write_trip_store(cfg.store_path, result.trips);
    write_ground_truth((fs::path(cfg.output_dir) / "ground_truth.json").string(),
                       result.truth);
    std::cout << "trips=" << result.trips.size() << " store=" << cfg.store_path << "\n";
    return 0;
}

int cmd_ingest(const PipelineConfig& cfg) {
    auto result = ingest_file(cfg.input_path, cfg.schema, cfg.bbox);
    write_trip_store(cfg.store_path, result.trips);
    atomic_write((fs::path(cfg.output_dir) / "cleaning_report.txt").string(),
                 result.report.to_text());
    atomic_write((fs::path(cfg.output_dir) / "cleaning_report.json").string(),
                 result.report.to_json());
    std::cout << result.report.to_text();
    return 0;
}

int cmd_analyze(const PipelineConfig& cfg) {
    auto trips = read_trip_store(cfg.store_path);
    fs::create_directories(cfg.output_dir);
    if (trips.empty()) {
        atomic_write((fs::path(cfg.output_dir) / "features.csv").string(),
                     features_csv(FeatureSeries{}));
        std::cerr << "warning: empty trip store, emitting empty series\n";
        return 0;
    }
    TileGrid analysis_grid(cfg.bbox, cfg.analysis_edge_m);
    auto sw = windows_for(trips, cfg.window_len_s, cfg.step_s);

    auto fs_series = feature_series(trips, analysis_grid, sw.windows, cfg.lambda_mode);
    atomic_write((fs::path(cfg.output_dir) / "features.csv").string(),
                 features_csv(fs_series));

    for (double dist : cfg.merge_edges_m) {
        SharingConfig scfg;
        scfg.merge_grid = TileGrid(cfg.bbox, dist);
        for (std::int64_t delay : cfg.delays_s) {
            scfg.max_delay_s = delay;
            auto series = utilization_series(trips, sw.windows, scfg);
            char name[96];
            std::snprintf(name, sizeof name, "utilization_d%g_t%lld.csv", dist,
                          (long long)delay);
            atomic_write((fs::path(cfg.output_dir) / name).string(),
                         utilization_csv(series));
        }
    }

    // monthly aggregate: one network over the full span
    auto agg = build_network(trips, analysis_grid,
                             {sw.span_start, sw.windows.back().t2});
    {
        std::string out;
        auto write_hist = [&](Direction d, const char* name) {
            auto hist = degree_distribution(agg, d);
            std::string csv = "degree,node_count\n";
            for (auto [deg, cnt] : hist)
                csv += std::to_string(deg) + "," + std::to_string(cnt) + "\n";
            atomic_write((fs::path(cfg.output_dir) / name).string(), csv);
        };
        write_hist(Direction::In, "degree_distribution_in.csv");
        write_hist(Direction::Out, "degree_distribution_out.csv");
        write_hist(Direction::Total, "degree_distribution_total.csv");
        auto wh = edge_weight_distribution(agg);
        std::string csv = "weight,edge_count\n";
        for (auto [w, cnt] : wh)
            csv += std::to_string(w) + "," + std::to_string(cnt) + "\n";
        atomic_write((fs::path(cfg.output_dir) / "edge_weight_distribution.csv").string(),
                     csv);

        auto dist = passenger_distribution(trips);
        auto factors = merging_factors(dist);
        out += "total_trips=" + std::to_string(trips.size()) + "\n";
        out += "nodes=" + std::to_string(agg.n_nodes()) + "\n";
        out += "edges=" + std::to_string(agg.n_edges()) + "\n";
        out += "density=" + fmt(agg.n_nodes() ? double(agg.n_edges()) / agg.n_nodes() : 0) + "\n";
        out += "destination_guess_probability=" + fmt(destination_guess_probability(agg)) + "\n";
        out += "passenger_p1=" + fmt(dist.p1) + "\npassenger_p2=" + fmt(dist.p2) +
               "\npassenger_p3=" + fmt(dist.p3) + "\npassenger_p4=" + fmt(dist.p4) + "\n";
        out += "passenger_mean=" + fmt(dist.mean_passengers) + "\n";
        out += "merging_factor_lower=" + fmt(factors.lower) + "\n";
        out += "merging_factor_upper=" + fmt(factors.upper) + "\n";
        out += std::string("merging_factors_inverted=") + (factors.inverted ? "1" : "0") + "\n";
        for (double dm : cfg.merge_edges_m) {
            SharingConfig scfg;
            scfg.merge_grid = TileGrid(cfg.bbox, dm);
            scfg.factors = factors;
            for (std::int64_t delay : cfg.delays_s) {
                scfg.max_delay_s = delay;
                auto u = utilization(trips, scfg);
                char key[96];
                std::snprintf(key, sizeof key, "aggregate_alpha_d%g_t%lld=", dm,
                              (long long)delay);
                out += key + fmt(u.alpha) + "\n";
            }
        }
        atomic_write((fs::path(cfg.output_dir) / "aggregate.txt").string(), out);
    }
    std::cout << "windows=" << sw.windows.size() << " out=" << cfg.output_dir << "\n";
    return 0;
}

int cmd_forecast(const PipelineConfig& cfg) {
    auto trips = read_trip_store(cfg.store_path);
    if (trips.empty()) throw DataError("empty trip store: " + cfg.store_path);
    TileGrid analysis_grid(cfg.bbox, cfg.analysis_edge_m);
    auto sw = windows_for(trips, cfg.window_len_s, cfg.step_s);
    fs::create_directories(cfg.output_dir);

    GridSpec grid;
    grid.distance_tolerances_m = cfg.merge_edges_m;
    grid.time_tolerances_s = cfg.delays_s;
    grid.horizons_s = cfg.horizons_s;
    auto cells = fit_grid(trips, analysis_grid, sw.windows, grid, cfg.target_mode,
                          cfg.step_s, cfg.lambda_mode, cfg.include_lambda);

    std::string summary = "distance_m,delay_s,horizon_s,n,r2,adjusted_r2,f_statistic\n";
    for (const auto& cell : cells) {
        atomic_write(
            (fs::path(cfg.output_dir) / ("model_" + cell_tag(cell.spec) + ".json")).string(),
            model_json(cell).dump(2) + "\n");
        char row[160];
        if (cell.failed) {
            std::snprintf(row, sizeof row, "%g,%lld,%lld,0,nan,nan,nan\n",
                          cell.spec.distance_tolerance_m, (long long)cell.spec.time_tolerance_s,
                          (long long)cell.spec.horizon_s);
        } else {
            std::snprintf(row, sizeof row, "%g,%lld,%lld,%d,%.9g,%.9g,%.9g\n",
                          cell.spec.distance_tolerance_m, (long long)cell.spec.time_tolerance_s,
                          (long long)cell.spec.horizon_s, cell.model.n_samples, cell.model.r2,
                          cell.model.adjusted_r2, cell.model.anova.f_statistic);
        }
        summary += row;
    }
    atomic_write((fs::path(cfg.output_dir) / "grid_summary.csv").string(), summary);

    // R^2-vs-horizon sweep per tolerance pair, 0..12h by default
    std::vector<std::int64_t> horizons = cfg.sweep_horizons_s;
    if (horizons.empty())
        for (int h = 0; h <= 12; ++h) horizons.push_back(h * 3600);
    auto fseries = feature_series(trips, analysis_grid, sw.windows, cfg.lambda_mode);
    for (double dist : cfg.merge_edges_m) {
        SharingConfig scfg;
        scfg.merge_grid = TileGrid(cfg.bbox, dist);
        for (std::int64_t delay : cfg.delays_s) {
            scfg.max_delay_s = delay;
            auto useries = utilization_series(trips, sw.windows, scfg);
            std::vector<double> alphas(useries.results.size());
            std::transform(useries.results.begin(), useries.results.end(), alphas.begin(),
                           [](const UtilizationResult& r) { return r.alpha; });
            ForecastSpec spec;
            spec.distance_tolerance_m = dist;
            spec.time_tolerance_s = delay;
            spec.target_mode = cfg.target_mode;
            spec.include_lambda = cfg.include_lambda;
            auto sweep = horizon_sweep(fseries.window_start, fseries.features, alphas,
                                       horizons, spec, cfg.step_s);
            std::string csv = "horizon_s,r2,adjusted_r2\n";
            for (const auto& e : sweep) {
                if (e.failed)
                    csv += std::to_string(e.horizon_s) + ",nan,nan\n";
                else
                    csv += std::to_string(e.horizon_s) + "," + fmt(e.r2) + "," +
                           fmt(e.adjusted_r2) + "\n";
            }
            char name[96];
            std::snprintf(name, sizeof name, "sweep_d%g_t%lld.csv", dist, (long long)delay);
            atomic_write((fs::path(cfg.output_dir) / name).string(), csv);

            // split validation on this tolerance pair at the configured fraction
            std::size_t split_idx =
                static_cast<std::size_t>(cfg.split_fraction * sw.windows.size());
            if (split_idx > 0 && split_idx < sw.windows.size()) {
                try {
                    auto vr = split_validate(fseries.window_start, fseries.features, alphas,
                                             sw.windows[split_idx].t1, spec, cfg.step_s);
                    std::string txt;
                    txt += "n_train=" + std::to_string(vr.n_train) + "\n";
                    txt += "n_validation=" + std::to_string(vr.n_validation) + "\n";
                    txt += "train_r2=" + fmt(vr.train.r2) + "\n";
                    txt += "train_adjusted_r2=" + fmt(vr.train.adjusted_r2) + "\n";
                    txt += "validation_r2=" + fmt(vr.validation_r2) + "\n";
                    std::snprintf(name, sizeof name, "validation_d%g_t%lld.txt", dist,
                                  (long long)delay);
                    atomic_write((fs::path(cfg.output_dir) / name).string(), txt);
                    std::string scatter = "predicted,observed\n";
                    for (std::size_t i = 0; i < vr.predicted.size(); ++i)
                        scatter += fmt(vr.predicted[i]) + "," + fmt(vr.observed[i]) + "\n";
                    std::snprintf(name, sizeof name, "validation_scatter_d%g_t%lld.csv", dist,
                                  (long long)delay);
                    atomic_write((fs::path(cfg.output_dir) / name).string(), scatter);
                } catch (const std::exception& ex) {
                    std::cerr << "warning: split validation failed for d=" << dist
                              << " t=" << delay << ": " << ex.what() << "\n";
                }
            }
        }
    }
    std::cout << "cells=" << cells.size() << " out=" << cfg.output_dir << "\n";
    return 0;
}

// Full-data comparison against the published January 2013 figures, with
// +-15% plausibility bands. Informational; never a gate.
int cmd_report(const PipelineConfig& cfg) {
    auto trips = read_trip_store(cfg.store_path);
    if (trips.empty()) throw DataError("empty trip store: " + cfg.store_path);
    TileGrid analysis_grid(cfg.bbox, cfg.analysis_edge_m);
    auto sw = windows_for(trips, cfg.window_len_s, cfg.step_s);
    auto agg = build_network(trips, analysis_grid, {sw.span_start, sw.windows.back().t2});

    auto dist = passenger_distribution(trips);
    auto factors = merging_factors(dist);
    SharingConfig scfg;
    scfg.merge_grid = TileGrid(cfg.bbox, cfg.merge_edges_m.empty() ? 400.0
                                                                   : cfg.merge_edges_m.front());
    scfg.max_delay_s = 300;
    scfg.factors = factors;
    auto u5 = utilization(trips, scfg);

    struct Row {
        const char* metric;
        double observed, reference;
    };
    const Row rows[] = {
        {"cleaned_trip_count", static_cast<double>(trips.size()), 12784243.0},
        {"aggregate_nodes", static_cast<double>(agg.n_nodes()), 813.0},
        {"aggregate_edges", static_cast<double>(agg.n_edges()), 58014.0},
        {"destination_guess_probability", destination_guess_probability(agg), 0.075},
        {"alpha_5min", u5.alpha, 0.70},
        {"passenger_p1", dist.p1, 0.4922},
        {"mean_passengers", dist.mean_passengers, 1.7},
        {"merging_factor_lower", factors.lower, 0.8116},
        {"merging_factor_upper", factors.upper, 1.0591},
    };
    std::string out = "metric,observed,reference,band_low,band_high,within_band\n";
    for (const auto& r : rows) {
        double lo = r.reference * 0.85, hi = r.reference * 1.15;
        bool in = r.observed >= lo && r.observed <= hi;
        out += std::string(r.metric) + "," + fmt(r.observed) + "," + fmt(r.reference) + "," +
               fmt(lo) + "," + fmt(hi) + "," + (in ? "yes" : "no") + "\n";
    }
    out += "# comparison is informational; reproducing the published counts requires the\n";
    out += "# original January 2013 file and the original study region\n";
    atomic_write((fs::path(cfg.output_dir) / "paper_comparison.csv").string(), out);
    std::cout << out;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rides: tile-based rides-network analysis and utilization forecasting"};
    app.require_subcommand(1);

    // the config file seeds defaults, so load it before binding flags;
    // any flag then overrides its field
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    PipelineConfig cfg;
    if (!config_path.empty()) {
        try {
            cfg = PipelineConfig::load(config_path);
        } catch (const ConfigError& e) {
            std::cerr << "configuration error: " << e.what() << "\n";
            return 1;
        }
    }

    // flag overrides shared across subcommands; flags win over the file
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "pipeline config JSON");
        sub->add_option("--store", cfg.store_path, "trip store path");
        sub->add_option("--out", cfg.output_dir, "output directory");
        sub->add_option("--window", cfg.window_len_s, "window length, seconds");
        sub->add_option("--step", cfg.step_s, "window step, seconds");
        sub->add_option("--analysis-edge", cfg.analysis_edge_m, "analysis tile edge, meters");
    };

    auto* synth = app.add_subcommand("synth", "generate a synthetic trip store");
    add_common(synth);
    synth->add_option("--seed", cfg.synth.seed, "generator seed");
    synth->add_option("--days", cfg.synth.n_days, "number of days");
    synth->add_option("--rate", cfg.synth.base_rate_per_hour, "base departures per edge-hour");
    synth->add_option("--edges", cfg.synth.n_edges, "number of O-D pairs");

    auto* ingest = app.add_subcommand("ingest", "parse, clean and store raw trip records");
    add_common(ingest);
    ingest->add_option("--input", cfg.input_path, "raw delimited input file");

    auto* analyze = app.add_subcommand("analyze", "per-window features and utilization series");
    add_common(analyze);

    auto* forecast = app.add_subcommand("forecast", "model grid, horizon sweeps, validation");
    add_common(forecast);

    auto* report = app.add_subcommand("report", "comparison table against published figures");
    add_common(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    try {
        if (synth->parsed()) return cmd_synth(cfg);
        if (ingest->parsed()) return cmd_ingest(cfg);
        if (analyze->parsed()) return cmd_analyze(cfg);
        if (forecast->parsed()) return cmd_forecast(cfg);
        if (report->parsed()) return cmd_report(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    return 0;
}
