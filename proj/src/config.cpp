#include "rides/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "rides/errors.hpp"

namespace rides {

using nlohmann::json;

namespace {

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    PipelineConfig c;
    try {
        get_if(j, "input_path", c.input_path);
        get_if(j, "store_path", c.store_path);
        get_if(j, "output_dir", c.output_dir);
        if (j.contains("bbox")) {
            auto b = j.at("bbox");
            c.bbox = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                      b.at(3).get<double>()};
        }
        get_if(j, "analysis_edge_m", c.analysis_edge_m);
        get_if(j, "merge_edges_m", c.merge_edges_m);
        get_if(j, "window_len_s", c.window_len_s);
        get_if(j, "step_s", c.step_s);
        get_if(j, "delays_s", c.delays_s);
        get_if(j, "horizons_s", c.horizons_s);
        get_if(j, "sweep_horizons_s", c.sweep_horizons_s);
        get_if(j, "split_fraction", c.split_fraction);
        get_if(j, "include_lambda", c.include_lambda);
        std::string mode;
        get_if(j, "lambda_mode", mode);
        if (mode == "weight_normalized") c.lambda_mode = LambdaMode::WeightNormalized;
        else if (mode == "raw" || mode.empty()) c.lambda_mode = LambdaMode::Raw;
        else throw ConfigError("unknown lambda_mode: " + mode);
        mode.clear();
        get_if(j, "target_mode", mode);
        if (mode == "level") c.target_mode = TargetMode::Level;
        else if (mode == "change" || mode.empty()) c.target_mode = TargetMode::Change;
        else throw ConfigError("unknown target_mode: " + mode);
        if (j.contains("schema")) {
            auto s = j.at("schema");
            std::string delim;
            get_if(s, "delimiter", delim);
            if (!delim.empty()) c.schema.delimiter = delim[0];
            get_if(s, "pickup_time", c.schema.pickup_time);
            get_if(s, "pickup_lon", c.schema.pickup_lon);
            get_if(s, "pickup_lat", c.schema.pickup_lat);
            get_if(s, "dropoff_lon", c.schema.dropoff_lon);
            get_if(s, "dropoff_lat", c.schema.dropoff_lat);
            get_if(s, "passenger_count", c.schema.passenger_count);
            get_if(s, "trip_duration", c.schema.trip_duration);
            get_if(s, "avg_velocity", c.schema.avg_velocity);
        }
        if (j.contains("synth")) {
            auto s = j.at("synth");
            get_if(s, "seed", c.synth.seed);
            get_if(s, "n_days", c.synth.n_days);
            get_if(s, "n_cols", c.synth.n_cols);
            get_if(s, "n_rows", c.synth.n_rows);
            get_if(s, "n_edges", c.synth.n_edges);
            get_if(s, "popularity_exponent", c.synth.popularity_exponent);
            get_if(s, "weekend_amplitude", c.synth.weekend_amplitude);
            get_if(s, "start_weekday", c.synth.start_weekday);
            get_if(s, "base_rate_per_hour", c.synth.base_rate_per_hour);
            get_if(s, "start_time", c.synth.start_time);
            if (s.contains("bbox")) {
                auto b = s.at("bbox");
                c.synth.bbox = {b.at(0).get<double>(), b.at(1).get<double>(),
                                b.at(2).get<double>(), b.at(3).get<double>()};
            }
            if (s.contains("hourly_profile")) {
                auto p = s.at("hourly_profile");
                for (int h = 0; h < 24; ++h) c.synth.hourly_profile[h] = p.at(h).get<double>();
            }
            if (s.contains("passengers")) {
                auto p = s.at("passengers");
                c.synth.passengers.p1 = p.at(0).get<double>();
                c.synth.passengers.p2 = p.at(1).get<double>();
                c.synth.passengers.p3 = p.at(2).get<double>();
                c.synth.passengers.p4 = p.at(3).get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError("config field error in " + path + ": " + e.what());
    }
    return c;
}

void PipelineConfig::save(const std::string& path) const {
    json j;
    j["input_path"] = input_path;
    j["store_path"] = store_path;
    j["output_dir"] = output_dir;
    j["bbox"] = {bbox.lon_min, bbox.lat_min, bbox.lon_max, bbox.lat_max};
    j["analysis_edge_m"] = analysis_edge_m;
    j["merge_edges_m"] = merge_edges_m;
    j["window_len_s"] = window_len_s;
    j["step_s"] = step_s;
    j["delays_s"] = delays_s;
    j["horizons_s"] = horizons_s;
    j["sweep_horizons_s"] = sweep_horizons_s;
    j["split_fraction"] = split_fraction;
    j["include_lambda"] = include_lambda;
    j["lambda_mode"] = lambda_mode == LambdaMode::Raw ? "raw" : "weight_normalized";
    j["target_mode"] = target_mode == TargetMode::Level ? "level" : "change";
    j["schema"] = {{"delimiter", std::string(1, schema.delimiter)},
                   {"pickup_time", schema.pickup_time},
                   {"pickup_lon", schema.pickup_lon},
                   {"pickup_lat", schema.pickup_lat},
                   {"dropoff_lon", schema.dropoff_lon},
                   {"dropoff_lat", schema.dropoff_lat},
                   {"passenger_count", schema.passenger_count},
                   {"trip_duration", schema.trip_duration},
                   {"avg_velocity", schema.avg_velocity}};
    json s;
    s["seed"] = synth.seed;
    s["n_days"] = synth.n_days;
    s["n_cols"] = synth.n_cols;
    s["n_rows"] = synth.n_rows;
    s["n_edges"] = synth.n_edges;
    s["popularity_exponent"] = synth.popularity_exponent;
    s["weekend_amplitude"] = synth.weekend_amplitude;
    s["start_weekday"] = synth.start_weekday;
    s["base_rate_per_hour"] = synth.base_rate_per_hour;
    s["start_time"] = synth.start_time;
    s["bbox"] = {synth.bbox.lon_min, synth.bbox.lat_min, synth.bbox.lon_max,
                 synth.bbox.lat_max};
    s["hourly_profile"] = synth.hourly_profile;
    s["passengers"] = {synth.passengers.p1, synth.passengers.p2, synth.passengers.p3,
                       synth.passengers.p4};
    j["synth"] = s;
    atomic_write(path, j.dump(2) + "\n");
}

void atomic_write(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw DataError("cannot open for writing: " + tmp.string());
        out << contents;
        if (!out) throw DataError("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace rides
