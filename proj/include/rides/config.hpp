#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rides/grid.hpp"
#include "rides/regress.hpp"
#include "rides/synth.hpp"

namespace rides {

// Single human-editable JSON document; CLI flags override individual fields.
struct PipelineConfig {
    std::string input_path;                 // raw delimited file for ingest
    std::string store_path = "trips.tsv";   // canonical trip store
    std::string output_dir = "out";

    BoundingBox bbox = manhattan_bbox();
    double analysis_edge_m = 1000;
    std::vector<double> merge_edges_m = {400, 800};
    std::int64_t window_len_s = 3600;
    std::int64_t step_s = 3600;
    std::vector<std::int64_t> delays_s = {30, 120, 300};
    std::vector<std::int64_t> horizons_s = {0, 3600, 7200};
    std::vector<std::int64_t> sweep_horizons_s;  // defaults to 0..12h hourly
    LambdaMode lambda_mode = LambdaMode::Raw;
    TargetMode target_mode = TargetMode::Change;
    bool include_lambda = true;
    double split_fraction = 0.75;           // train share for split validation
    CsvSchema schema;

    SynthSpec synth;

    static PipelineConfig load(const std::string& path);
    void save(const std::string& path) const;
};

// write-then-rename so partially written outputs never land under their
// final name
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace rides
