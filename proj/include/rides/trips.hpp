#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rides/grid.hpp"

namespace rides {

using Timestamp = std::int64_t;  // seconds since Unix epoch

struct RawTripRow {
    Timestamp pickup_time = 0;
    double pickup_lon = 0, pickup_lat = 0;
    double dropoff_lon = 0, dropoff_lat = 0;
    int passenger_count = 0;
    std::int64_t trip_duration_s = 0;
    double avg_velocity = 0;  // retained, unused by core math
};

struct TripRecord {
    double origin_lon = 0, origin_lat = 0;
    double dest_lon = 0, dest_lat = 0;
    Timestamp t_start = 0;
    Timestamp t_end = 0;
    int passengers = 1;

    bool operator==(const TripRecord&) const = default;
};

struct CleaningReport {
    std::uint64_t rows_read = 0;
    std::uint64_t rows_dropped_gps = 0;
    std::uint64_t rows_dropped_bbox = 0;
    std::uint64_t rows_dropped_schema = 0;
    std::uint64_t rows_kept = 0;

    bool reconciles() const {
        return rows_read == rows_kept + rows_dropped_gps + rows_dropped_bbox + rows_dropped_schema;
    }
    std::string to_text() const;  // key=value lines
    std::string to_json() const;
};

// Maps file columns to the raw-row fields. Velocity is optional.
struct CsvSchema {
    char delimiter = ',';
    std::string pickup_time = "pickup_datetime";
    std::string pickup_lon = "pickup_longitude";
    std::string pickup_lat = "pickup_latitude";
    std::string dropoff_lon = "dropoff_longitude";
    std::string dropoff_lat = "dropoff_latitude";
    std::string passenger_count = "passenger_count";
    std::string trip_duration = "trip_time_in_secs";
    std::string avg_velocity = "";  // empty: column absent
};

struct ParsedRow {
    bool ok = false;
    RawTripRow row;
    std::string error;      // set when !ok
    std::uint64_t line_no = 0;
};

// Streaming CSV reader over a header-carrying delimited file. Malformed rows
// come back as error markers in file order, never silently skipped.
class TripCsvReader {
public:
    TripCsvReader(std::istream& in, const CsvSchema& schema);
    bool next(ParsedRow& out);

private:
    std::istream& in_;
    CsvSchema schema_;
    std::uint64_t line_no_ = 1;
    int idx_time_ = -1, idx_plon_ = -1, idx_plat_ = -1, idx_dlon_ = -1, idx_dlat_ = -1;
    int idx_pax_ = -1, idx_dur_ = -1, idx_vel_ = -1;
    int n_cols_ = 0;
};

// Validity per row: schema drops (parse failures, bad passenger count, bad
// duration), gps drops (missing, exactly (0,0), outside world range), then
// bbox drops. Kept rows preserve input order.
constexpr int kMaxPassengers = 48;

std::optional<TripRecord> clean_row(const ParsedRow& row, const BoundingBox& bbox,
                                    CleaningReport& report);

struct IngestResult {
    std::vector<TripRecord> trips;
    CleaningReport report;
};

IngestResult ingest_file(const std::string& path, const CsvSchema& schema,
                         const BoundingBox& bbox);

// Canonical trip store: versioned TSV, deterministic formatting.
void write_trip_store(const std::string& path, const std::vector<TripRecord>& trips);
std::vector<TripRecord> read_trip_store(const std::string& path);

// "2013-01-07 11:32:08" or raw epoch seconds.
std::optional<Timestamp> parse_timestamp(const std::string& text);

}  // namespace rides
