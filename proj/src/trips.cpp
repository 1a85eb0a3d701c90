#include "rides/trips.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rides/errors.hpp"

namespace rides {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
    std::string t = trim(s);
    if (t.empty()) return false;
    const char* b = t.data();
    const char* e = b + t.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

bool parse_int(const std::string& s, std::int64_t& out) {
    std::string t = trim(s);
    if (t.empty()) return false;
    const char* b = t.data();
    const char* e = b + t.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(const std::string& text) {
    std::string t = trim(text);
    if (t.empty()) return std::nullopt;
    bool digits = true;
    for (char c : t)
        if (!std::isdigit(static_cast<unsigned char>(c)) && c != '-') digits = false;
    if (digits) {
        std::int64_t v;
        if (parse_int(t, v)) return v;
        return std::nullopt;
    }
    std::tm tm{};
    std::istringstream ss(t);
    ss >> std::get_time(&tm, "%Y-%m-%d %H:%M:%S");
    if (ss.fail()) return std::nullopt;
    return static_cast<Timestamp>(timegm(&tm));
}

TripCsvReader::TripCsvReader(std::istream& in, const CsvSchema& schema)
    : in_(in), schema_(schema) {
    std::string header;
    if (!std::getline(in_, header)) throw DataError("empty input: no header row");
    auto cols = split_line(header, schema_.delimiter);
    n_cols_ = static_cast<int>(cols.size());
    for (int i = 0; i < n_cols_; ++i) {
        const std::string name = trim(cols[i]);
        if (name == schema_.pickup_time) idx_time_ = i;
        else if (name == schema_.pickup_lon) idx_plon_ = i;
        else if (name == schema_.pickup_lat) idx_plat_ = i;
        else if (name == schema_.dropoff_lon) idx_dlon_ = i;
        else if (name == schema_.dropoff_lat) idx_dlat_ = i;
        else if (name == schema_.passenger_count) idx_pax_ = i;
        else if (name == schema_.trip_duration) idx_dur_ = i;
        else if (!schema_.avg_velocity.empty() && name == schema_.avg_velocity) idx_vel_ = i;
    }
    if (idx_time_ < 0 || idx_plon_ < 0 || idx_plat_ < 0 || idx_dlon_ < 0 ||
        idx_dlat_ < 0 || idx_pax_ < 0 || idx_dur_ < 0)
        throw DataError("header is missing a required column");
}

bool TripCsvReader::next(ParsedRow& out) {
    std::string line;
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    out = ParsedRow{};
    out.line_no = line_no_;
    auto f = split_line(line, schema_.delimiter);
    if (static_cast<int>(f.size()) != n_cols_) {
        out.error = "wrong field count";
        return true;
    }
    auto ts = parse_timestamp(f[idx_time_]);
    std::int64_t pax, dur;
    if (!ts || !parse_double(f[idx_plon_], out.row.pickup_lon) ||
        !parse_double(f[idx_plat_], out.row.pickup_lat) ||
        !parse_double(f[idx_dlon_], out.row.dropoff_lon) ||
        !parse_double(f[idx_dlat_], out.row.dropoff_lat) ||
        !parse_int(f[idx_pax_], pax) || !parse_int(f[idx_dur_], dur)) {
        out.error = "unparseable field";
        return true;
    }
    out.row.pickup_time = *ts;
    out.row.passenger_count = static_cast<int>(pax);
    out.row.trip_duration_s = dur;
    if (idx_vel_ >= 0) parse_double(f[idx_vel_], out.row.avg_velocity);
    out.ok = true;
    return true;
}

namespace {

bool gps_erroneous(double lon, double lat) {
    if (lon == 0.0 && lat == 0.0) return true;
    return lon < -180.0 || lon > 180.0 || lat < -90.0 || lat > 90.0;
}

}  // namespace

std::optional<TripRecord> clean_row(const ParsedRow& row, const BoundingBox& bbox,
                                    CleaningReport& report) {
    ++report.rows_read;
    if (!row.ok) {
        ++report.rows_dropped_schema;
        return std::nullopt;
    }
    const RawTripRow& r = row.row;
    if (r.passenger_count < 1 || r.passenger_count > kMaxPassengers ||
        r.trip_duration_s < 0) {
        ++report.rows_dropped_schema;
        return std::nullopt;
    }
    if (gps_erroneous(r.pickup_lon, r.pickup_lat) ||
        gps_erroneous(r.dropoff_lon, r.dropoff_lat)) {
        ++report.rows_dropped_gps;
        return std::nullopt;
    }
    if (!bbox.contains(r.pickup_lon, r.pickup_lat) ||
        !bbox.contains(r.dropoff_lon, r.dropoff_lat)) {
        ++report.rows_dropped_bbox;
        return std::nullopt;
    }
    TripRecord t;
    t.origin_lon = r.pickup_lon;
    t.origin_lat = r.pickup_lat;
    t.dest_lon = r.dropoff_lon;
    t.dest_lat = r.dropoff_lat;
    t.t_start = r.pickup_time;
    t.t_end = r.pickup_time + r.trip_duration_s;
    t.passengers = r.passenger_count;
    ++report.rows_kept;
    return t;
}

IngestResult ingest_file(const std::string& path, const CsvSchema& schema,
                         const BoundingBox& bbox) {
    if (!bbox.valid()) throw ConfigError("degenerate bounding box");
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file: " + path);
    TripCsvReader reader(in, schema);
    IngestResult out;
    ParsedRow row;
    while (reader.next(row)) {
        if (auto t = clean_row(row, bbox, out.report)) out.trips.push_back(*t);
    }
    return out;
}

std::string CleaningReport::to_text() const {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "rows_read=%llu\nrows_dropped_gps=%llu\nrows_dropped_bbox=%llu\n"
                  "rows_dropped_schema=%llu\nrows_kept=%llu\n",
                  (unsigned long long)rows_read, (unsigned long long)rows_dropped_gps,
                  (unsigned long long)rows_dropped_bbox,
                  (unsigned long long)rows_dropped_schema, (unsigned long long)rows_kept);
    return buf;
}

std::string CleaningReport::to_json() const {
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "{\"rows_read\":%llu,\"rows_dropped_gps\":%llu,"
                  "\"rows_dropped_bbox\":%llu,\"rows_dropped_schema\":%llu,"
                  "\"rows_kept\":%llu}\n",
                  (unsigned long long)rows_read, (unsigned long long)rows_dropped_gps,
                  (unsigned long long)rows_dropped_bbox,
                  (unsigned long long)rows_dropped_schema, (unsigned long long)rows_kept);
    return buf;
}

static constexpr const char* kStoreMagic = "#rides-trip-store\t1";

void write_trip_store(const std::string& path, const std::vector<TripRecord>& trips) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open trip store for writing: " + path);
    out << kStoreMagic << "\n";
    out << "t_start\tt_end\tolon\tolat\tdlon\tdlat\tpassengers\n";
    char buf[256];
    for (const auto& t : trips) {
        std::snprintf(buf, sizeof buf, "%lld\t%lld\t%.7f\t%.7f\t%.7f\t%.7f\t%d\n",
                      (long long)t.t_start, (long long)t.t_end, t.origin_lon,
                      t.origin_lat, t.dest_lon, t.dest_lat, t.passengers);
        out << buf;
    }
    if (!out) throw DataError("write failed: " + path);
}

std::vector<TripRecord> read_trip_store(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open trip store: " + path);
    std::string line;
    if (!std::getline(in, line) || split_line(line, '\t')[0] != "#rides-trip-store")
        throw DataError("not a trip store (bad magic): " + path);
    std::getline(in, line);  // column header
    std::vector<TripRecord> trips;
    std::uint64_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split_line(line, '\t');
        if (f.size() != 7) throw DataError("trip store row has wrong field count at line " +
                                           std::to_string(line_no));
        TripRecord t;
        std::int64_t pax;
        if (!parse_int(f[0], t.t_start) || !parse_int(f[1], t.t_end) ||
            !parse_double(f[2], t.origin_lon) || !parse_double(f[3], t.origin_lat) ||
            !parse_double(f[4], t.dest_lon) || !parse_double(f[5], t.dest_lat) ||
            !parse_int(f[6], pax))
            throw DataError("unparseable trip store row at line " + std::to_string(line_no));
        t.passengers = static_cast<int>(pax);
        trips.push_back(t);
    }
    return trips;
}

}  // namespace rides
