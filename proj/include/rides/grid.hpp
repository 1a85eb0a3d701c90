#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>

#include "rides/errors.hpp"

namespace rides {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kPi = 3.14159265358979323846;

inline double meters_per_degree_lat() { return kPi * kEarthRadiusM / 180.0; }

inline double meters_per_degree_lon(double lat_deg) {
    return meters_per_degree_lat() * std::cos(lat_deg * kPi / 180.0);
}

struct BoundingBox {
    double lon_min = 0, lat_min = 0, lon_max = 0, lat_max = 0;

    bool valid() const { return lon_min < lon_max && lat_min < lat_max; }
    bool contains(double lon, double lat) const {
        return lon >= lon_min && lon <= lon_max && lat >= lat_min && lat <= lat_max;
    }
    double mid_lat() const { return 0.5 * (lat_min + lat_max); }
    double width_m() const { return (lon_max - lon_min) * meters_per_degree_lon(mid_lat()); }
    double height_m() const { return (lat_max - lat_min) * meters_per_degree_lat(); }
};

// Default covers Manhattan and a margin of the surrounding boroughs.
inline BoundingBox manhattan_bbox() { return {-74.03, 40.68, -73.90, 40.88}; }

struct TileId {
    std::int32_t col = 0;
    std::int32_t row = 0;
    auto operator<=>(const TileId&) const = default;
    std::uint64_t key() const {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(col)) << 32) |
               static_cast<std::uint32_t>(row);
    }
};

// Equal-sized square tiles over the bbox; half-open intervals [x, x+e) on
// both axes so every boundary point has exactly one tile. Sizes are in
// meters via an equirectangular approximation at the bbox mid-latitude.
class TileGrid {
public:
    TileGrid() = default;
    TileGrid(const BoundingBox& bbox, double edge_length_m) : bbox_(bbox), edge_m_(edge_length_m) {
        if (!bbox.valid()) throw ConfigError("degenerate bounding box");
        if (!(edge_length_m >= 50.0 && edge_length_m <= 5000.0))
            throw ConfigError("tile edge length must be in [50, 5000] meters, got " +
                              std::to_string(edge_length_m));
        deg_lon_per_tile_ = edge_length_m / meters_per_degree_lon(bbox.mid_lat());
        deg_lat_per_tile_ = edge_length_m / meters_per_degree_lat();
        n_cols_ = static_cast<int>(std::ceil((bbox.lon_max - bbox.lon_min) / deg_lon_per_tile_ - 1e-9));
        n_rows_ = static_cast<int>(std::ceil((bbox.lat_max - bbox.lat_min) / deg_lat_per_tile_ - 1e-9));
        if (n_cols_ < 1) n_cols_ = 1;
        if (n_rows_ < 1) n_rows_ = 1;
    }

    TileId tile_of(double lon, double lat) const {
        if (!bbox_.contains(lon, lat))
            throw DataError("point outside grid bounding box");
        // 1e-9 tile-unit slack so boundary points are not pushed down a tile
        // by rounding in the division
        int col = static_cast<int>(std::floor((lon - bbox_.lon_min) / deg_lon_per_tile_ + 1e-9));
        int row = static_cast<int>(std::floor((lat - bbox_.lat_min) / deg_lat_per_tile_ + 1e-9));
        // bbox max edge belongs to the last tile
        if (col >= n_cols_) col = n_cols_ - 1;
        if (row >= n_rows_) row = n_rows_ - 1;
        return {col, row};
    }

    const BoundingBox& bbox() const { return bbox_; }
    double edge_length_m() const { return edge_m_; }
    int n_cols() const { return n_cols_; }
    int n_rows() const { return n_rows_; }

private:
    BoundingBox bbox_;
    double edge_m_ = 0;
    double deg_lon_per_tile_ = 1, deg_lat_per_tile_ = 1;
    int n_cols_ = 0, n_rows_ = 0;
};

}  // namespace rides

template <>
struct std::hash<rides::TileId> {
    std::size_t operator()(const rides::TileId& t) const noexcept {
        return std::hash<std::uint64_t>{}(t.key());
    }
};
