#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "rides/grid.hpp"

using namespace rides;

namespace {

// bbox spanning exactly w x h meters at the given corner
BoundingBox box_of_meters(double lon0, double lat0, double w_m, double h_m) {
    double lat1 = lat0 + h_m / meters_per_degree_lat();
    double mid = 0.5 * (lat0 + lat1);
    return {lon0, lat0, lon0 + w_m / meters_per_degree_lon(mid), lat1};
}

}  // namespace

TEST_CASE("exact division") {
    auto bbox = box_of_meters(-74.0, 40.7, 10000, 10000);
    TileGrid g(bbox, 1000);
    CHECK(g.n_cols() == 10);
    CHECK(g.n_rows() == 10);
}

TEST_CASE("partial tile at the edge uses the ceiling") {
    auto bbox = box_of_meters(-74.0, 40.7, 10500, 10000);
    TileGrid g(bbox, 1000);
    CHECK(g.n_cols() == 11);
    CHECK(g.n_rows() == 10);
}

TEST_CASE("min corner maps to tile (0,0)") {
    auto bbox = box_of_meters(-74.0, 40.7, 10000, 10000);
    TileGrid g(bbox, 1000);
    CHECK(g.tile_of(bbox.lon_min, bbox.lat_min) == TileId{0, 0});
}

TEST_CASE("bbox midpoint lands in the upper half of a 10x10 grid") {
    auto bbox = box_of_meters(-74.0, 40.7, 10000, 10000);
    TileGrid g(bbox, 1000);
    auto t = g.tile_of(0.5 * (bbox.lon_min + bbox.lon_max), 0.5 * (bbox.lat_min + bbox.lat_max));
    CHECK(t == TileId{5, 5});
}

TEST_CASE("bbox max corner still maps to a valid tile") {
    auto bbox = box_of_meters(-74.0, 40.7, 10000, 10000);
    TileGrid g(bbox, 1000);
    auto t = g.tile_of(bbox.lon_max, bbox.lat_max);
    CHECK(t == TileId{9, 9});
}

TEST_CASE("edge length outside [50, 5000] is a configuration error") {
    auto bbox = box_of_meters(-74.0, 40.7, 10000, 10000);
    CHECK_THROWS_AS(TileGrid(bbox, 10), ConfigError);
    CHECK_THROWS_AS(TileGrid(bbox, 10000), ConfigError);
    CHECK_THROWS_AS(TileGrid({0, 0, 0, 0}, 1000), ConfigError);
}

TEST_CASE("out-of-bbox point is a domain error") {
    auto bbox = box_of_meters(-74.0, 40.7, 10000, 10000);
    TileGrid g(bbox, 1000);
    CHECK_THROWS_AS(g.tile_of(bbox.lon_min - 1.0, bbox.lat_min), DataError);
}

TEST_CASE("tile_of partitions the bbox") {
    auto bbox = box_of_meters(-74.0, 40.7, 7300, 4100);
    TileGrid g(bbox, 500);
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> lon(bbox.lon_min, bbox.lon_max);
    std::uniform_real_distribution<double> lat(bbox.lat_min, bbox.lat_max);
    for (int i = 0; i < 10000; ++i) {
        auto t = g.tile_of(lon(rng), lat(rng));
        CHECK(t.col >= 0);
        CHECK(t.col < g.n_cols());
        CHECK(t.row >= 0);
        CHECK(t.row < g.n_rows());
    }
}

TEST_CASE("doubling the edge never increases the number of active tiles") {
    auto bbox = box_of_meters(-74.0, 40.7, 9100, 8700);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> lon(bbox.lon_min, bbox.lon_max);
    std::uniform_real_distribution<double> lat(bbox.lat_min, bbox.lat_max);
    std::vector<std::pair<double, double>> points;
    for (int i = 0; i < 500; ++i) points.push_back({lon(rng), lat(rng)});
    for (double edge : {200.0, 400.0, 800.0, 1600.0}) {
        TileGrid fine(bbox, edge), coarse(bbox, 2 * edge);
        std::set<TileId> fine_tiles, coarse_tiles;
        for (auto [x, y] : points) {
            fine_tiles.insert(fine.tile_of(x, y));
            coarse_tiles.insert(coarse.tile_of(x, y));
        }
        CHECK(coarse_tiles.size() <= fine_tiles.size());
    }
}
