#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "rides/sharing.hpp"
#include "rides/synth.hpp"

using namespace rides;

namespace {

SharingConfig config_for(const BoundingBox& bbox, double edge_m, std::int64_t delay) {
    SharingConfig c;
    c.merge_grid = TileGrid(bbox, edge_m);
    c.max_delay_s = delay;
    return c;
}

TripRecord trip(double lon, double lat, double dlon, double dlat, Timestamp t, int pax = 1) {
    return {lon, lat, dlon, dlat, t, t + 600, pax};
}

const BoundingBox kBox{-74.03, 40.68, -73.93, 40.77};

}  // namespace

TEST_CASE("match_edge basics") {
    CHECK(match_edge(std::vector<Timestamp>{}, 60) == 0);
    CHECK(match_edge(std::vector<Timestamp>{0, 30, 400}, 60) == 1);
    // greedy must not strand 90: pairs (0,50) and (90,130)
    CHECK(match_edge(std::vector<Timestamp>{0, 50, 90, 130}, 60) == 2);
}

TEST_CASE("match_edge equals brute-force maximum matching") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> len_d(0, 10), t_d(0, 1000), delay_d(1, 300);
    for (int trial = 0; trial < 5000; ++trial) {
        std::vector<Timestamp> times(len_d(rng));
        for (auto& t : times) t = t_d(rng);
        std::sort(times.begin(), times.end());
        std::int64_t delay = delay_d(rng);
        CHECK(match_edge(times, delay) == oracle::max_matching(times, delay));
    }
}

TEST_CASE("alpha is non-decreasing in the delay tolerance") {
    SynthSpec s;
    s.seed = 9;
    s.n_days = 1;
    s.bbox = kBox;
    auto data = generate(s);
    double prev = -1;
    for (std::int64_t delay : {30L, 120L, 300L, 1800L}) {
        auto u = utilization(data.trips, config_for(kBox, 400, delay));
        CHECK(u.alpha >= prev);
        prev = u.alpha;
    }
}

TEST_CASE("two identical simultaneous trips share perfectly") {
    std::vector<TripRecord> trips = {trip(-74.0, 40.7, -73.95, 40.75, 1000),
                                     trip(-74.0, 40.7, -73.95, 40.75, 1000)};
    auto u = utilization(trips, config_for(kBox, 400, 300));
    CHECK(u.alpha == doctest::Approx(1.0));
    CHECK(u.matched_trips == 2);
    CHECK(u.saved_fraction == doctest::Approx(0.5));
}

TEST_CASE("zero trips yields a flagged zero result") {
    auto u = utilization({}, config_for(kBox, 400, 300));
    CHECK(u.zero_trips);
    CHECK(u.alpha == 0.0);
}

TEST_CASE("matched count is always even and alpha bounded") {
    SynthSpec s;
    s.seed = 31;
    s.n_days = 1;
    s.bbox = kBox;
    auto data = generate(s);
    auto u = utilization(data.trips, config_for(kBox, 800, 120));
    CHECK(u.matched_trips % 2 == 0);
    CHECK(u.alpha >= 0.0);
    CHECK(u.alpha <= 1.0);
    CHECK(u.alpha == doctest::Approx(double(u.matched_trips) / u.total_trips));
}

TEST_CASE("serial and parallel utilization agree") {
    SynthSpec s;
    s.seed = 13;
    s.n_days = 2;
    s.bbox = kBox;
    auto data = generate(s);
    for (std::int64_t delay : {30L, 300L}) {
        auto cfg = config_for(kBox, 400, delay);
        auto a = utilization(data.trips, cfg);
        auto b = serial::utilization(data.trips, cfg);
        CHECK(a.matched_trips == b.matched_trips);
        CHECK(a.alpha == b.alpha);
    }
}

TEST_CASE("coarser merge grid never lowers alpha") {
    SynthSpec s;
    s.seed = 17;
    s.n_days = 1;
    s.bbox = kBox;
    auto data = generate(s);
    auto fine = utilization(data.trips, config_for(kBox, 400, 300));
    auto coarse = utilization(data.trips, config_for(kBox, 800, 300));
    CHECK(coarse.alpha >= fine.alpha);
}

TEST_CASE("merging factors reproduce the published bounds") {
    auto f = merging_factors({0.4922, 0.2422, 0.1572, 0.1084, 1.7, 0});
    CHECK(f.lower == doctest::Approx(0.8116).epsilon(0.0013));
    CHECK(f.upper == doctest::Approx(1.0591).epsilon(0.0013));
    CHECK_FALSE(f.inverted);
}

TEST_CASE("all-four-passenger fleet cannot merge at all") {
    auto f = merging_factors({0, 0, 0, 1, 4.0, 0});
    CHECK(f.lower == doctest::Approx(0.0));
    CHECK(f.upper == doctest::Approx(0.0));
}

TEST_CASE("all-two-passenger fleet merges fully under both schemes") {
    auto f = merging_factors({0, 1, 0, 0, 2.0, 0});
    CHECK(f.lower == doctest::Approx(1.0));
    CHECK(f.upper == doctest::Approx(1.0));
}

TEST_CASE("all-single-passenger fleet inverts the bound roles and is flagged") {
    auto f = merging_factors({1, 0, 0, 0, 1.0, 0});
    CHECK(f.lower == doctest::Approx(3.0));
    CHECK(f.upper == doctest::Approx(1.5));
    CHECK(f.inverted);
}

TEST_CASE("lower <= upper away from degenerate single-heavy distributions") {
    std::mt19937 rng(404);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        double s = a + b + c + d;
        if (s == 0) continue;
        PassengerDistribution dist{a / s, b / s, c / s, d / s, 0, 0};
        auto f = merging_factors(dist);
        if (f.inverted)
            CHECK(f.lower > f.upper);
        else
            CHECK(f.lower <= f.upper);
        CHECK(f.lower >= 0.0);
    }
}

TEST_CASE("invalid distribution is a domain error") {
    CHECK_THROWS_AS(merging_factors({0.5, 0.5, 0.5, 0.5, 0, 0}), DataError);
    CHECK_THROWS_AS(merging_factors({-0.1, 0.6, 0.3, 0.2, 0, 0}), DataError);
}

TEST_CASE("passenger distribution") {
    SUBCASE("all single") {
        std::vector<TripRecord> trips(10, trip(-74.0, 40.7, -73.95, 40.75, 0, 1));
        auto d = passenger_distribution(trips);
        CHECK(d.p1 == doctest::Approx(1.0));
        CHECK(d.mean_passengers == doctest::Approx(1.0));
    }
    SUBCASE("equal quarters") {
        std::vector<TripRecord> trips;
        for (int p = 1; p <= 4; ++p)
            for (int i = 0; i < 5; ++i) trips.push_back(trip(-74.0, 40.7, -73.95, 40.75, i, p));
        auto d = passenger_distribution(trips);
        CHECK(d.p1 == doctest::Approx(0.25));
        CHECK(d.p4 == doctest::Approx(0.25));
        CHECK(d.mean_passengers == doctest::Approx(2.5));
    }
    SUBCASE("over-capacity trips are reported separately") {
        std::vector<TripRecord> trips(4, trip(-74.0, 40.7, -73.95, 40.75, 0, 2));
        trips.push_back(trip(-74.0, 40.7, -73.95, 40.75, 0, 20));
        auto d = passenger_distribution(trips);
        CHECK(d.p2 == doctest::Approx(1.0));
        CHECK(d.over_capacity_fraction == doctest::Approx(0.2));
    }
    SUBCASE("empty input is a domain error") {
        CHECK_THROWS_AS(passenger_distribution({}), DataError);
    }
}

TEST_CASE("utilization series percent change") {
    // three windows engineered to alphas proportional to (0.5, 1.0, 1.5) x mean
    std::vector<TripRecord> trips;
    auto add_pairs = [&](Timestamp base, int pairs, int singles) {
        for (int i = 0; i < pairs; ++i) {
            trips.push_back(trip(-74.0, 40.7, -73.95, 40.75, base + i * 400));
            trips.push_back(trip(-74.0, 40.7, -73.95, 40.75, base + i * 400 + 10));
        }
        // singles sit in distinct origin tiles so nothing can pair with them
        for (int i = 0; i < singles; ++i)
            trips.push_back(trip(-74.02 + i * 0.012, 40.69, -73.95, 40.75, base + 1000));
    };
    // window alphas: 2/8, 4/8, 6/8  -> mean 0.5 -> changes -50%, 0%, +50%
    add_pairs(0, 1, 6);
    add_pairs(3600, 2, 4);
    add_pairs(7200, 3, 2);
    std::sort(trips.begin(), trips.end(),
              [](const TripRecord& a, const TripRecord& b) { return a.t_start < b.t_start; });
    std::vector<SnapshotWindow> windows = {{0, 3600}, {3600, 7200}, {7200, 10800}};
    auto cfg = config_for(kBox, 400, 60);
    auto s = utilization_series(trips, windows, cfg);
    REQUIRE(s.results.size() == 3);
    CHECK(s.pct_change_vs_mean[0] == doctest::Approx(-50.0));
    CHECK(s.pct_change_vs_mean[1] == doctest::Approx(0.0));
    CHECK(s.pct_change_vs_mean[2] == doctest::Approx(50.0));
}

TEST_CASE("constant demand gives near-zero percent changes") {
    std::vector<TripRecord> trips;
    for (int w = 0; w < 6; ++w)
        for (int i = 0; i < 10; ++i) {
            trips.push_back(trip(-74.0, 40.7, -73.95, 40.75, w * 3600 + i * 300));
            trips.push_back(trip(-74.0, 40.7, -73.95, 40.75, w * 3600 + i * 300 + 5));
        }
    std::vector<SnapshotWindow> windows;
    for (int w = 0; w < 6; ++w) windows.push_back({w * 3600, (w + 1) * 3600});
    auto s = utilization_series(trips, windows, config_for(kBox, 400, 60));
    for (double pc : s.pct_change_vs_mean) CHECK(std::abs(pc) < 1e-9);
}
