// Compares the OpenMP kernels against their serial references on a
// synthetic month. Usage: bench_kernels [n_edges] [n_days]
#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rides/metrics.hpp"
#include "rides/pipeline.hpp"
#include "rides/sharing.hpp"
#include "rides/synth.hpp"

using namespace rides;
using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main(int argc, char** argv) {
    SynthSpec spec;
    spec.seed = 7;
    spec.n_cols = 28;
    spec.n_rows = 28;
    spec.n_edges = argc > 1 ? std::atoi(argv[1]) : 4000;
    spec.n_days = argc > 2 ? std::atoi(argv[2]) : 7;
    spec.base_rate_per_hour = 3.0;
    auto data = generate(spec);
    std::printf("trips: %zu\n", data.trips.size());
#ifdef _OPENMP
    std::printf("omp threads: %d\n", omp_get_max_threads());
#endif

    TileGrid grid(spec.bbox, 400);
    auto net = build_network(data.trips, grid,
                             {spec.start_time, spec.start_time + spec.n_days * 86400L});
    auto g = SimpleGraph::from_network(net);
    std::printf("aggregate network: %d nodes, %zu directed edges\n", g.n, net.n_edges());

    auto t0 = Clock::now();
    auto b_serial = serial::betweenness_scores(g);
    double ts = seconds_since(t0);
    t0 = Clock::now();
    auto b_par = betweenness_scores(g);
    double tp = seconds_since(t0);
    double max_diff = 0;
    for (int v = 0; v < g.n; ++v)
        max_diff = std::max(max_diff, std::abs(b_serial[v] - b_par[v]));
    std::printf("betweenness   serial %.3fs  omp %.3fs  speedup %.2fx  max|diff| %.3g\n", ts,
                tp, ts / tp, max_diff);

    t0 = Clock::now();
    auto c_serial = serial::closeness_scores(g);
    ts = seconds_since(t0);
    t0 = Clock::now();
    auto c_par = closeness_scores(g);
    tp = seconds_since(t0);
    max_diff = 0;
    for (int v = 0; v < g.n; ++v)
        max_diff = std::max(max_diff, std::abs(c_serial[v] - c_par[v]));
    std::printf("closeness     serial %.3fs  omp %.3fs  speedup %.2fx  max|diff| %.3g\n", ts,
                tp, ts / tp, max_diff);

    SharingConfig scfg;
    scfg.merge_grid = TileGrid(spec.bbox, 400);
    scfg.max_delay_s = 300;
    t0 = Clock::now();
    auto u_serial = serial::utilization(data.trips, scfg);
    ts = seconds_since(t0);
    t0 = Clock::now();
    auto u_par = utilization(data.trips, scfg);
    tp = seconds_since(t0);
    std::printf("utilization   serial %.3fs  omp %.3fs  speedup %.2fx  alpha %.4f/%.4f\n", ts,
                tp, ts / tp, u_serial.alpha, u_par.alpha);

    auto windows = sliding_windows(spec.start_time, spec.start_time + spec.n_days * 86400L,
                                   3600, 3600);
    t0 = Clock::now();
    auto fs = feature_series(data.trips, grid, windows, LambdaMode::Raw);
    tp = seconds_since(t0);
    std::printf("feature series over %zu windows: %.3fs\n", fs.features.size(), tp);
    return 0;
}
