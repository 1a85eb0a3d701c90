#pragma once

#include <cstdint>
#include <vector>

#include "rides/network.hpp"

namespace rides {

// Unweighted undirected simple projection of a snapshot (self loops dropped).
// Centralities and the eigenvalue are computed on this view.
struct SimpleGraph {
    int n = 0;
    std::vector<std::vector<int>> adj;  // sorted neighbor lists, no duplicates

    static SimpleGraph from_network(const RidesNetwork& net);
    static SimpleGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges);
};

struct FeatureVector {
    double n_nodes = 0;
    double n_edges = 0;
    double density = 0;           // |E| / |V|
    double avg_betweenness = 0;
    double avg_closeness = 0;
    double avg_eigenvector = 0;
    double largest_eigenvalue = 0;

    static constexpr int kCount = 7;
    double operator[](int i) const {
        const double* f[] = {&n_nodes, &n_edges, &density, &avg_betweenness,
                             &avg_closeness, &avg_eigenvector, &largest_eigenvalue};
        return *f[i];
    }
};

enum class LambdaMode { Raw, WeightNormalized };

inline constexpr double kEigTolerance = 1e-12;  // residual norm, relative to lambda
inline constexpr int kEigMaxIter = 500000;

// Per-node scores. Betweenness counts unordered pairs once, endpoints
// excluded, unnormalized (Brandes accumulation, one BFS per source).
// Closeness is component-scaled: (r-1)/sum_d with r the component size.
// Eigenvector centrality is the unit-norm principal eigenvector of the
// largest connected component; nodes outside it score 0.
std::vector<double> betweenness_scores(const SimpleGraph& g);
std::vector<double> closeness_scores(const SimpleGraph& g);
std::vector<double> eigenvector_scores(const SimpleGraph& g);

double betweenness_avg(const RidesNetwork& net);
double closeness_avg(const RidesNetwork& net);
double eigenvector_centrality_avg(const RidesNetwork& net);

// Principal eigenvalue of a dense symmetric non-negative matrix (row-major,
// n x n) by shifted power iteration.
double power_iteration_sym(const std::vector<double>& a, int n,
                           double tol = kEigTolerance, int max_iter = kEigMaxIter);

double largest_eigenvalue(const RidesNetwork& net, LambdaMode mode = LambdaMode::Raw);
double largest_eigenvalue(const SimpleGraph& g);

FeatureVector features(const RidesNetwork& net, LambdaMode mode = LambdaMode::Raw);

// Expected success of a uniform guess over the origin tile's observed
// destination set, ride-weighted.
double destination_guess_probability(const RidesNetwork& net);

// Straightforward single-threaded reference kernels, kept for testing the
// OpenMP implementations against.
namespace serial {
std::vector<double> betweenness_scores(const SimpleGraph& g);
std::vector<double> closeness_scores(const SimpleGraph& g);
FeatureVector features(const RidesNetwork& net, LambdaMode mode = LambdaMode::Raw);
}  // namespace serial

}  // namespace rides
