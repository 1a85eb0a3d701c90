#include "rides/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rides/errors.hpp"

namespace rides {

SimpleGraph SimpleGraph::from_network(const RidesNetwork& net) {
    std::map<TileId, int> index;
    for (const auto& t : net.nodes) index.emplace(t, static_cast<int>(index.size()));
    SimpleGraph g;
    g.n = static_cast<int>(index.size());
    g.adj.resize(g.n);
    for (const auto& [k, e] : net.edges) {
        if (k.from == k.to) continue;  // self loops drop out of the simple view
        int u = index.at(k.from), v = index.at(k.to);
        g.adj[u].push_back(v);
        g.adj[v].push_back(u);
    }
    for (auto& a : g.adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return g;
}

SimpleGraph SimpleGraph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    SimpleGraph g;
    g.n = n;
    g.adj.resize(n);
    for (auto [u, v] : edges) {
        if (u == v) continue;
        g.adj[u].push_back(v);
        g.adj[v].push_back(u);
    }
    for (auto& a : g.adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return g;
}

namespace {

// Brandes accumulation from one source; adds contributions into acc.
// Counts ordered pairs; callers halve for the unordered-pairs convention.
void brandes_from_source(const SimpleGraph& g, int s, std::vector<double>& acc,
                         std::vector<int>& dist, std::vector<double>& sigma,
                         std::vector<double>& delta, std::vector<int>& order) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    order.clear();

    dist[s] = 0;
    sigma[s] = 1.0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        order.push_back(v);
        for (int w : g.adj[v]) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                q.push(w);
            }
            if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
        }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int w = *it;
        for (int v : g.adj[w])
            if (dist[v] == dist[w] + 1) delta[w] += sigma[w] / sigma[v] * (1.0 + delta[v]);
        if (w != s) acc[w] += delta[w];
    }
}

std::vector<int> component_of(const SimpleGraph& g) {
    std::vector<int> comp(g.n, -1);
    int c = 0;
    for (int s = 0; s < g.n; ++s) {
        if (comp[s] >= 0) continue;
        std::queue<int> q;
        q.push(s);
        comp[s] = c;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int w : g.adj[v])
                if (comp[w] < 0) {
                    comp[w] = c;
                    q.push(w);
                }
        }
        ++c;
    }
    return comp;
}

double closeness_of(const SimpleGraph& g, int s, std::vector<int>& dist) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    std::queue<int> q;
    q.push(s);
    long long sum = 0;
    int reached = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : g.adj[v])
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                sum += dist[w];
                ++reached;
                q.push(w);
            }
    }
    if (sum == 0) return 0.0;
    return static_cast<double>(reached - 1) / static_cast<double>(sum);
}

}  // namespace

std::vector<double> betweenness_scores(const SimpleGraph& g) {
    const int n = g.n;
    int n_threads = 1;
#ifdef _OPENMP
    n_threads = omp_get_max_threads();
#endif
    // per-thread accumulators merged in thread order under a static
    // schedule, so the floating-point sum is reproducible run to run
    std::vector<std::vector<double>> acc(n_threads, std::vector<double>(n, 0.0));
#pragma omp parallel
    {
        int tid = 0;
#ifdef _OPENMP
        tid = omp_get_thread_num();
#endif
        std::vector<double> sigma(n), delta(n);
        std::vector<int> dist(n), order;
        order.reserve(n);
#pragma omp for schedule(static)
        for (int s = 0; s < n; ++s)
            brandes_from_source(g, s, acc[tid], dist, sigma, delta, order);
    }
    std::vector<double> scores(n, 0.0);
    for (int t = 0; t < n_threads; ++t)
        for (int v = 0; v < n; ++v) scores[v] += acc[t][v];
    for (auto& x : scores) x *= 0.5;  // unordered pairs counted once
    return scores;
}

std::vector<double> closeness_scores(const SimpleGraph& g) {
    std::vector<double> scores(g.n, 0.0);
#pragma omp parallel
    {
        std::vector<int> dist(g.n);
#pragma omp for schedule(dynamic, 16)
        for (int s = 0; s < g.n; ++s) scores[s] = closeness_of(g, s, dist);
    }
    return scores;
}

double power_iteration_sym(const std::vector<double>& a, int n, double tol, int max_iter) {
    if (n == 0) return 0.0;
    // Shift by +1 so bipartite spectra (|lambda_min| == lambda_max) still
    // have a strictly dominant eigenvalue.
    const double shift = 1.0;
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
    double resid = 0;
    for (int it = 0; it < max_iter; ++it) {
        for (int i = 0; i < n; ++i) {
            double s = shift * x[i];
            const double* row = a.data() + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) s += row[j] * x[j];
            y[i] = s;
        }
        // Rayleigh quotient of the shifted matrix at unit x; stop on the
        // residual so near-degenerate spectra still terminate.
        double rho = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
        resid = 0;
        for (int i = 0; i < n; ++i) resid = std::max(resid, std::abs(y[i] - rho * x[i]));
        if (resid <= tol * std::max(1.0, rho)) return rho - shift;
        double norm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
        if (norm == 0.0) return 0.0;
        for (int i = 0; i < n; ++i) y[i] /= norm;
        x.swap(y);
    }
    throw NumericalError("power iteration did not converge", resid);
}

namespace {

// Shifted power iteration on an adjacency-list graph restricted to the
// vertex set `verts` (indices into g). Returns (lambda, unit eigenvector
// over verts order).
std::pair<double, std::vector<double>> power_iteration_graph(
    const SimpleGraph& g, const std::vector<int>& verts, double tol, int max_iter) {
    const int m = static_cast<int>(verts.size());
    if (m == 0) return {0.0, {}};
    std::vector<int> local(g.n, -1);
    for (int i = 0; i < m; ++i) local[verts[i]] = i;
    std::vector<double> x(m, 1.0 / std::sqrt(static_cast<double>(m))), y(m);
    const double shift = 1.0;
    double resid = 0;
    for (int it = 0; it < max_iter; ++it) {
        for (int i = 0; i < m; ++i) {
            double s = shift * x[i];
            for (int w : g.adj[verts[i]])
                if (local[w] >= 0) s += x[local[w]];
            y[i] = s;
        }
        double rho = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
        resid = 0;
        for (int i = 0; i < m; ++i) resid = std::max(resid, std::abs(y[i] - rho * x[i]));
        if (resid <= tol * std::max(1.0, rho)) return {rho - shift, x};
        double norm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
        if (norm == 0.0) return {0.0, std::vector<double>(m, 0.0)};
        for (int i = 0; i < m; ++i) y[i] /= norm;
        x.swap(y);
    }
    throw NumericalError("eigenvector power iteration did not converge", resid);
}

}  // namespace

std::vector<double> eigenvector_scores(const SimpleGraph& g) {
    std::vector<double> scores(g.n, 0.0);
    if (g.n == 0) return scores;
    auto comp = component_of(g);
    int n_comp = *std::max_element(comp.begin(), comp.end()) + 1;
    std::vector<int> size(n_comp, 0);
    for (int c : comp) ++size[c];
    int largest = static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());
    std::vector<int> verts;
    for (int v = 0; v < g.n; ++v)
        if (comp[v] == largest) verts.push_back(v);
    auto [lambda, x] = power_iteration_graph(g, verts, kEigTolerance, kEigMaxIter);
    (void)lambda;
    for (std::size_t i = 0; i < verts.size(); ++i) scores[verts[i]] = x[i];
    return scores;
}

double largest_eigenvalue(const SimpleGraph& g) {
    if (g.n == 0) return 0.0;
    std::vector<int> verts(g.n);
    std::iota(verts.begin(), verts.end(), 0);
    return power_iteration_graph(g, verts, kEigTolerance, kEigMaxIter).first;
}

double largest_eigenvalue(const RidesNetwork& net, LambdaMode mode) {
    if (net.nodes.empty()) return 0.0;
    if (mode == LambdaMode::Raw)
        return largest_eigenvalue(SimpleGraph::from_network(net));
    // weight-normalized: symmetrized edge weights over total window trips
    std::map<TileId, int> index;
    for (const auto& t : net.nodes) index.emplace(t, static_cast<int>(index.size()));
    const int n = static_cast<int>(index.size());
    const double total = static_cast<double>(net.total_trips());
    if (total == 0.0) return 0.0;
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    for (const auto& [k, e] : net.edges) {
        int u = index.at(k.from), v = index.at(k.to);
        double w = static_cast<double>(e.weight) / total;
        if (u == v) {
            a[static_cast<std::size_t>(u) * n + u] += w;
        } else {
            a[static_cast<std::size_t>(u) * n + v] += w;
            a[static_cast<std::size_t>(v) * n + u] += w;
        }
    }
    return power_iteration_sym(a, n);
}

namespace {

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double betweenness_avg(const RidesNetwork& net) {
    return mean(betweenness_scores(SimpleGraph::from_network(net)));
}

double closeness_avg(const RidesNetwork& net) {
    return mean(closeness_scores(SimpleGraph::from_network(net)));
}

double eigenvector_centrality_avg(const RidesNetwork& net) {
    return mean(eigenvector_scores(SimpleGraph::from_network(net)));
}

FeatureVector features(const RidesNetwork& net, LambdaMode mode) {
    FeatureVector f;
    f.n_nodes = static_cast<double>(net.n_nodes());
    f.n_edges = static_cast<double>(net.n_edges());
    f.density = f.n_nodes > 0 ? f.n_edges / f.n_nodes : 0.0;
    if (net.n_nodes() == 0) return f;
    auto g = SimpleGraph::from_network(net);
    f.avg_betweenness = mean(betweenness_scores(g));
    f.avg_closeness = mean(closeness_scores(g));
    f.avg_eigenvector = mean(eigenvector_scores(g));
    f.largest_eigenvalue = largest_eigenvalue(net, mode);
    return f;
}

double destination_guess_probability(const RidesNetwork& net) {
    if (net.total_trips() == 0) throw DataError("destination guess needs at least one trip");
    std::map<TileId, std::set<TileId>> dests;
    std::map<TileId, std::uint64_t> origin_trips;
    for (const auto& [k, e] : net.edges) {
        dests[k.from].insert(k.to);
        origin_trips[k.from] += e.weight;
    }
    double sum = 0;
    std::uint64_t total = 0;
    for (const auto& [o, trips] : origin_trips) {
        sum += static_cast<double>(trips) / static_cast<double>(dests[o].size());
        total += trips;
    }
    return sum / static_cast<double>(total);
}

namespace serial {

std::vector<double> betweenness_scores(const SimpleGraph& g) {
    const int n = g.n;
    std::vector<double> acc(n, 0.0), sigma(n), delta(n);
    std::vector<int> dist(n), order;
    order.reserve(n);
    for (int s = 0; s < n; ++s) brandes_from_source(g, s, acc, dist, sigma, delta, order);
    for (auto& x : acc) x *= 0.5;
    return acc;
}

std::vector<double> closeness_scores(const SimpleGraph& g) {
    std::vector<double> scores(g.n, 0.0);
    std::vector<int> dist(g.n);
    for (int s = 0; s < g.n; ++s) scores[s] = closeness_of(g, s, dist);
    return scores;
}

FeatureVector features(const RidesNetwork& net, LambdaMode mode) {
    FeatureVector f;
    f.n_nodes = static_cast<double>(net.n_nodes());
    f.n_edges = static_cast<double>(net.n_edges());
    f.density = f.n_nodes > 0 ? f.n_edges / f.n_nodes : 0.0;
    if (net.n_nodes() == 0) return f;
    auto g = SimpleGraph::from_network(net);
    f.avg_betweenness = mean(serial::betweenness_scores(g));
    f.avg_closeness = mean(serial::closeness_scores(g));
    f.avg_eigenvector = mean(eigenvector_scores(g));
    f.largest_eigenvalue = largest_eigenvalue(net, mode);
    return f;
}

}  // namespace serial

}  // namespace rides
