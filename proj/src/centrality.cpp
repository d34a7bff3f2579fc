#include "ncage/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ncage/parallel.hpp"

namespace ncage {

std::string to_string(CentralityKind k) {
    switch (k) {
        case CentralityKind::degree: return "degree";
        case CentralityKind::eigenvector: return "eigenvector";
        case CentralityKind::closeness: return "closeness";
        case CentralityKind::harmonic: return "harmonic";
        case CentralityKind::betweenness: return "betweenness";
    }
    return "?";
}

CentralityKind parse_centrality(const std::string& s) {
    if (s == "degree") return CentralityKind::degree;
    if (s == "eigenvector" || s == "eigen") return CentralityKind::eigenvector;
    if (s == "closeness") return CentralityKind::closeness;
    if (s == "harmonic") return CentralityKind::harmonic;
    if (s == "betweenness") return CentralityKind::betweenness;
    throw InvalidParameter("unknown centrality: " + s);
}

EigenvectorResult eigenvector_centrality(const Graph& g, PowerMethodOptions opts) {
    const NodeId n = g.num_nodes();
    if (n < 2 || g.num_edges() == 0) {
        throw InvalidParameter("eigenvector centrality needs a graph with at least one edge");
    }
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> y(n);
    EigenvectorResult out;
    out.centrality.kind = CentralityKind::eigenvector;
    for (int it = 1; it <= opts.max_iter; ++it) {
        double norm2 = 0.0;
        for (NodeId i = 0; i < n; ++i) {
            double acc = x[i];
            for (NodeId j : g.neighbors(i)) acc += x[j];
            y[i] = acc;
            norm2 += acc * acc;
        }
        const double norm = std::sqrt(norm2);
        double diff = 0.0;
        for (NodeId i = 0; i < n; ++i) {
            y[i] /= norm;
            diff = std::max(diff, std::abs(y[i] - x[i]));
        }
        x.swap(y);
        if (diff < opts.tol) {
            out.iterations = it;
            out.eigenvalue = norm - 1.0;
            out.centrality.values = std::move(x);
            return out;
        }
    }
    throw ConvergenceError("power method did not converge in " + std::to_string(opts.max_iter) +
                           " iterations");
}

namespace {

// Unweighted single-source distances; -1 marks unreachable nodes.
void bfs(const Graph& g, NodeId s, std::vector<int>& dist, std::vector<NodeId>& queue) {
    std::fill(dist.begin(), dist.end(), -1);
    queue.clear();
    dist[s] = 0;
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        NodeId u = queue[head];
        for (NodeId v : g.neighbors(u)) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
}

}  // namespace

CentralityVector closeness_centrality(const Graph& g) {
    const NodeId n = g.num_nodes();
    CentralityVector out{CentralityKind::closeness, std::vector<double>(n, 0.0)};
    if (n < 2) return out;
    std::vector<char> disconnected(n, 0);
    parallel_for(n, [&](std::size_t s) {
        std::vector<int> dist(n);
        std::vector<NodeId> queue;
        queue.reserve(n);
        bfs(g, static_cast<NodeId>(s), dist, queue);
        if (queue.size() != n) {
            disconnected[s] = 1;
            return;
        }
        std::uint64_t total = 0;
        for (int d : dist) total += static_cast<std::uint64_t>(d);
        out.values[s] = static_cast<double>(n - 1) / static_cast<double>(total);
    });
    if (std::any_of(disconnected.begin(), disconnected.end(), [](char c) { return c != 0; })) {
        throw DisconnectedGraph("closeness centrality requires a connected graph");
    }
    return out;
}

CentralityVector harmonic_centrality(const Graph& g) {
    const NodeId n = g.num_nodes();
    CentralityVector out{CentralityKind::harmonic, std::vector<double>(n, 0.0)};
    parallel_for(n, [&](std::size_t s) {
        std::vector<int> dist(n);
        std::vector<NodeId> queue;
        queue.reserve(n);
        bfs(g, static_cast<NodeId>(s), dist, queue);
        double h = 0.0;
        for (NodeId v : queue) {
            if (v != s) h += 1.0 / dist[v];
        }
        out.values[s] = h;
    });
    return out;
}

CentralityVector betweenness_centrality(const Graph& g) {
    const NodeId n = g.num_nodes();
    constexpr std::size_t chunks = 64;
    std::vector<std::vector<double>> partial(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        std::vector<double> acc(n, 0.0);
        std::vector<int> dist(n);
        std::vector<double> sigma(n);
        std::vector<double> delta(n);
        std::vector<NodeId> order;
        order.reserve(n);
        for (NodeId s = static_cast<NodeId>(c); s < n; s += chunks) {
            std::fill(dist.begin(), dist.end(), -1);
            std::fill(sigma.begin(), sigma.end(), 0.0);
            std::fill(delta.begin(), delta.end(), 0.0);
            order.clear();
            dist[s] = 0;
            sigma[s] = 1.0;
            order.push_back(s);
            for (std::size_t head = 0; head < order.size(); ++head) {
                NodeId u = order[head];
                for (NodeId v : g.neighbors(u)) {
                    if (dist[v] < 0) {
                        dist[v] = dist[u] + 1;
                        order.push_back(v);
                    }
                    if (dist[v] == dist[u] + 1) sigma[v] += sigma[u];
                }
            }
            // Reverse BFS order visits every node after all its successors.
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                NodeId w = *it;
                for (NodeId v : g.neighbors(w)) {
                    if (dist[v] == dist[w] - 1) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
                if (w != s) acc[w] += delta[w];
            }
        }
        partial[c] = std::move(acc);
    });
    CentralityVector out{CentralityKind::betweenness, std::vector<double>(n, 0.0)};
    for (const auto& p : partial) {
        for (NodeId i = 0; i < n; ++i) out.values[i] += p[i];
    }
    // Every unordered pair was counted from both endpoints.
    for (double& v : out.values) v *= 0.5;
    return out;
}

CentralityVector degree_centrality(const Graph& g) {
    return {CentralityKind::degree, degree_vector(g)};
}

CentralityVector compute_centrality(const Graph& g, CentralityKind kind) {
    switch (kind) {
        case CentralityKind::degree: return degree_centrality(g);
        case CentralityKind::eigenvector: return eigenvector_centrality(g).centrality;
        case CentralityKind::closeness: return closeness_centrality(g);
        case CentralityKind::harmonic: return harmonic_centrality(g);
        case CentralityKind::betweenness: return betweenness_centrality(g);
    }
    throw InvalidParameter("unknown centrality kind");
}

RankVector normalize_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    RankVector out{std::vector<double>(n, 0.0)};
    if (n <= 1) return out;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const double scale = 1.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // Positions i..j (0-based) tie; their mean 0-based position is (i+j)/2.
        const double rank = 0.5 * static_cast<double>(i + j) * scale;
        for (std::size_t k = i; k <= j; ++k) out.values[order[k]] = rank;
        i = j + 1;
    }
    return out;
}

}  // namespace ncage
