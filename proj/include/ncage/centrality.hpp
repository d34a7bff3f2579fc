#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ncage/graph.hpp"

namespace ncage {

enum class CentralityKind { degree, eigenvector, closeness, harmonic, betweenness };

std::string to_string(CentralityKind k);
CentralityKind parse_centrality(const std::string& s);

struct CentralityVector {
    CentralityKind kind = CentralityKind::degree;
    std::vector<double> values;
};

// Normalized ranks in [0,1], ascending with the centrality value.
struct RankVector {
    std::vector<double> values;
};

struct PowerMethodOptions {
    double tol = 1e-10;
    int max_iter = 1000;
};

struct EigenvectorResult {
    CentralityVector centrality;
    int iterations = 0;
    double eigenvalue = 0.0;
};

// Dominant eigenvector of the adjacency matrix by power iteration on A + I
// (same eigenvectors, but the shift keeps bipartite graphs from
// oscillating). Starts from all-ones, renormalizes to unit L2 norm every
// iteration and stops when successive iterates differ by < tol in max-norm.
// Throws ConvergenceError after max_iter iterations and InvalidParameter on
// graphs with fewer than two nodes or no edges.
EigenvectorResult eigenvector_centrality(const Graph& g, PowerMethodOptions opts = {});

// (N-1) / sum of BFS distances. Throws DisconnectedGraph when some node is
// unreachable.
CentralityVector closeness_centrality(const Graph& g);

// Sum of inverse BFS distances; unreachable pairs contribute zero.
CentralityVector harmonic_centrality(const Graph& g);

// Brandes dependency accumulation over unordered pairs {s,t}. Sources are
// processed in a fixed number of chunks whose partial sums are reduced in
// chunk order, so the result is bit-identical for any worker count.
CentralityVector betweenness_centrality(const Graph& g);

CentralityVector degree_centrality(const Graph& g);

// Dispatches to the oracle for kind.
CentralityVector compute_centrality(const Graph& g, CentralityKind kind);

// Ascending mid-ranks: sort by value, ties share the average of their
// 1-based positions r, and each rank maps to (r-1)/(N-1). N=1 yields [0].
RankVector normalize_ranks(const std::vector<double>& values);
inline RankVector normalize_ranks(const CentralityVector& c) { return normalize_ranks(c.values); }

}  // namespace ncage
