#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ncage/centrality.hpp"
#include "ncage/parallel.hpp"
#include "oracles.hpp"

using namespace ncage;

namespace {

Graph path_graph(NodeId n) {
    std::vector<Edge> e;
    for (NodeId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
    return Graph::from_edges(n, e);
}

Graph star_graph(NodeId leaves) {
    std::vector<Edge> e;
    for (NodeId i = 1; i <= leaves; ++i) e.push_back({0, i});
    return Graph::from_edges(leaves + 1, e);
}

Graph cycle_graph(NodeId n) {
    std::vector<Edge> e;
    for (NodeId i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
    return Graph::from_edges(n, e);
}

}  // namespace

TEST(Betweenness, PathAndStar) {
    EXPECT_EQ(betweenness_centrality(path_graph(3)).values, (std::vector<double>{0, 1, 0}));
    EXPECT_EQ(betweenness_centrality(path_graph(5)).values, (std::vector<double>{0, 3, 4, 3, 0}));
    // Center of a star lies on every leaf-leaf path: C(4,2) = 6.
    EXPECT_EQ(betweenness_centrality(star_graph(4)).values, (std::vector<double>{6, 0, 0, 0, 0}));
}

TEST(Betweenness, SplitsCreditAcrossEqualPaths) {
    // Square: each opposite pair has two shortest paths.
    auto c4 = cycle_graph(4);
    for (double v : betweenness_centrality(c4).values) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(Betweenness, MatchesPathEnumerationOnSmallGraphs) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 200; ++i) {
        const NodeId n = std::uniform_int_distribution<NodeId>(2, 8)(rng);
        const double p = std::uniform_real_distribution<double>(0.0, 0.6)(rng);
        auto g = oracle::random_connected_graph(n, p, rng);
        auto fast = betweenness_centrality(g).values;
        auto slow = oracle::betweenness_by_path_enumeration(g);
        for (NodeId v = 0; v < n; ++v) ASSERT_NEAR(fast[v], slow[v], 1e-12) << "graph " << i << " node " << v;
    }
}

TEST(Betweenness, IndependentOfWorkerCount) {
    auto g = generate({Topology::scale_free, 400, 3, 4, std::nullopt, 5});
    const unsigned before = max_threads();
    set_max_threads(1);
    auto one = betweenness_centrality(g).values;
    set_max_threads(4);
    auto four = betweenness_centrality(g).values;
    set_max_threads(before);
    EXPECT_EQ(one, four);
}

TEST(Betweenness, DisconnectedPairsContributeNothing) {
    auto g = Graph::from_edges(5, std::vector<Edge>{{0, 1}, {1, 2}, {3, 4}});
    EXPECT_EQ(betweenness_centrality(g).values, (std::vector<double>{0, 1, 0, 0, 0}));
}

TEST(Closeness, HandExamples) {
    auto p3 = closeness_centrality(path_graph(3)).values;
    EXPECT_DOUBLE_EQ(p3[0], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(p3[1], 1.0);
    auto star = closeness_centrality(star_graph(4)).values;
    EXPECT_DOUBLE_EQ(star[0], 1.0);
    EXPECT_DOUBLE_EQ(star[1], 4.0 / 7.0);
}

TEST(Closeness, RejectsDisconnectedGraphs) {
    auto g = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {2, 3}});
    EXPECT_THROW(closeness_centrality(g), DisconnectedGraph);
}

TEST(ClosenessHarmonic, MatchAllPairsOracle) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 100; ++i) {
        const NodeId n = std::uniform_int_distribution<NodeId>(2, 64)(rng);
        const double p = std::uniform_real_distribution<double>(0.0, 0.15)(rng);
        auto g = oracle::random_connected_graph(n, p, rng);
        auto c = closeness_centrality(g).values;
        auto h = harmonic_centrality(g).values;
        auto co = oracle::closeness(g);
        auto ho = oracle::harmonic(g);
        for (NodeId v = 0; v < n; ++v) {
            ASSERT_NEAR(c[v], co[v], 1e-10);
            ASSERT_NEAR(h[v], ho[v], 1e-10);
        }
    }
}

TEST(Harmonic, DisconnectedGraphIsFinite) {
    auto g = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {1, 2}});
    auto h = harmonic_centrality(g).values;
    EXPECT_DOUBLE_EQ(h[0], 1.5);
    EXPECT_DOUBLE_EQ(h[1], 2.0);
    EXPECT_DOUBLE_EQ(h[3], 0.0);
}

TEST(Eigenvector, CycleIsUniform) {
    auto r = eigenvector_centrality(cycle_graph(4));
    for (double v : r.centrality.values) EXPECT_NEAR(v, 0.5, 1e-9);
    EXPECT_NEAR(r.eigenvalue, 2.0, 1e-8);
}

TEST(Eigenvector, StarMatchesAnalyticSolution) {
    // A x = 2 x with x = (2, 1, 1, 1, 1) / sqrt(8).
    auto r = eigenvector_centrality(star_graph(4));
    EXPECT_NEAR(r.centrality.values[0], 1.0 / std::sqrt(2.0), 1e-9);
    for (int i = 1; i <= 4; ++i) EXPECT_NEAR(r.centrality.values[i], 1.0 / (2.0 * std::sqrt(2.0)), 1e-9);
    EXPECT_NEAR(r.eigenvalue, 2.0, 1e-8);
}

TEST(Eigenvector, MatchesDenseEigensolver) {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 50; ++i) {
        const NodeId n = std::uniform_int_distribution<NodeId>(3, 120)(rng);
        const double p = std::uniform_real_distribution<double>(0.0, 0.1)(rng);
        auto g = oracle::random_connected_graph(n, p, rng);
        auto r = eigenvector_centrality(g);
        auto want = oracle::dominant_eigenvector(g);
        EXPECT_LT(oracle::cosine_distance(r.centrality.values, want), 1e-8) << "graph " << i;
        double norm = 0;
        for (double v : r.centrality.values) {
            EXPECT_GE(v, 0.0);
            norm += v * v;
        }
        EXPECT_NEAR(norm, 1.0, 1e-12);
    }
}

TEST(Eigenvector, DegenerateInputsThrow) {
    EXPECT_THROW(eigenvector_centrality(Graph::from_edges(1, {})), InvalidParameter);
    EXPECT_THROW(eigenvector_centrality(Graph::from_edges(3, {})), InvalidParameter);
    PowerMethodOptions tight;
    tight.max_iter = 1;
    EXPECT_THROW(eigenvector_centrality(generate({Topology::scale_free, 200, 2, 4, std::nullopt, 1}), tight),
                 ConvergenceError);
}

TEST(NormalizeRanks, AscendingWithMidRankTies) {
    auto r = normalize_ranks(std::vector<double>{0.3, 0.1, 0.3, 0.9}).values;
    // Sorted: 0.1 (r=1), 0.3 0.3 (r=2.5), 0.9 (r=4); (r-1)/3.
    EXPECT_EQ(r, (std::vector<double>{0.5, 0.0, 0.5, 1.0}));
    EXPECT_EQ(normalize_ranks(std::vector<double>{5.0}).values, (std::vector<double>{0.0}));
    EXPECT_EQ(normalize_ranks(std::vector<double>{2, 2, 2}).values, (std::vector<double>{0.5, 0.5, 0.5}));
}

TEST(NormalizeRanks, InvariantUnderMonotoneTransforms) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coarse(0, 20);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> x(50);
        for (auto& v : x) v = coarse(rng) * 0.25;
        std::vector<double> y(x.size()), z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            y[i] = std::exp(x[i]) + 3.0;
            z[i] = x[i] * x[i] * x[i] - 7.0;
        }
        auto rx = normalize_ranks(x).values;
        EXPECT_EQ(rx, normalize_ranks(y).values);
        EXPECT_EQ(rx, normalize_ranks(z).values);
        for (double r : rx) {
            EXPECT_GE(r, 0.0);
            EXPECT_LE(r, 1.0);
        }
    }
}

TEST(ComputeCentrality, DispatchesByKind) {
    auto g = star_graph(3);
    EXPECT_EQ(compute_centrality(g, CentralityKind::degree).values, (std::vector<double>{3, 1, 1, 1}));
    EXPECT_EQ(compute_centrality(g, CentralityKind::betweenness).kind, CentralityKind::betweenness);
    EXPECT_EQ(parse_centrality(to_string(CentralityKind::harmonic)), CentralityKind::harmonic);
    EXPECT_THROW(parse_centrality("pagerank"), InvalidParameter);
}
