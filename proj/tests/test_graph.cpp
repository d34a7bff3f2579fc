#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ncage/graph.hpp"

using namespace ncage;

namespace {

Graph from_pairs(NodeId n, std::initializer_list<Edge> edges) {
    std::vector<Edge> e(edges);
    return Graph::from_edges(n, e);
}

void expect_well_formed(const Graph& g) {
    const NodeId n = g.num_nodes();
    std::size_t ends = 0;
    for (NodeId u = 0; u < n; ++u) {
        auto nb = g.neighbors(u);
        ends += nb.size();
        for (std::size_t i = 0; i < nb.size(); ++i) {
            ASSERT_LT(nb[i], n);
            ASSERT_NE(nb[i], u) << "self-loop at " << u;
            if (i > 0) ASSERT_LT(nb[i - 1], nb[i]) << "unsorted or duplicate neighbor at " << u;
            ASSERT_TRUE(g.has_edge(nb[i], u)) << "asymmetric edge " << u << "-" << nb[i];
        }
    }
    ASSERT_EQ(ends, 2 * g.num_edges());
}

}  // namespace

TEST(Graph, FromEdgesDropsSelfLoopsAndDuplicates) {
    auto g = from_pairs(3, {{0, 1}, {1, 0}, {1, 1}, {1, 2}, {0, 1}});
    EXPECT_EQ(g.num_nodes(), 3u);
    EXPECT_EQ(g.num_edges(), 2u);
    EXPECT_TRUE(g.has_edge(0, 1));
    EXPECT_TRUE(g.has_edge(2, 1));
    EXPECT_FALSE(g.has_edge(0, 2));
    expect_well_formed(g);
}

TEST(Graph, FromEdgesRejectsOutOfRangeEndpoint) {
    EXPECT_THROW(from_pairs(2, {{0, 2}}), InvalidParameter);
}

TEST(Graph, EdgesAreCanonical) {
    auto g = from_pairs(4, {{3, 0}, {2, 1}, {1, 0}});
    std::vector<Edge> want{{0, 1}, {0, 3}, {1, 2}};
    EXPECT_EQ(g.edges(), want);
}

TEST(Graph, DegreeVector) {
    auto star = from_pairs(4, {{0, 1}, {0, 2}, {0, 3}});
    EXPECT_EQ(degree_vector(star), (std::vector<double>{3, 1, 1, 1}));
    EXPECT_EQ(degree_vector(Graph::from_edges(5, {})), std::vector<double>(5, 0.0));
    auto tri = from_pairs(3, {{0, 1}, {1, 2}, {0, 2}});
    EXPECT_EQ(degree_vector(tri), (std::vector<double>{2, 2, 2}));
}

TEST(Generators, ScaleFreeEdgeCountMatchesClosedForm) {
    GeneratorSpec spec{Topology::scale_free, 100, 2, 4, std::nullopt, 7};
    auto g = generate(spec);
    EXPECT_EQ(g.num_nodes(), 100u);
    EXPECT_EQ(g.num_edges(), scale_free_edge_count(100, 2));
    EXPECT_EQ(g.num_edges(), 197u);
    for (NodeId m : {1u, 3u, 5u}) {
        spec.m = m;
        EXPECT_EQ(generate(spec).num_edges(), scale_free_edge_count(100, m)) << "m=" << m;
    }
}

TEST(Generators, ScaleFreeMinimumDegreeAndConnectivity) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        for (NodeId m : {1u, 2u, 4u}) {
            GeneratorSpec spec{Topology::scale_free, 120, m, 4, std::nullopt, seed};
            auto g = generate(spec);
            ASSERT_TRUE(is_connected(g));
            for (NodeId v = m; v < g.num_nodes(); ++v) ASSERT_GE(g.degree(v), m) << "seed " << seed;
        }
    }
}

TEST(Generators, RandomWithCertainEdgeIsSingleEdge) {
    GeneratorSpec spec{Topology::random, 2, 2, 4, 1.0, 3};
    auto g = generate(spec);
    EXPECT_EQ(g.num_nodes(), 2u);
    EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}}));
}

TEST(Generators, SmallWorldWithoutRewiringIsRingLattice) {
    GeneratorSpec spec{Topology::small_world, 10, 2, 4, 0.0, 11};
    auto g = generate(spec);
    ASSERT_EQ(g.num_nodes(), 10u);
    for (NodeId v = 0; v < 10; ++v) {
        EXPECT_EQ(g.degree(v), 4u);
        EXPECT_TRUE(g.has_edge(v, (v + 1) % 10));
        EXPECT_TRUE(g.has_edge(v, (v + 2) % 10));
    }
}

TEST(Generators, RandomAverageDegreeNearFour) {
    double total = 0;
    const int runs = 40;
    for (int s = 0; s < runs; ++s) {
        GeneratorSpec spec{Topology::random, 2000, 2, 4, std::nullopt, static_cast<std::uint64_t>(s)};
        // Before reduction the expected degree is exactly 4; the largest
        // component of G(n, 4/n) holds ~98% of nodes with slightly higher degree.
        auto g = generate(spec);
        total += 2.0 * g.num_edges() / g.num_nodes();
    }
    EXPECT_NEAR(total / runs, 4.0, 0.15);
}

TEST(Generators, InvariantsOverManySeeds) {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        GeneratorSpec spec;
        spec.topology = static_cast<Topology>(i % 3);
        spec.n = std::uniform_int_distribution<NodeId>(5, 80)(rng);
        spec.m = std::uniform_int_distribution<NodeId>(1, 3)(rng);
        spec.k = 2 * std::uniform_int_distribution<NodeId>(1, 2)(rng);
        spec.seed = rng();
        auto g = generate(spec);
        ASSERT_NO_FATAL_FAILURE(expect_well_formed(g)) << "seed " << spec.seed;
        ASSERT_TRUE(is_connected(g)) << "seed " << spec.seed;
        ASSERT_LE(g.num_nodes(), spec.n);
    }
}

TEST(Generators, DeterministicForFixedSeed) {
    for (auto t : {Topology::scale_free, Topology::small_world, Topology::random}) {
        GeneratorSpec spec{t, 300, 2, 4, std::nullopt, 99};
        EXPECT_EQ(generate(spec), generate(spec)) << to_string(t);
        auto other = spec;
        other.seed = 100;
        EXPECT_NE(generate(spec), generate(other)) << to_string(t);
    }
}

TEST(Generators, InvalidSpecsThrow) {
    EXPECT_THROW(generate({Topology::scale_free, 2, 2, 4, std::nullopt, 0}), InvalidParameter);
    EXPECT_THROW(generate({Topology::scale_free, 10, 0, 4, std::nullopt, 0}), InvalidParameter);
    EXPECT_THROW(generate({Topology::small_world, 10, 2, 3, std::nullopt, 0}), InvalidParameter);
    EXPECT_THROW(generate({Topology::random, 10, 2, 4, 1.5, 0}), InvalidParameter);
}

TEST(Components, LargestComponent) {
    auto tri = from_pairs(3, {{0, 1}, {1, 2}, {0, 2}});
    EXPECT_EQ(largest_component(tri), tri);

    auto with_isolated = from_pairs(4, {{1, 2}, {2, 3}, {1, 3}});
    auto r = largest_component_with_ids(with_isolated);
    EXPECT_EQ(r.graph, tri);
    EXPECT_EQ(r.original_ids, (std::vector<NodeId>{1, 2, 3}));

    auto two_edges = from_pairs(4, {{2, 3}, {0, 1}});
    auto t = largest_component_with_ids(two_edges);
    EXPECT_EQ(t.original_ids, (std::vector<NodeId>{0, 1}));
    EXPECT_FALSE(is_connected(two_edges));
}

TEST(EdgeList, ParsesPathGraph) {
    std::istringstream in("0 1\n1 2");
    auto r = parse_edge_list(in);
    EXPECT_EQ(r.graph.num_nodes(), 3u);
    EXPECT_EQ(r.graph.edges(), (std::vector<Edge>{{0, 1}, {1, 2}}));
}

TEST(EdgeList, CommentsAndReversedDuplicates) {
    std::istringstream in("# c\n0 1\n1 0\n");
    auto r = parse_edge_list(in);
    EXPECT_EQ(r.graph.num_edges(), 1u);
    EXPECT_EQ(r.duplicates_dropped, 1u);
}

TEST(EdgeList, SelfLoopsCountedAndDropped) {
    std::istringstream in("0 0\n0 1\r\n2\t1\n");
    auto r = parse_edge_list(in);
    EXPECT_EQ(r.self_loops_dropped, 1u);
    EXPECT_EQ(r.graph.num_edges(), 2u);
}

TEST(EdgeList, SparseIdsAreCompactedInOrder) {
    std::istringstream in("100 7\n7 42\n");
    auto r = parse_edge_list(in);
    EXPECT_EQ(r.original_ids, (std::vector<std::uint64_t>{7, 42, 100}));
    EXPECT_TRUE(r.graph.has_edge(0, 2));
    EXPECT_TRUE(r.graph.has_edge(0, 1));
}

TEST(EdgeList, ParseErrorsCarryLineNumbers) {
    {
        std::istringstream in("0 1\n1 x\n");
        try {
            parse_edge_list(in);
            FAIL() << "expected ParseError";
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), 2u);
        }
    }
    {
        std::istringstream in("# h\n0 1\n\n1 2 3\n");
        try {
            parse_edge_list(in);
            FAIL() << "expected ParseError";
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), 4u);
        }
    }
    std::istringstream negative("0 -1\n");
    EXPECT_THROW(parse_edge_list(negative), ParseError);
}

TEST(EdgeList, RoundTripIsIdentity) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) {
        GeneratorSpec spec{static_cast<Topology>(i % 3), 60, 2, 4, std::nullopt, rng()};
        auto g = generate(spec);
        std::stringstream buf;
        write_edge_list(g, buf);
        auto back = parse_edge_list(buf);
        EXPECT_EQ(back.graph, g);
    }
    // Isolated nodes survive through the node-count header.
    auto lonely = from_pairs(5, {{0, 1}, {3, 1}});
    std::stringstream buf;
    write_edge_list(lonely, buf);
    EXPECT_EQ(parse_edge_list(buf).graph, lonely);
}

TEST(EdgeList, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "ncage_graph_roundtrip.txt";
    auto g = generate({Topology::scale_free, 50, 3, 4, std::nullopt, 1});
    save_edge_list(g, path);
    EXPECT_EQ(load_edge_list(path).graph, g);
    std::filesystem::remove(path);
    EXPECT_ANY_THROW(load_edge_list(path));
}

// Table II: facebook_combined.txt has 4,039 nodes and 88,234 edges. Runs
// only when NCAGE_SNAP_FACEBOOK points at the downloaded file.
TEST(EdgeList, SnapFacebookCounts) {
    const char* path = std::getenv("NCAGE_SNAP_FACEBOOK");
    if (!path || !*path) GTEST_SKIP() << "set NCAGE_SNAP_FACEBOOK to facebook_combined.txt";
    auto r = load_edge_list(path);
    EXPECT_EQ(r.graph.num_nodes(), 4039u);
    EXPECT_EQ(r.graph.num_edges(), 88234u);
}
