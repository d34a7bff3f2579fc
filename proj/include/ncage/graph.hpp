#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ncage/errors.hpp"

namespace ncage {

using NodeId = std::uint32_t;

struct Edge {
    NodeId u;
    NodeId v;
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Undirected, unweighted graph in compressed sparse row form. Every edge is
// stored in both directions, neighbor lists are sorted, and there are no
// self-loops or duplicates. Immutable after construction.
class Graph {
public:
    Graph() : offsets_{0} {}

    // Builds a graph on n nodes. Self-loops are dropped and duplicate or
    // reversed pairs collapse into one edge. Throws InvalidParameter when an
    // endpoint is >= n.
    static Graph from_edges(NodeId n, std::span<const Edge> edges);

    NodeId num_nodes() const noexcept { return static_cast<NodeId>(offsets_.size() - 1); }
    std::size_t num_edges() const noexcept { return indices_.size() / 2; }

    std::span<const NodeId> neighbors(NodeId i) const {
        return {indices_.data() + offsets_[i], indices_.data() + offsets_[i + 1]};
    }
    std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
    bool has_edge(NodeId u, NodeId v) const;

    std::span<const std::size_t> offsets() const noexcept { return offsets_; }
    std::span<const NodeId> indices() const noexcept { return indices_; }

    // Canonical edge list: u < v, sorted lexicographically.
    std::vector<Edge> edges() const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> indices_;
};

enum class Topology { scale_free, small_world, random };

std::string to_string(Topology t);
Topology parse_topology(const std::string& s);

struct GeneratorSpec {
    Topology topology = Topology::scale_free;
    NodeId n = 100;
    NodeId m = 2;                   // scale-free: edges per new node
    NodeId k = 4;                   // small-world: ring degree (even)
    std::optional<double> p;        // small-world rewiring / random edge probability
    std::uint64_t seed = 0;

    // Effective probability: small-world default 0.1, random default 4/(n-1)
    // clamped to 1.
    double probability() const;
    void validate() const;
};

// Scale-free graphs come from preferential attachment over an initial m-clique
// and are always connected. Small-world and random outputs are reduced to
// their largest connected component, so the node count may be below spec.n.
Graph generate(const GeneratorSpec& spec);

// Number of edges the scale-free generator emits: C(m,2) + m(n-m).
std::size_t scale_free_edge_count(NodeId n, NodeId m);

std::vector<double> degree_vector(const Graph& g);

struct ComponentResult {
    Graph graph;
    std::vector<NodeId> original_ids;  // new id -> id in the input graph
};

// Induced subgraph on the largest connected component, ids relabeled in
// increasing order of their original id. Equal-size components are resolved
// in favor of the one containing the smallest node id.
ComponentResult largest_component_with_ids(const Graph& g);
Graph largest_component(const Graph& g);
bool is_connected(const Graph& g);

struct LoadedGraph {
    Graph graph;
    std::vector<std::uint64_t> original_ids;  // new id -> id in file
    std::size_t self_loops_dropped = 0;
    std::size_t duplicates_dropped = 0;
};

// Reads a SNAP-style edge list: one whitespace-separated "u v" pair per
// line, '#' starts a comment line. If a "# Nodes: N" header is present and
// every id is below N the ids are kept as-is (isolated nodes survive);
// otherwise ids are compacted to 0..N-1 in increasing order.
LoadedGraph load_edge_list(const std::filesystem::path& path);
LoadedGraph parse_edge_list(std::istream& in);

void save_edge_list(const Graph& g, const std::filesystem::path& path);
void write_edge_list(const Graph& g, std::ostream& out);

}  // namespace ncage
