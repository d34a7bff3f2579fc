#include "ncage/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

namespace ncage {

Graph Graph::from_edges(NodeId n, std::span<const Edge> edges) {
    std::vector<Edge> directed;
    directed.reserve(edges.size() * 2);
    for (const auto& e : edges) {
        if (e.u >= n || e.v >= n) {
            throw InvalidParameter("edge endpoint out of range: " + std::to_string(e.u) + " " +
                                   std::to_string(e.v) + " with n=" + std::to_string(n));
        }
        if (e.u == e.v) continue;
        directed.push_back({e.u, e.v});
        directed.push_back({e.v, e.u});
    }
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

    Graph g;
    g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    g.indices_.reserve(directed.size());
    for (const auto& e : directed) {
        ++g.offsets_[e.u + 1];
        g.indices_.push_back(e.v);
    }
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (NodeId u = 0; u < num_nodes(); ++u) {
        for (NodeId v : neighbors(u)) {
            if (u < v) out.push_back({u, v});
        }
    }
    return out;
}

std::string to_string(Topology t) {
    switch (t) {
        case Topology::scale_free: return "sf";
        case Topology::small_world: return "sw";
        case Topology::random: return "rnd";
    }
    return "?";
}

Topology parse_topology(const std::string& s) {
    if (s == "sf" || s == "scale-free" || s == "ba") return Topology::scale_free;
    if (s == "sw" || s == "small-world" || s == "ws") return Topology::small_world;
    if (s == "rnd" || s == "random" || s == "er") return Topology::random;
    throw InvalidParameter("unknown topology: " + s);
}

double GeneratorSpec::probability() const {
    if (p) return *p;
    switch (topology) {
        case Topology::small_world: return 0.1;
        case Topology::random: return n > 1 ? std::min(1.0, 4.0 / (n - 1.0)) : 1.0;
        case Topology::scale_free: return 0.0;
    }
    return 0.0;
}

void GeneratorSpec::validate() const {
    if (n < 2) throw InvalidParameter("generator: n must be >= 2");
    switch (topology) {
        case Topology::scale_free:
            if (m < 1) throw InvalidParameter("generator: m must be >= 1");
            if (m >= n) throw InvalidParameter("generator: m must be < n");
            break;
        case Topology::small_world:
            if (k < 2 || k % 2 != 0) throw InvalidParameter("generator: k must be even and >= 2");
            if (k >= n) throw InvalidParameter("generator: k must be < n");
            break;
        case Topology::random: break;
    }
    double prob = probability();
    if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidParameter("generator: p must lie in [0,1]");
}

std::size_t scale_free_edge_count(NodeId n, NodeId m) {
    return static_cast<std::size_t>(m) * (m - 1) / 2 + static_cast<std::size_t>(m) * (n - m);
}

namespace {

Graph barabasi_albert(NodeId n, NodeId m, std::mt19937_64& rng) {
    std::vector<Edge> edges;
    edges.reserve(scale_free_edge_count(n, m));
    // Each node appears once per incident edge end, so a uniform draw from
    // this list is a degree-proportional draw.
    std::vector<NodeId> ends;
    for (NodeId u = 0; u < m; ++u) {
        for (NodeId v = u + 1; v < m; ++v) {
            edges.push_back({u, v});
            ends.push_back(u);
            ends.push_back(v);
        }
    }
    if (m == 1) ends.push_back(0);

    std::vector<NodeId> targets;
    for (NodeId node = m; node < n; ++node) {
        targets.clear();
        std::uniform_int_distribution<std::size_t> pick(0, ends.size() - 1);
        while (targets.size() < m) {
            NodeId t = ends[pick(rng)];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
        }
        if (m == 1 && node == 1) ends.clear();
        for (NodeId t : targets) {
            edges.push_back({t, node});
            ends.push_back(t);
            ends.push_back(node);
        }
    }
    return Graph::from_edges(n, edges);
}

Graph watts_strogatz(NodeId n, NodeId k, double p, std::mt19937_64& rng) {
    std::vector<std::set<NodeId>> adj(n);
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId j = 1; j <= k / 2; ++j) {
            NodeId v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<NodeId> pick(0, n - 1);
    for (NodeId j = 1; j <= k / 2; ++j) {
        for (NodeId u = 0; u < n; ++u) {
            if (coin(rng) >= p) continue;
            NodeId v = (u + j) % n;
            if (!adj[u].contains(v)) continue;
            if (adj[u].size() >= n - 1) continue;
            NodeId w = pick(rng);
            while (w == u || adj[u].contains(w)) w = pick(rng);
            adj[u].erase(v);
            adj[v].erase(u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v : adj[u]) {
            if (u < v) edges.push_back({u, v});
        }
    }
    return Graph::from_edges(n, edges);
}

// G(n,p) with geometric skipping over the lower-triangular pair sequence.
Graph erdos_renyi(NodeId n, double p, std::mt19937_64& rng) {
    std::vector<Edge> edges;
    if (p >= 1.0) {
        for (NodeId v = 1; v < n; ++v)
            for (NodeId w = 0; w < v; ++w) edges.push_back({w, v});
        return Graph::from_edges(n, edges);
    }
    if (p <= 0.0) return Graph::from_edges(n, edges);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double log_q = std::log(1.0 - p);
    std::int64_t v = 1;
    std::int64_t w = -1;
    while (v < n) {
        double r = unif(rng);
        w += 1 + static_cast<std::int64_t>(std::floor(std::log(1.0 - r) / log_q));
        while (w >= v && v < n) {
            w -= v;
            ++v;
        }
        if (v < n) edges.push_back({static_cast<NodeId>(w), static_cast<NodeId>(v)});
    }
    return Graph::from_edges(n, edges);
}

}  // namespace

Graph generate(const GeneratorSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    switch (spec.topology) {
        case Topology::scale_free: return barabasi_albert(spec.n, spec.m, rng);
        case Topology::small_world:
            return largest_component(watts_strogatz(spec.n, spec.k, spec.probability(), rng));
        case Topology::random:
            return largest_component(erdos_renyi(spec.n, spec.probability(), rng));
    }
    throw InvalidParameter("unknown topology");
}

std::vector<double> degree_vector(const Graph& g) {
    std::vector<double> d(g.num_nodes());
    for (NodeId i = 0; i < g.num_nodes(); ++i) d[i] = static_cast<double>(g.degree(i));
    return d;
}

namespace {

// Component label per node; labels are assigned in order of smallest member.
std::vector<NodeId> component_labels(const Graph& g, std::vector<std::size_t>& sizes) {
    constexpr NodeId unseen = std::numeric_limits<NodeId>::max();
    std::vector<NodeId> label(g.num_nodes(), unseen);
    std::vector<NodeId> stack;
    sizes.clear();
    for (NodeId s = 0; s < g.num_nodes(); ++s) {
        if (label[s] != unseen) continue;
        NodeId c = static_cast<NodeId>(sizes.size());
        sizes.push_back(0);
        label[s] = c;
        stack.push_back(s);
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            ++sizes[c];
            for (NodeId v : g.neighbors(u)) {
                if (label[v] == unseen) {
                    label[v] = c;
                    stack.push_back(v);
                }
            }
        }
    }
    return label;
}

}  // namespace

ComponentResult largest_component_with_ids(const Graph& g) {
    std::vector<std::size_t> sizes;
    auto label = component_labels(g, sizes);
    ComponentResult out;
    if (sizes.size() <= 1) {
        out.graph = g;
        out.original_ids.resize(g.num_nodes());
        for (NodeId i = 0; i < g.num_nodes(); ++i) out.original_ids[i] = i;
        return out;
    }
    // max_element returns the first maximum, i.e. the lowest label.
    auto best = static_cast<NodeId>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::vector<NodeId> new_id(g.num_nodes(), std::numeric_limits<NodeId>::max());
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
        if (label[i] == best) {
            new_id[i] = static_cast<NodeId>(out.original_ids.size());
            out.original_ids.push_back(i);
        }
    }
    std::vector<Edge> edges;
    for (const auto& e : g.edges()) {
        if (label[e.u] == best) edges.push_back({new_id[e.u], new_id[e.v]});
    }
    out.graph = Graph::from_edges(static_cast<NodeId>(out.original_ids.size()), edges);
    return out;
}

Graph largest_component(const Graph& g) { return largest_component_with_ids(g).graph; }

bool is_connected(const Graph& g) {
    std::vector<std::size_t> sizes;
    component_labels(g, sizes);
    return sizes.size() <= 1;
}

namespace {

std::optional<std::uint64_t> parse_nodes_header(const std::string& line) {
    auto pos = line.find("Nodes:");
    if (pos == std::string::npos) return std::nullopt;
    std::istringstream ss(line.substr(pos + 6));
    std::uint64_t n = 0;
    if (ss >> n) return n;
    return std::nullopt;
}

std::uint64_t parse_id(std::string_view tok, std::size_t line_no) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError(line_no, "non-integer token '" + std::string(tok) + "'");
    }
    return value;
}

}  // namespace

LoadedGraph parse_edge_list(std::istream& in) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
    std::optional<std::uint64_t> declared_nodes;
    std::string line;
    std::size_t line_no = 0;
    LoadedGraph out;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            if (!declared_nodes) declared_nodes = parse_nodes_header(line);
            continue;
        }
        std::vector<std::string_view> tokens;
        std::string_view rest(line);
        while (true) {
            auto b = rest.find_first_not_of(" \t");
            if (b == std::string_view::npos) break;
            auto e = rest.find_first_of(" \t", b);
            tokens.push_back(rest.substr(b, e == std::string_view::npos ? e : e - b));
            if (e == std::string_view::npos) break;
            rest = rest.substr(e);
        }
        if (tokens.size() != 2) {
            throw ParseError(line_no, "expected 2 node ids, found " + std::to_string(tokens.size()));
        }
        auto u = parse_id(tokens[0], line_no);
        auto v = parse_id(tokens[1], line_no);
        if (u == v) {
            ++out.self_loops_dropped;
            continue;
        }
        raw.emplace_back(u, v);
    }

    std::uint64_t max_id = 0;
    for (auto [u, v] : raw) max_id = std::max({max_id, u, v});

    std::vector<Edge> edges;
    edges.reserve(raw.size());
    NodeId n = 0;
    if (declared_nodes && (raw.empty() || max_id < *declared_nodes)) {
        if (*declared_nodes > std::numeric_limits<NodeId>::max()) {
            throw ParseError(line_no, "node count exceeds 32-bit id range");
        }
        n = static_cast<NodeId>(*declared_nodes);
        out.original_ids.resize(n);
        for (NodeId i = 0; i < n; ++i) out.original_ids[i] = i;
        for (auto [u, v] : raw) edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    } else {
        std::vector<std::uint64_t> ids;
        ids.reserve(raw.size() * 2);
        for (auto [u, v] : raw) {
            ids.push_back(u);
            ids.push_back(v);
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        if (ids.size() > std::numeric_limits<NodeId>::max()) {
            throw ParseError(line_no, "node count exceeds 32-bit id range");
        }
        auto relabel = [&](std::uint64_t id) {
            return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
        };
        for (auto [u, v] : raw) edges.push_back({relabel(u), relabel(v)});
        n = static_cast<NodeId>(ids.size());
        out.original_ids = std::move(ids);
    }
    out.graph = Graph::from_edges(n, edges);
    out.duplicates_dropped = raw.size() - out.graph.num_edges();
    if (out.self_loops_dropped > 0) {
        spdlog::warn("edge list: dropped {} self-loop(s)", out.self_loops_dropped);
    }
    return out;
}

LoadedGraph load_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list: " + path.string());
    return parse_edge_list(in);
}

void write_edge_list(const Graph& g, std::ostream& out) {
    out << "# Undirected graph\n";
    out << "# Nodes: " << g.num_nodes() << " Edges: " << g.num_edges() << "\n";
    for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

void save_edge_list(const Graph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write edge list: " + path.string());
    write_edge_list(g, out);
    if (!out) throw std::runtime_error("error writing edge list: " + path.string());
}

}  // namespace ncage
