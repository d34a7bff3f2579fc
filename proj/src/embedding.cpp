#include "ncage/embedding.hpp"

#include <cmath>

#include "ncage/centrality.hpp"

namespace ncage {

std::string to_string(EmbedderKind k) { return k == EmbedderKind::gcn ? "gcn" : "s2v"; }

void EmbedderConfig::validate() const {
    if (layers < 1) throw InvalidParameter("embedder: layers must be >= 1");
    if (feature_dim < 1) throw InvalidParameter("embedder: feature_dim must be >= 1");
    if (embed_dim < 1) throw InvalidParameter("embedder: embed_dim must be >= 1");
}

SparseMatrix normalized_adjacency(const Graph& g) {
    const NodeId n = g.num_nodes();
    std::vector<double> inv_sqrt(n);
    for (NodeId i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(i) + 1));

    std::vector<std::size_t> rp(static_cast<std::size_t>(n) + 1, 0);
    std::vector<NodeId> cols;
    std::vector<double> vals;
    cols.reserve(2 * g.num_edges() + n);
    vals.reserve(2 * g.num_edges() + n);
    for (NodeId i = 0; i < n; ++i) {
        bool diag_done = false;
        for (NodeId j : g.neighbors(i)) {
            if (!diag_done && j > i) {
                cols.push_back(i);
                vals.push_back(inv_sqrt[i] * inv_sqrt[i]);
                diag_done = true;
            }
            cols.push_back(j);
            vals.push_back(inv_sqrt[i] * inv_sqrt[j]);
        }
        if (!diag_done) {
            cols.push_back(i);
            vals.push_back(inv_sqrt[i] * inv_sqrt[i]);
        }
        rp[i + 1] = cols.size();
    }
    return SparseMatrix(n, std::move(rp), std::move(cols), std::move(vals));
}

Tensor degree_rank_features(const Graph& g) {
    auto ranks = normalize_ranks(degree_vector(g));
    return Tensor(g.num_nodes(), 1, std::move(ranks.values));
}

Tensor degree_column(const Graph& g) { return Tensor(g.num_nodes(), 1, degree_vector(g)); }

EmbeddingInput prepare_embedding_input(const Graph& g, EmbedderKind kind) {
    EmbeddingInput in;
    in.features = degree_rank_features(g);
    if (kind == EmbedderKind::gcn) {
        in.adjacency = std::make_shared<const SparseMatrix>(normalized_adjacency(g));
    } else {
        in.adjacency = std::make_shared<const SparseMatrix>(SparseMatrix::adjacency(g));
        in.degree = degree_column(g);
    }
    return in;
}

Tensor gcn_forward(std::shared_ptr<const SparseMatrix> norm_adj, const Tensor& features,
                   std::span<const Tensor> layer_weights) {
    if (layer_weights.empty()) throw ShapeMismatch("gcn_forward: no layer weights");
    Tensor h = features;
    for (const auto& w : layer_weights) h = relu(spmm(norm_adj, matmul(h, w)));
    return h;
}

Tensor s2v_forward(std::shared_ptr<const SparseMatrix> adjacency, const Tensor& features,
                   const Tensor& degree, const Tensor& w_degree, const Tensor& w_neighbor,
                   const Tensor& w_feature, int layers) {
    if (degree.cols() != 1) throw ShapeMismatch("s2v_forward: degree must be a column");
    const Tensor base = add(matmul(degree, w_degree), matmul(features, w_feature));
    Tensor h = relu(base);
    for (int l = 0; l < layers; ++l) h = relu(add(spmm(adjacency, matmul(h, w_neighbor)), base));
    return h;
}

namespace {

std::string gcn_name(int layer) { return "gcn.w" + std::to_string(layer); }

}  // namespace

GcnEmbedder::GcnEmbedder(EmbedderConfig config) : Embedder(config) { config.validate(); }

std::vector<ParamSpec> GcnEmbedder::param_specs() const {
    const auto& c = config();
    std::vector<ParamSpec> specs;
    for (int l = 1; l <= c.layers; ++l) {
        const auto rows = static_cast<std::size_t>(l == 1 ? c.feature_dim : c.embed_dim);
        specs.push_back({gcn_name(l), rows, static_cast<std::size_t>(c.embed_dim), false});
    }
    return specs;
}

EmbeddingInput GcnEmbedder::prepare(const Graph& g) const {
    return prepare_embedding_input(g, EmbedderKind::gcn);
}

Tensor GcnEmbedder::embed(const EmbeddingInput& input, const ParamSet& params) const {
    std::vector<Tensor> weights;
    for (int l = 1; l <= config().layers; ++l) weights.push_back(params.get(gcn_name(l)));
    return gcn_forward(input.adjacency, input.features, weights);
}

S2vEmbedder::S2vEmbedder(EmbedderConfig config) : Embedder(config) { config.validate(); }

std::vector<ParamSpec> S2vEmbedder::param_specs() const {
    const auto& c = config();
    const auto F = static_cast<std::size_t>(c.embed_dim);
    return {
        {"s2v.w1", 1, F, false},
        {"s2v.w2", F, F, false},
        {"s2v.w3", static_cast<std::size_t>(c.feature_dim), F, false},
    };
}

EmbeddingInput S2vEmbedder::prepare(const Graph& g) const {
    return prepare_embedding_input(g, EmbedderKind::s2v);
}

Tensor S2vEmbedder::embed(const EmbeddingInput& input, const ParamSet& params) const {
    return s2v_forward(input.adjacency, input.features, input.degree, params.get("s2v.w1"),
                       params.get("s2v.w2"), params.get("s2v.w3"), config().layers);
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config) {
    if (config.kind == EmbedderKind::gcn) return std::make_unique<GcnEmbedder>(config);
    return std::make_unique<S2vEmbedder>(config);
}

}  // namespace ncage
