#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ncage/graph.hpp"
#include "ncage/params.hpp"
#include "ncage/tensor.hpp"

namespace ncage {

enum class EmbedderKind { gcn, s2v };

std::string to_string(EmbedderKind k);

struct EmbedderConfig {
    EmbedderKind kind = EmbedderKind::s2v;
    int layers = 2;
    int feature_dim = 1;
    int embed_dim = 128;

    void validate() const;
};

// Symmetric normalization D^-1/2 (A + I) D^-1/2 with D the row sums of A + I.
// Same sparsity as A + I.
SparseMatrix normalized_adjacency(const Graph& g);

// (N,1) normalized degree rank, the only node feature the embedders consume.
Tensor degree_rank_features(const Graph& g);
// (N,1) raw degree d_i = sum_j A_ij.
Tensor degree_column(const Graph& g);

// Per-graph operands shared by both embedders; built once per graph.
struct EmbeddingInput {
    std::shared_ptr<const SparseMatrix> adjacency;  // plain A (S2V) or normalized (GCN)
    Tensor features;                                // (N,C)
    Tensor degree;                                  // (N,1), S2V only
};

EmbeddingInput prepare_embedding_input(const Graph& g, EmbedderKind kind);

// H^{l+1} = relu(norm_adj * H^l * W^{l+1}), H^0 = features; one weight per layer,
// the first (C,F) and the rest (F,F).
Tensor gcn_forward(std::shared_ptr<const SparseMatrix> norm_adj, const Tensor& features,
                   std::span<const Tensor> layer_weights);

// Structure2Vec recursion on the plain adjacency:
//   base = degree * w_degree + features * w_feature
//   H^0 = relu(base);  H^{l+1} = relu(A * H^l * w_neighbor + base)
// applied `layers` times with the shared neighbor weight. w_degree is (1,F),
// w_neighbor (F,F), w_feature (C,F).
Tensor s2v_forward(std::shared_ptr<const SparseMatrix> adjacency, const Tensor& features,
                   const Tensor& degree, const Tensor& w_degree, const Tensor& w_neighbor,
                   const Tensor& w_feature, int layers);

// Common interface: (graph operands, weights) -> (N,F) node embeddings. Any
// embedder plugged in here works with the regression head unchanged.
class Embedder {
public:
    explicit Embedder(EmbedderConfig config) : config_(config) {}
    virtual ~Embedder() = default;

    const EmbedderConfig& config() const noexcept { return config_; }

    virtual std::vector<ParamSpec> param_specs() const = 0;
    virtual EmbeddingInput prepare(const Graph& g) const = 0;
    virtual Tensor embed(const EmbeddingInput& input, const ParamSet& params) const = 0;

private:
    EmbedderConfig config_;
};

class GcnEmbedder final : public Embedder {
public:
    explicit GcnEmbedder(EmbedderConfig config);
    std::vector<ParamSpec> param_specs() const override;
    EmbeddingInput prepare(const Graph& g) const override;
    Tensor embed(const EmbeddingInput& input, const ParamSet& params) const override;
};

class S2vEmbedder final : public Embedder {
public:
    explicit S2vEmbedder(EmbedderConfig config);
    std::vector<ParamSpec> param_specs() const override;
    EmbeddingInput prepare(const Graph& g) const override;
    Tensor embed(const EmbeddingInput& input, const ParamSet& params) const override;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config);

}  // namespace ncage
