#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ncage/baseline.hpp"
#include "ncage/embedding.hpp"
#include "ncage/head.hpp"
#include "ncage/params.hpp"

namespace ncage {

enum class ModelKind { gcn, s2v, baseline };

std::string to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

struct ModelConfig {
    ModelKind kind = ModelKind::s2v;
    int layers = 2;        // embedding iterations (NCA-GE only)
    int feature_dim = 1;   // C
    int embed_dim = 128;   // F
    int baseline_hidden = 20;
    int baseline_hidden_layers = 4;

    void validate() const;
    EmbedderConfig embedder() const;
};

// Everything a forward pass needs from one graph. Building it is the
// "feature preparation" cost: degree ranks plus the sparse adjacency for
// NCA-GE, degree and eigenvector ranks for the baseline.
struct PreparedGraph {
    NodeId num_nodes = 0;
    EmbeddingInput embedding;
    Tensor baseline_input;
};

// NCA-GE (embedder + regression head) or the baseline MLP behind one surface.
class Model {
public:
    // Fresh Glorot-initialized parameters.
    Model(const ModelConfig& config, std::uint64_t seed);
    // Adopts params; throws ShapeMismatch unless names and shapes match the
    // config exactly.
    Model(const ModelConfig& config, ParamSet params);

    const ModelConfig& config() const noexcept { return config_; }
    ParamSet& params() noexcept { return params_; }
    const ParamSet& params() const noexcept { return params_; }

    std::vector<ParamSpec> expected_specs() const;

    PreparedGraph prepare(const Graph& g) const;

    // (B,1) raw outputs for the given nodes.
    Tensor forward(const PreparedGraph& input, std::span<const NodeId> node_ids) const;
    // (N,1) raw outputs for every node, no selection step.
    Tensor forward_all(const PreparedGraph& input) const;

    // Raw outputs mapped to the [0,1] rank scale (unclamped).
    std::vector<double> predict(const PreparedGraph& input) const;

    // Training target for a normalized rank: identity for NCA-GE, 2r-1 for
    // the baseline.
    double encode_target(double rank) const;

private:
    ModelConfig config_;
    std::shared_ptr<const Embedder> embedder_;
    ParamSet params_;
};

std::vector<ParamSpec> model_param_specs(const ModelConfig& config);

}  // namespace ncage
