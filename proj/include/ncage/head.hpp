#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ncage/centrality.hpp"
#include "ncage/params.hpp"
#include "ncage/tensor.hpp"

namespace ncage {

// Nodes of one graph processed together, with their target ranks.
struct Batch {
    std::size_t graph_index = 0;
    std::vector<NodeId> node_ids;
    std::vector<double> targets;
    CentralityKind kind = CentralityKind::closeness;
};

// Equivalent to the one-hot product I_D * H, done as a row gather.
inline Tensor select_rows(const Tensor& embeddings, std::span<const NodeId> node_ids) {
    return gather_rows(embeddings, node_ids);
}

// head.wf1..wf3 are (F,F); head.wf4 is (F,1) so each node gets one value.
std::vector<ParamSpec> head_param_specs(std::size_t embed_dim);

// relu(relu(relu(H_D Wf1) Wf2) Wf3) Wf4, no output activation.
Tensor head_forward(const Tensor& selected, const ParamSet& params);

// MSE(pred, targets) + lambda * sum of squares of weights.
Tensor training_loss(const Tensor& pred, const Tensor& targets, std::span<const Tensor> weights,
                     double lambda);

}  // namespace ncage
