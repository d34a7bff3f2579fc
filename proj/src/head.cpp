#include "ncage/head.hpp"

namespace ncage {

std::vector<ParamSpec> head_param_specs(std::size_t embed_dim) {
    return {
        {"head.wf1", embed_dim, embed_dim, false},
        {"head.wf2", embed_dim, embed_dim, false},
        {"head.wf3", embed_dim, embed_dim, false},
        {"head.wf4", embed_dim, 1, false},
    };
}

Tensor head_forward(const Tensor& selected, const ParamSet& params) {
    Tensor h = relu(matmul(selected, params.get("head.wf1")));
    h = relu(matmul(h, params.get("head.wf2")));
    h = relu(matmul(h, params.get("head.wf3")));
    return matmul(h, params.get("head.wf4"));
}

Tensor training_loss(const Tensor& pred, const Tensor& targets, std::span<const Tensor> weights,
                     double lambda) {
    Tensor loss = mse_loss(pred, targets);
    if (lambda == 0.0) return loss;
    return add(loss, scale(l2_regularization(weights), lambda));
}

}  // namespace ncage
