#include "ncage/baseline.hpp"

#include "ncage/centrality.hpp"

namespace ncage {

Tensor baseline_features(const Graph& g) {
    const auto deg = normalize_ranks(degree_vector(g));
    const auto eig = normalize_ranks(eigenvector_centrality(g).centrality);
    const NodeId n = g.num_nodes();
    std::vector<double> data(static_cast<std::size_t>(n) * 2);
    for (NodeId i = 0; i < n; ++i) {
        data[2 * i] = rank_to_signed(deg.values[i]);
        data[2 * i + 1] = rank_to_signed(eig.values[i]);
    }
    return Tensor(n, 2, std::move(data));
}

std::vector<ParamSpec> baseline_param_specs(const BaselineShape& shape) {
    std::vector<ParamSpec> specs;
    std::size_t in = shape.inputs;
    for (std::size_t l = 1; l <= shape.hidden_layers; ++l) {
        const std::string prefix = "fc" + std::to_string(l);
        specs.push_back({prefix + ".weight", in, shape.hidden, false});
        specs.push_back({prefix + ".bias", 1, shape.hidden, true});
        in = shape.hidden;
    }
    specs.push_back({"out.weight", in, 1, false});
    specs.push_back({"out.bias", 1, 1, true});
    return specs;
}

Tensor baseline_forward(const Tensor& x, const ParamSet& params) {
    Tensor h = x;
    for (std::size_t l = 1;; ++l) {
        const std::string prefix = "fc" + std::to_string(l);
        if (!params.contains(prefix + ".weight")) break;
        h = tanh(add_row(matmul(h, params.get(prefix + ".weight")), params.get(prefix + ".bias")));
    }
    return add_row(matmul(h, params.get("out.weight")), params.get("out.bias"));
}

}  // namespace ncage
