#pragma once

#include <cstddef>
#include <vector>

#include "ncage/graph.hpp"
#include "ncage/params.hpp"
#include "ncage/tensor.hpp"

namespace ncage {

// Fully connected tanh network on (degree rank, eigenvector rank), both
// rescaled to [-1,1]; the output is the target rank in [-1,1].
struct BaselineShape {
    std::size_t inputs = 2;
    std::size_t hidden = 20;
    std::size_t hidden_layers = 4;
};

// Maps a rank in [0,1] to [-1,1] and back.
inline double rank_to_signed(double r) { return 2.0 * r - 1.0; }
inline double signed_to_rank(double y) { return 0.5 * (y + 1.0); }

// (N,2): column 0 degree rank, column 1 eigenvector rank, each as 2r-1.
// Propagates ConvergenceError / InvalidParameter from the power method.
Tensor baseline_features(const Graph& g);

// fc1..fcK (weight + bias) then out (weight + bias).
std::vector<ParamSpec> baseline_param_specs(const BaselineShape& shape = {});

// tanh on every hidden layer, linear output.
Tensor baseline_forward(const Tensor& x, const ParamSet& params);

}  // namespace ncage
