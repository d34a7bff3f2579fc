#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncage/tensor.hpp"

namespace ncage {

struct ParamSpec {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    // Biases are zero-initialized and excluded from the L2 term.
    bool is_bias = false;
};

// Ordered collection of named trainable tensors. Order is part of the
// checkpoint contract and of the RNG consumption order at init.
class ParamSet {
public:
    void add(std::string name, Tensor value, bool is_bias = false);

    std::size_t size() const noexcept { return tensors_.size(); }
    bool contains(std::string_view name) const;
    const Tensor& get(std::string_view name) const;
    Tensor& get(std::string_view name);

    std::span<Tensor> tensors() noexcept { return tensors_; }
    std::span<const Tensor> tensors() const noexcept { return tensors_; }
    const std::vector<std::string>& names() const noexcept { return names_; }
    bool is_bias(std::size_t i) const { return is_bias_[i]; }

    // Every non-bias tensor, i.e. the operands of the L2 term.
    std::vector<Tensor> weights() const;
    std::vector<ParamSpec> specs() const;

    void zero_grad();

private:
    std::vector<std::string> names_;
    std::vector<Tensor> tensors_;
    std::vector<bool> is_bias_;
};

// Glorot-uniform weights, U(-b, b) with b = sqrt(6 / (rows + cols)), drawn in
// spec order from a generator seeded with seed. Biases start at zero.
ParamSet init_weights(std::span<const ParamSpec> specs, std::uint64_t seed);

inline double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

}  // namespace ncage
