#include "ncage/params.hpp"

#include <algorithm>
#include <random>
#include <utility>

namespace ncage {

void ParamSet::add(std::string name, Tensor value, bool is_bias) {
    if (contains(name)) throw InvalidParameter("duplicate parameter name: " + name);
    names_.push_back(std::move(name));
    tensors_.push_back(std::move(value));
    is_bias_.push_back(is_bias);
}

bool ParamSet::contains(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const Tensor& ParamSet::get(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw InvalidParameter("unknown parameter: " + std::string(name));
    return tensors_[static_cast<std::size_t>(it - names_.begin())];
}

Tensor& ParamSet::get(std::string_view name) {
    return const_cast<Tensor&>(std::as_const(*this).get(name));
}

std::vector<Tensor> ParamSet::weights() const {
    std::vector<Tensor> out;
    for (std::size_t i = 0; i < tensors_.size(); ++i) {
        if (!is_bias_[i]) out.push_back(tensors_[i]);
    }
    return out;
}

std::vector<ParamSpec> ParamSet::specs() const {
    std::vector<ParamSpec> out;
    for (std::size_t i = 0; i < tensors_.size(); ++i) {
        out.push_back({names_[i], tensors_[i].rows(), tensors_[i].cols(), is_bias_[i]});
    }
    return out;
}

void ParamSet::zero_grad() {
    for (auto& t : tensors_) t.zero_grad();
}

ParamSet init_weights(std::span<const ParamSpec> specs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ParamSet out;
    for (const auto& s : specs) {
        std::vector<double> data(s.rows * s.cols, 0.0);
        if (!s.is_bias) {
            const double b = glorot_bound(s.rows, s.cols);
            std::uniform_real_distribution<double> dist(-b, b);
            for (double& x : data) x = dist(rng);
        }
        out.add(s.name, Tensor::parameter(s.rows, s.cols, std::move(data)), s.is_bias);
    }
    return out;
}

}  // namespace ncage
