#include "ncage/model.hpp"

#include <numeric>

namespace ncage {

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::gcn: return "gcn";
        case ModelKind::s2v: return "s2v";
        case ModelKind::baseline: return "baseline";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& s) {
    if (s == "gcn") return ModelKind::gcn;
    if (s == "s2v" || s == "s2vec" || s == "structure2vec") return ModelKind::s2v;
    if (s == "baseline") return ModelKind::baseline;
    throw InvalidParameter("unknown model kind: " + s);
}

void ModelConfig::validate() const {
    if (kind == ModelKind::baseline) {
        if (feature_dim != 2) throw InvalidParameter("baseline model takes C=2 input features");
        if (baseline_hidden < 1 || baseline_hidden_layers < 1) {
            throw InvalidParameter("baseline model needs at least one hidden layer");
        }
        return;
    }
    embedder().validate();
    if (feature_dim != 1) {
        throw InvalidParameter("NCA-GE models use the degree rank as their only feature (C=1)");
    }
}

EmbedderConfig ModelConfig::embedder() const {
    return {kind == ModelKind::gcn ? EmbedderKind::gcn : EmbedderKind::s2v, layers, feature_dim,
            embed_dim};
}

std::vector<ParamSpec> model_param_specs(const ModelConfig& config) {
    config.validate();
    if (config.kind == ModelKind::baseline) {
        return baseline_param_specs({static_cast<std::size_t>(config.feature_dim),
                                     static_cast<std::size_t>(config.baseline_hidden),
                                     static_cast<std::size_t>(config.baseline_hidden_layers)});
    }
    auto specs = make_embedder(config.embedder())->param_specs();
    auto head = head_param_specs(static_cast<std::size_t>(config.embed_dim));
    specs.insert(specs.end(), head.begin(), head.end());
    return specs;
}

Model::Model(const ModelConfig& config, std::uint64_t seed)
    : Model(config, init_weights(model_param_specs(config), seed)) {}

Model::Model(const ModelConfig& config, ParamSet params) : config_(config), params_(std::move(params)) {
    const auto expected = model_param_specs(config_);
    const auto actual = params_.specs();
    if (expected.size() != actual.size()) {
        throw ShapeMismatch("model expects " + std::to_string(expected.size()) + " parameters, got " +
                            std::to_string(actual.size()));
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const auto& e = expected[i];
        const auto& a = actual[i];
        if (e.name != a.name || e.rows != a.rows || e.cols != a.cols || e.is_bias != a.is_bias) {
            throw ShapeMismatch("parameter " + std::to_string(i) + ": expected " + e.name + " (" +
                                std::to_string(e.rows) + "," + std::to_string(e.cols) + "), got " +
                                a.name + " (" + std::to_string(a.rows) + "," + std::to_string(a.cols) +
                                ")");
        }
    }
    if (config_.kind != ModelKind::baseline) embedder_ = make_embedder(config_.embedder());
}

std::vector<ParamSpec> Model::expected_specs() const { return model_param_specs(config_); }

PreparedGraph Model::prepare(const Graph& g) const {
    PreparedGraph p;
    p.num_nodes = g.num_nodes();
    if (embedder_) {
        p.embedding = embedder_->prepare(g);
    } else {
        p.baseline_input = baseline_features(g);
    }
    return p;
}

Tensor Model::forward(const PreparedGraph& input, std::span<const NodeId> node_ids) const {
    if (!embedder_) return baseline_forward(gather_rows(input.baseline_input, node_ids), params_);
    const Tensor h = embedder_->embed(input.embedding, params_);
    return head_forward(select_rows(h, node_ids), params_);
}

Tensor Model::forward_all(const PreparedGraph& input) const {
    if (!embedder_) return baseline_forward(input.baseline_input, params_);
    return head_forward(embedder_->embed(input.embedding, params_), params_);
}

std::vector<double> Model::predict(const PreparedGraph& input) const {
    NoGradGuard no_grad;
    const Tensor y = forward_all(input);
    std::vector<double> out(y.data().begin(), y.data().end());
    if (!embedder_) {
        for (double& v : out) v = signed_to_rank(v);
    }
    return out;
}

double Model::encode_target(double rank) const {
    return embedder_ ? rank : rank_to_signed(rank);
}

}  // namespace ncage
