#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "ncage/model.hpp"
#include "oracles.hpp"

using namespace ncage;

namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Mat to_eigen(const Tensor& t) {
    return Eigen::Map<const Mat>(t.data().data(), static_cast<Eigen::Index>(t.rows()),
                                 static_cast<Eigen::Index>(t.cols()));
}

Mat dense_adjacency(const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    Mat a = Mat::Zero(n, n);
    for (NodeId i = 0; i < g.num_nodes(); ++i)
        for (NodeId j : g.neighbors(i)) a(i, j) = 1.0;
    return a;
}

Mat relu(const Mat& m) { return m.cwiseMax(0.0); }

Graph permuted(const Graph& g, const std::vector<NodeId>& perm) {
    std::vector<Edge> e;
    for (auto [u, v] : g.edges()) e.push_back({perm[u], perm[v]});
    return Graph::from_edges(g.num_nodes(), e);
}

ModelConfig small_config(ModelKind kind, int embed_dim, int layers = 2) {
    ModelConfig c;
    c.kind = kind;
    c.embed_dim = embed_dim;
    c.layers = layers;
    if (kind == ModelKind::baseline) {
        c.feature_dim = 2;
        c.baseline_hidden = embed_dim;
    }
    return c;
}

using Shape = std::pair<std::size_t, std::size_t>;
Shape shape(const ParamSpec& s) { return {s.rows, s.cols}; }
Shape shape(std::size_t r, std::size_t c) { return {r, c}; }

}  // namespace

TEST(Embedding, NormalizedAdjacencyMatchesDenseFormula) {
    auto g = generate({Topology::scale_free, 25, 2, 4, std::nullopt, 3});
    auto s = normalized_adjacency(g);
    Mat a = dense_adjacency(g) + Mat::Identity(25, 25);
    Eigen::VectorXd d = a.rowwise().sum();
    Mat want = d.cwiseInverse().cwiseSqrt().asDiagonal() * a * d.cwiseInverse().cwiseSqrt().asDiagonal();
    Mat got = Eigen::Map<const Mat>(s.to_dense().data(), 25, 25);
    EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(s.nnz(), 2 * g.num_edges() + 25);
}

TEST(Embedding, DegreeFeatures) {
    auto g = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}});
    auto f = degree_rank_features(g);
    ASSERT_EQ(f.rows(), 4u);
    ASSERT_EQ(f.cols(), 1u);
    EXPECT_EQ(f(0, 0), 1.0);
    EXPECT_EQ(f(1, 0), 1.0 / 3.0);
    auto d = degree_column(g);
    EXPECT_EQ(d(0, 0), 3.0);
    EXPECT_EQ(d(3, 0), 1.0);
}

TEST(Embedding, ParameterShapes) {
    auto s2v = model_param_specs(small_config(ModelKind::s2v, 8));
    ASSERT_EQ(s2v.size(), 7u);
    EXPECT_EQ(s2v[0].name, "s2v.w1");
    EXPECT_EQ(shape(s2v[0]), shape(1, 8));
    EXPECT_EQ(shape(s2v[1]), shape(8, 8));
    EXPECT_EQ(shape(s2v[2]), shape(1, 8));
    EXPECT_EQ(s2v[6].name, "head.wf4");
    EXPECT_EQ(shape(s2v[6]), shape(8, 1));

    auto gcn = model_param_specs(small_config(ModelKind::gcn, 8, 3));
    ASSERT_EQ(gcn.size(), 7u);
    EXPECT_EQ(shape(gcn[0]), shape(1, 8));
    EXPECT_EQ(gcn[2].name, "gcn.w3");

    auto base = model_param_specs(small_config(ModelKind::baseline, 20));
    ASSERT_EQ(base.size(), 10u);
    EXPECT_EQ(shape(base[0]), shape(2, 20));
    EXPECT_TRUE(base[1].is_bias);
    EXPECT_EQ(base[9].name, "out.bias");
}

TEST(Embedding, ConfigValidation) {
    auto c = small_config(ModelKind::s2v, 8);
    c.feature_dim = 2;
    EXPECT_THROW(c.validate(), InvalidParameter);
    auto b = small_config(ModelKind::baseline, 20);
    b.feature_dim = 1;
    EXPECT_THROW(b.validate(), InvalidParameter);
    auto z = small_config(ModelKind::gcn, 0);
    EXPECT_THROW(z.validate(), InvalidParameter);
}

TEST(Embedding, GlorotInitialization) {
    auto specs = model_param_specs(small_config(ModelKind::baseline, 20));
    auto params = init_weights(specs, 9);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& t = params.tensors()[i];
        const double bound = glorot_bound(specs[i].rows, specs[i].cols);
        for (double v : t.data()) {
            if (specs[i].is_bias) {
                EXPECT_EQ(v, 0.0);
            } else {
                EXPECT_LE(std::abs(v), bound);
            }
        }
    }
    auto again = init_weights(specs, 9);
    auto other = init_weights(specs, 10);
    EXPECT_TRUE(std::ranges::equal(params.tensors()[0].data(), again.tensors()[0].data()));
    EXPECT_FALSE(std::ranges::equal(params.tensors()[0].data(), other.tensors()[0].data()));
}

TEST(Embedding, S2vForwardMatchesDenseRecursion) {
    auto g = generate({Topology::scale_free, 20, 2, 4, std::nullopt, 8});
    Model model(small_config(ModelKind::s2v, 6), 4);
    auto in = model.prepare(g);
    const auto& p = model.params();
    Mat a = dense_adjacency(g);
    Mat d = a.rowwise().sum();
    Mat f = to_eigen(degree_rank_features(g));
    Mat base = d * to_eigen(p.get("s2v.w1")) + f * to_eigen(p.get("s2v.w3"));
    Mat h = relu(base);
    for (int l = 0; l < 2; ++l) h = relu(a * h * to_eigen(p.get("s2v.w2")) + base);
    Mat y = relu(h * to_eigen(p.get("head.wf1")));
    y = relu(y * to_eigen(p.get("head.wf2")));
    y = relu(y * to_eigen(p.get("head.wf3")));
    y = y * to_eigen(p.get("head.wf4"));

    Mat got = to_eigen(model.forward_all(in));
    EXPECT_LT((got - y).cwiseAbs().maxCoeff(), 1e-11 * (1.0 + y.cwiseAbs().maxCoeff()));
}

TEST(Embedding, GcnForwardMatchesDenseRecursion) {
    auto g = generate({Topology::small_world, 20, 2, 4, std::nullopt, 8});
    Model model(small_config(ModelKind::gcn, 6), 4);
    auto in = model.prepare(g);
    const auto& p = model.params();
    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    Mat at = dense_adjacency(g) + Mat::Identity(n, n);
    Eigen::VectorXd dinv = at.rowwise().sum().cwiseInverse().cwiseSqrt();
    Mat norm = dinv.asDiagonal() * at * dinv.asDiagonal();
    Mat h = to_eigen(degree_rank_features(g));
    h = relu(norm * h * to_eigen(p.get("gcn.w1")));
    h = relu(norm * h * to_eigen(p.get("gcn.w2")));
    Mat y = relu(h * to_eigen(p.get("head.wf1")));
    y = relu(y * to_eigen(p.get("head.wf2")));
    y = relu(y * to_eigen(p.get("head.wf3")));
    y = y * to_eigen(p.get("head.wf4"));
    Mat got = to_eigen(model.forward_all(in));
    EXPECT_LT((got - y).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Embedding, BaselineForwardMatchesDenseNetwork) {
    auto g = generate({Topology::scale_free, 30, 2, 4, std::nullopt, 2});
    Model model(small_config(ModelKind::baseline, 20), 5);
    auto in = model.prepare(g);
    const auto& p = model.params();
    Mat h = to_eigen(in.baseline_input);
    for (int l = 1; l <= 4; ++l) {
        const std::string pre = "fc" + std::to_string(l);
        h = ((h * to_eigen(p.get(pre + ".weight"))).rowwise() +
             to_eigen(p.get(pre + ".bias")).row(0))
                .array()
                .tanh()
                .matrix();
    }
    Mat y = (h * to_eigen(p.get("out.weight"))).array() + p.get("out.bias").data()[0];
    Mat got = to_eigen(model.forward_all(in));
    EXPECT_LT((got - y).cwiseAbs().maxCoeff(), 1e-13);
    // predict maps the [-1,1] output back to the rank scale.
    auto pred = model.predict(in);
    EXPECT_NEAR(pred[3], 0.5 * (y(3, 0) + 1.0), 1e-13);
}

TEST(Embedding, BaselineFeaturesAreSignedRanks) {
    auto g = generate({Topology::scale_free, 40, 2, 4, std::nullopt, 6});
    auto x = baseline_features(g);
    ASSERT_EQ(x.cols(), 2u);
    auto deg = normalize_ranks(degree_vector(g));
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
        EXPECT_DOUBLE_EQ(x(i, 0), 2 * deg.values[i] - 1);
        EXPECT_GE(x(i, 1), -1.0);
        EXPECT_LE(x(i, 1), 1.0);
    }
}

TEST(Embedding, HeadSelectionEqualsFullForwardRows) {
    auto g = generate({Topology::scale_free, 15, 2, 4, std::nullopt, 1});
    for (auto kind : {ModelKind::s2v, ModelKind::gcn, ModelKind::baseline}) {
        Model model(small_config(kind, 5), 2);
        auto in = model.prepare(g);
        auto all = model.forward_all(in);
        std::vector<NodeId> ids{14, 2, 2, 7};
        auto some = model.forward(in, ids);
        for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(some(i, 0), all(ids[i], 0));
    }
}

TEST(Embedding, PermutationEquivariance) {
    std::mt19937_64 rng(12);
    for (auto kind : {ModelKind::s2v, ModelKind::gcn, ModelKind::baseline}) {
        for (int trial = 0; trial < 5; ++trial) {
            auto g = generate({Topology::scale_free, 40, 2, 4, std::nullopt, rng()});
            std::vector<NodeId> perm(g.num_nodes());
            std::iota(perm.begin(), perm.end(), 0u);
            std::shuffle(perm.begin(), perm.end(), rng);
            Model model(small_config(kind, 8), 7);
            auto y = model.predict(model.prepare(g));
            auto yp = model.predict(model.prepare(permuted(g, perm)));
            double scale = 1.0;
            for (double v : y) scale = std::max(scale, std::abs(v));
            // Neighbor sums run in a different order after relabeling.
            for (NodeId v = 0; v < g.num_nodes(); ++v) ASSERT_NEAR(yp[perm[v]], y[v], 1e-12 * scale);
        }
    }
}

TEST(Embedding, ModelRejectsMismatchedParameters) {
    auto cfg = small_config(ModelKind::s2v, 8);
    auto wrong = init_weights(model_param_specs(small_config(ModelKind::s2v, 6)), 1);
    EXPECT_THROW(Model(cfg, wrong), ShapeMismatch);
    auto gcn = init_weights(model_param_specs(small_config(ModelKind::gcn, 8)), 1);
    EXPECT_THROW(Model(cfg, gcn), ShapeMismatch);
}

TEST(Embedding, TrainingLossWithoutRegularizationIsMse) {
    Tensor p(2, 1, std::vector<double>{0.5, 1.0});
    Tensor t(2, 1, std::vector<double>{0.0, 1.0});
    std::vector<Tensor> w{Tensor(1, 1, std::vector<double>{10.0})};
    EXPECT_DOUBLE_EQ(training_loss(p, t, w, 0.0).item(), 0.125);
    EXPECT_DOUBLE_EQ(training_loss(p, t, w, 0.1).item(), 0.125 + 10.0);
}

// Every model kind, end to end (embedder or MLP, head, loss with L2), on
// random tiny graphs and widths.
TEST(Gradients, EndToEndFiniteDifferences) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const NodeId n = std::uniform_int_distribution<NodeId>(3, 6)(rng);
        const int f = std::uniform_int_distribution<int>(2, 8)(rng);
        const int layers = std::uniform_int_distribution<int>(1, 3)(rng);
        auto g = oracle::random_connected_graph(n, 0.4, rng);
        for (auto kind : {ModelKind::s2v, ModelKind::gcn, ModelKind::baseline}) {
            Model model(small_config(kind, f, layers), rng());
            auto in = model.prepare(g);
            std::vector<NodeId> ids;
            std::vector<double> targets;
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (NodeId v = 0; v < n; ++v) {
                if (u(rng) < 0.7) {
                    ids.push_back(v);
                    targets.push_back(u(rng));
                }
            }
            if (ids.empty()) ids.push_back(0), targets.push_back(0.5);
            Tensor t(ids.size(), 1, targets);
            const double lambda = 0.05;
            auto loss = [&] { return training_loss(model.forward(in, ids), t, model.params().weights(), lambda); };
            auto check = oracle::finite_difference_check(loss, model.params().tensors());
            EXPECT_LT(check.max_rel_error, 1e-4) << to_string(kind) << " trial " << trial << " n=" << n
                                                 << " f=" << f;
        }
    }
}
