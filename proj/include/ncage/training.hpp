#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ncage/centrality.hpp"
#include "ncage/graph.hpp"
#include "ncage/model.hpp"
#include "ncage/tensor.hpp"

namespace ncage {

// Training hyperparameters. A "step" is one node fed through the model;
// the learning rate decays once per batch.
struct TrainConfig {
    ModelConfig model;
    CentralityKind centrality = CentralityKind::closeness;

    std::size_t n_graphs = 1000;
    NodeId min_nodes = 100;
    NodeId max_nodes = 1000;
    NodeId ba_m = 2;

    std::uint64_t total_steps = 4'000'000;
    std::size_t batch_size = 128;
    double learning_rate = 0.001;
    double decay = 0.999;
    double min_learning_rate = 0.0001;
    double lambda = 0.1;

    std::uint64_t seed = 1;       // weights and batch order
    std::uint64_t data_seed = 1;  // training graphs

    std::filesystem::path checkpoint_path;
    std::uint64_t checkpoint_interval = 50'000;

    // Table I values for the given model kind.
    static TrainConfig defaults_for(ModelKind kind);

    void validate() const;

    // Every field as key=value, in a fixed order. Round-trips through set().
    std::vector<std::pair<std::string, std::string>> to_pairs() const;
    // Sets one field from text; throws InvalidParameter on unknown keys or
    // malformed values.
    void set(const std::string& key, const std::string& value);
    static bool is_known_key(const std::string& key);
};

struct TrainingGraph {
    Graph graph;
    RankVector targets;
    PreparedGraph input;  // degree-rank features and adjacency (or baseline inputs)
};

using TrainingSet = std::vector<TrainingGraph>;

// n_graphs scale-free graphs with node counts uniform in
// [min_nodes, max_nodes]; exact target ranks and model inputs are computed
// once here, fanned out across worker threads. Graph i depends only on
// (data_seed, i).
TrainingSet build_training_set(const TrainConfig& config);

// Targets and model inputs for caller-supplied graphs, which must be
// connected when the centrality needs finite distances.
TrainingSet prepare_training_set(const TrainConfig& config, std::vector<Graph> graphs);

// Position in the graph/node visiting schedule plus counters. Graphs are
// reshuffled every epoch and nodes within each graph as it is visited.
struct TrainProgress {
    std::uint64_t steps = 0;
    std::uint64_t batches = 0;
    std::uint64_t epoch = 0;
    double learning_rate = 0.0;
    std::vector<std::uint32_t> graph_order;
    std::uint64_t graph_cursor = 0;
    std::uint32_t current_graph = 0;
    std::vector<NodeId> node_order;
    std::uint64_t node_cursor = 0;
    std::mt19937_64 rng;
};

struct Checkpoint {
    static constexpr std::uint32_t format_version = 1;

    TrainConfig config;
    ParamSet params;
    AdamState adam;
    TrainProgress progress;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
void write_checkpoint(const Checkpoint& ckpt, std::ostream& out);
// Throws CheckpointError on bad magic, version, truncation or trailing data,
// and ShapeMismatch when the weights disagree with the stored config.
Checkpoint load_checkpoint(const std::filesystem::path& path);
Checkpoint read_checkpoint(std::istream& in);

// Model wrapping the checkpoint's parameters, checked against config.
Model model_from_checkpoint(const Checkpoint& ckpt);

class Trainer {
public:
    Trainer(const TrainConfig& config, std::shared_ptr<const TrainingSet> data);
    // Resumes from ckpt. The model section of config must match the
    // checkpoint's weights (ShapeMismatch otherwise); total_steps and
    // checkpoint settings are taken from config.
    Trainer(const Checkpoint& ckpt, const TrainConfig& config,
            std::shared_ptr<const TrainingSet> data);

    bool done() const noexcept { return progress_.steps >= config_.total_steps; }

    // One batch: forward, loss, backward, clip, Adam, learning-rate decay.
    // Returns the total loss. Throws NonFiniteLoss.
    double step();

    // Runs until total_steps, writing periodic checkpoints when a path is
    // configured. on_batch is called after every batch.
    void run(const std::function<void(const Trainer&, double loss)>& on_batch = {});

    Checkpoint checkpoint() const;

    const TrainConfig& config() const noexcept { return config_; }
    const Model& model() const noexcept { return model_; }
    const TrainProgress& progress() const noexcept { return progress_; }
    const std::vector<double>& loss_trace() const noexcept { return losses_; }

private:
    void next_batch(std::vector<NodeId>& ids);

    TrainConfig config_;
    std::shared_ptr<const TrainingSet> data_;
    Model model_;
    AdamState adam_;
    TrainProgress progress_;
    std::vector<double> losses_;
};

// Builds the training set and runs a fresh Trainer to completion.
Checkpoint train(const TrainConfig& config);

}  // namespace ncage
