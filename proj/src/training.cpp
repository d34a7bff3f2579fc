#include "ncage/training.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "ncage/parallel.hpp"

namespace ncage {

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

// --- config -----------------------------------------------------------------

TrainConfig TrainConfig::defaults_for(ModelKind kind) {
    TrainConfig c;
    c.model.kind = kind;
    switch (kind) {
        case ModelKind::gcn:
            c.lambda = 0.01;
            break;
        case ModelKind::s2v:
            c.lambda = 0.1;
            break;
        case ModelKind::baseline:
            c.model.feature_dim = 2;
            c.learning_rate = 0.01;
            c.lambda = 0.001;
            c.total_steps = 1'000'000;
            break;
    }
    return c;
}

void TrainConfig::validate() const {
    model.validate();
    if (n_graphs < 1) throw InvalidParameter("n_graphs must be >= 1");
    if (min_nodes < 2 || min_nodes > max_nodes) {
        throw InvalidParameter("node range must satisfy 2 <= min_nodes <= max_nodes");
    }
    if (ba_m < 1 || ba_m >= min_nodes) throw InvalidParameter("ba_m must satisfy 1 <= m < min_nodes");
    if (total_steps < 1) throw InvalidParameter("total_steps must be >= 1");
    if (batch_size < 1) throw InvalidParameter("batch_size must be >= 1");
    if (!(min_learning_rate > 0.0 && min_learning_rate <= learning_rate)) {
        throw InvalidParameter("learning rates must satisfy 0 < min_learning_rate <= learning_rate");
    }
    if (!(decay > 0.0 && decay <= 1.0)) throw InvalidParameter("decay must lie in (0, 1]");
    if (!(lambda >= 0.0)) throw InvalidParameter("lambda must be >= 0");
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw InvalidParameter("config key '" + key + "': cannot parse '" + value + "'");
    }
    return out;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "model",          "centrality",     "layers",          "feature_dim",
        "embed_dim",      "baseline_hidden", "baseline_hidden_layers",
        "n_graphs",       "min_nodes",      "max_nodes",       "ba_m",
        "total_steps",    "batch_size",     "learning_rate",   "decay",
        "min_learning_rate", "lambda",      "seed",            "data_seed",
        "checkpoint_path", "checkpoint_interval",
    };
    return keys;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> TrainConfig::to_pairs() const {
    return {
        {"model", to_string(model.kind)},
        {"centrality", to_string(centrality)},
        {"layers", std::to_string(model.layers)},
        {"feature_dim", std::to_string(model.feature_dim)},
        {"embed_dim", std::to_string(model.embed_dim)},
        {"baseline_hidden", std::to_string(model.baseline_hidden)},
        {"baseline_hidden_layers", std::to_string(model.baseline_hidden_layers)},
        {"n_graphs", std::to_string(n_graphs)},
        {"min_nodes", std::to_string(min_nodes)},
        {"max_nodes", std::to_string(max_nodes)},
        {"ba_m", std::to_string(ba_m)},
        {"total_steps", std::to_string(total_steps)},
        {"batch_size", std::to_string(batch_size)},
        {"learning_rate", fmt_double(learning_rate)},
        {"decay", fmt_double(decay)},
        {"min_learning_rate", fmt_double(min_learning_rate)},
        {"lambda", fmt_double(lambda)},
        {"seed", std::to_string(seed)},
        {"data_seed", std::to_string(data_seed)},
        {"checkpoint_path", checkpoint_path.string()},
        {"checkpoint_interval", std::to_string(checkpoint_interval)},
    };
}

bool TrainConfig::is_known_key(const std::string& key) {
    const auto& keys = config_keys();
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

void TrainConfig::set(const std::string& key, const std::string& value) {
    if (key == "model") model.kind = parse_model_kind(value);
    else if (key == "centrality") centrality = parse_centrality(value);
    else if (key == "layers") model.layers = parse_number<int>(key, value);
    else if (key == "feature_dim") model.feature_dim = parse_number<int>(key, value);
    else if (key == "embed_dim") model.embed_dim = parse_number<int>(key, value);
    else if (key == "baseline_hidden") model.baseline_hidden = parse_number<int>(key, value);
    else if (key == "baseline_hidden_layers") model.baseline_hidden_layers = parse_number<int>(key, value);
    else if (key == "n_graphs") n_graphs = parse_number<std::size_t>(key, value);
    else if (key == "min_nodes") min_nodes = parse_number<NodeId>(key, value);
    else if (key == "max_nodes") max_nodes = parse_number<NodeId>(key, value);
    else if (key == "ba_m") ba_m = parse_number<NodeId>(key, value);
    else if (key == "total_steps") total_steps = parse_number<std::uint64_t>(key, value);
    else if (key == "batch_size") batch_size = parse_number<std::size_t>(key, value);
    else if (key == "learning_rate") learning_rate = parse_number<double>(key, value);
    else if (key == "decay") decay = parse_number<double>(key, value);
    else if (key == "min_learning_rate") min_learning_rate = parse_number<double>(key, value);
    else if (key == "lambda") lambda = parse_number<double>(key, value);
    else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
    else if (key == "data_seed") data_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "checkpoint_path") checkpoint_path = value;
    else if (key == "checkpoint_interval") checkpoint_interval = parse_number<std::uint64_t>(key, value);
    else throw InvalidParameter("unknown config key: " + key);
}

// --- dataset ----------------------------------------------------------------

TrainingSet build_training_set(const TrainConfig& config) {
    config.validate();
    std::vector<Graph> graphs(config.n_graphs);
    parallel_for(config.n_graphs, [&](std::size_t i) {
        std::seed_seq seq{config.data_seed, static_cast<std::uint64_t>(i)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<NodeId> size(config.min_nodes, config.max_nodes);
        GeneratorSpec spec;
        spec.topology = Topology::scale_free;
        spec.n = size(rng);
        spec.m = config.ba_m;
        spec.seed = rng();
        graphs[i] = generate(spec);
    });
    return prepare_training_set(config, std::move(graphs));
}

TrainingSet prepare_training_set(const TrainConfig& config, std::vector<Graph> graphs) {
    config.model.validate();
    const Model shape_only(config.model, std::uint64_t{0});
    TrainingSet set(graphs.size());
    parallel_for(graphs.size(), [&](std::size_t i) {
        auto& tg = set[i];
        tg.graph = std::move(graphs[i]);
        tg.targets = normalize_ranks(compute_centrality(tg.graph, config.centrality));
        tg.input = shape_only.prepare(tg.graph);
    });
    return set;
}

// --- trainer ----------------------------------------------------------------

Trainer::Trainer(const TrainConfig& config, std::shared_ptr<const TrainingSet> data)
    : config_(config), data_(std::move(data)), model_(config.model, config.seed) {
    config_.validate();
    if (!data_ || data_->empty()) throw InvalidParameter("trainer: empty training set");
    adam_.reset(model_.params().tensors());
    progress_.learning_rate = config_.learning_rate;
    std::seed_seq seq{config_.seed, std::uint64_t{0x5eed}};
    progress_.rng.seed(seq);
}

Trainer::Trainer(const Checkpoint& ckpt, const TrainConfig& config,
                 std::shared_ptr<const TrainingSet> data)
    : config_(config),
      data_(std::move(data)),
      model_(config.model, ckpt.params),
      adam_(ckpt.adam),
      progress_(ckpt.progress) {
    config_.validate();
    if (!data_ || data_->empty()) throw InvalidParameter("trainer: empty training set");
    if (progress_.graph_order.size() > data_->size() ||
        std::any_of(progress_.graph_order.begin(), progress_.graph_order.end(),
                    [&](std::uint32_t g) { return g >= data_->size(); })) {
        throw CheckpointError("checkpoint schedule does not fit the training set");
    }
}

void Trainer::next_batch(std::vector<NodeId>& ids) {
    auto& p = progress_;
    if (p.node_cursor >= p.node_order.size()) {
        if (p.graph_cursor >= p.graph_order.size()) {
            p.graph_order.resize(data_->size());
            std::iota(p.graph_order.begin(), p.graph_order.end(), 0u);
            std::shuffle(p.graph_order.begin(), p.graph_order.end(), p.rng);
            p.graph_cursor = 0;
            ++p.epoch;
        }
        p.current_graph = p.graph_order[p.graph_cursor++];
        p.node_order.resize((*data_)[p.current_graph].graph.num_nodes());
        std::iota(p.node_order.begin(), p.node_order.end(), 0u);
        std::shuffle(p.node_order.begin(), p.node_order.end(), p.rng);
        p.node_cursor = 0;
    }
    const std::uint64_t remaining_graph = p.node_order.size() - p.node_cursor;
    const std::uint64_t remaining_steps = config_.total_steps - p.steps;
    const auto take = static_cast<std::size_t>(
        std::min<std::uint64_t>({config_.batch_size, remaining_graph, remaining_steps}));
    ids.assign(p.node_order.begin() + static_cast<std::ptrdiff_t>(p.node_cursor),
               p.node_order.begin() + static_cast<std::ptrdiff_t>(p.node_cursor + take));
    p.node_cursor += take;
}

double Trainer::step() {
    std::vector<NodeId> ids;
    next_batch(ids);
    const auto& tg = (*data_)[progress_.current_graph];

    std::vector<double> target(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) target[i] = model_.encode_target(tg.targets.values[ids[i]]);
    const Tensor targets(ids.size(), 1, std::move(target));

    auto& params = model_.params();
    const Tensor pred = model_.forward(tg.input, ids);
    const auto weights = params.weights();
    Tensor loss = training_loss(pred, targets, weights, config_.lambda);
    const double value = loss.item();
    if (!std::isfinite(value)) {
        throw NonFiniteLoss("non-finite loss at step " + std::to_string(progress_.steps) +
                            " (batch " + std::to_string(progress_.batches) + ", graph " +
                            std::to_string(progress_.current_graph) + ", lr " +
                            std::to_string(progress_.learning_rate) + ")");
    }
    loss.backward();
    clip_gradients(params.tensors());
    adam_step(params.tensors(), adam_, progress_.learning_rate);
    params.zero_grad();

    progress_.learning_rate =
        std::max(progress_.learning_rate * config_.decay, config_.min_learning_rate);
    progress_.steps += ids.size();
    ++progress_.batches;
    losses_.push_back(value);
    return value;
}

void Trainer::run(const std::function<void(const Trainer&, double)>& on_batch) {
    const bool saving = !config_.checkpoint_path.empty() && config_.checkpoint_interval > 0;
    std::uint64_t bucket = saving ? progress_.steps / config_.checkpoint_interval : 0;
    while (!done()) {
        const double loss = step();
        if (on_batch) on_batch(*this, loss);
        if (saving && progress_.steps / config_.checkpoint_interval != bucket) {
            bucket = progress_.steps / config_.checkpoint_interval;
            save_checkpoint(checkpoint(), config_.checkpoint_path);
        }
    }
    if (saving) save_checkpoint(checkpoint(), config_.checkpoint_path);
}

Checkpoint Trainer::checkpoint() const {
    Checkpoint c;
    c.config = config_;
    for (std::size_t i = 0; i < model_.params().size(); ++i) {
        const auto& t = model_.params().tensors()[i];
        c.params.add(model_.params().names()[i],
                     Tensor::parameter(t.rows(), t.cols(), {t.data().begin(), t.data().end()}),
                     model_.params().is_bias(i));
    }
    c.adam = adam_;
    c.progress = progress_;
    return c;
}

Checkpoint train(const TrainConfig& config) {
    auto data = std::make_shared<const TrainingSet>(build_training_set(config));
    Trainer trainer(config, data);
    trainer.run();
    return trainer.checkpoint();
}

Model model_from_checkpoint(const Checkpoint& ckpt) { return Model(ckpt.config.model, ckpt.params); }

// --- checkpoint I/O -----------------------------------------------------------
//
// Layout (all integers little-endian, reals IEEE-754 binary64):
//   magic "NCAGECKP" | u32 version | u8 model kind | u8 centrality | u16 0
//   u32 len, config text (key=value lines)
//   u32 count, then per parameter: str name, u8 is_bias, u64 rows, u64 cols, f64[rows*cols]
//   f64 beta1, f64 beta2, f64 eps, u64 t
//   u32 count, then per parameter: str "adam.m/"+name, u64 rows, u64 cols, f64[],
//                                  str "adam.v/"+name, u64 rows, u64 cols, f64[]
//   u64 steps, u64 batches, u64 epoch, f64 learning_rate, u32 current_graph,
//   u64 graph_cursor, u32 count, u32[] graph_order, u64 node_cursor, u32 count, u32[] node_order
//   str rng state (text form of std::mt19937_64)
//   magic "NCAGEEND"
// where str is u32 length followed by bytes.

namespace {

constexpr char kMagic[8] = {'N', 'C', 'A', 'G', 'E', 'C', 'K', 'P'};
constexpr char kEndMagic[8] = {'N', 'C', 'A', 'G', 'E', 'E', 'N', 'D'};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}
    template <typename T>
    void put(T v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
    void str(const std::string& s) {
        put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    void reals(std::span<const double> v) {
        bytes(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
    }
    template <typename T>
    void array(const std::vector<T>& v) {
        put<std::uint32_t>(static_cast<std::uint32_t>(v.size()));
        bytes(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
    }

private:
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}
    void bytes(char* p, std::size_t n) {
        in_.read(p, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) throw CheckpointError("checkpoint truncated");
    }
    template <typename T>
    T get() {
        T v{};
        bytes(reinterpret_cast<char*>(&v), sizeof v);
        return v;
    }
    std::string str(std::size_t limit = 1u << 20) {
        auto n = get<std::uint32_t>();
        if (n > limit) throw CheckpointError("checkpoint string length out of range");
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
    std::vector<double> reals(std::size_t n) {
        std::vector<double> v(n);
        bytes(reinterpret_cast<char*>(v.data()), n * sizeof(double));
        return v;
    }
    template <typename T>
    std::vector<T> array(std::size_t limit) {
        auto n = get<std::uint32_t>();
        if (n > limit) throw CheckpointError("checkpoint array length out of range");
        std::vector<T> v(n);
        bytes(reinterpret_cast<char*>(v.data()), n * sizeof(T));
        return v;
    }

private:
    std::istream& in_;
};

constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

}  // namespace

void write_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
    Writer w(out);
    w.bytes(kMagic, sizeof kMagic);
    w.put<std::uint32_t>(Checkpoint::format_version);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(ckpt.config.model.kind));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(ckpt.config.centrality));
    w.put<std::uint16_t>(0);

    std::string cfg;
    for (const auto& [k, v] : ckpt.config.to_pairs()) cfg += k + "=" + v + "\n";
    w.str(cfg);

    const auto& params = ckpt.params;
    w.put<std::uint32_t>(static_cast<std::uint32_t>(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& t = params.tensors()[i];
        w.str(params.names()[i]);
        w.put<std::uint8_t>(params.is_bias(i) ? 1 : 0);
        w.put<std::uint64_t>(t.rows());
        w.put<std::uint64_t>(t.cols());
        w.reals(t.data());
    }

    const auto& a = ckpt.adam;
    w.put<double>(a.beta1);
    w.put<double>(a.beta2);
    w.put<double>(a.eps);
    w.put<std::uint64_t>(a.t);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(a.m.size()));
    for (std::size_t i = 0; i < a.m.size(); ++i) {
        const auto& t = params.tensors()[i];
        w.str("adam.m/" + params.names()[i]);
        w.put<std::uint64_t>(t.rows());
        w.put<std::uint64_t>(t.cols());
        w.reals(a.m[i]);
        w.str("adam.v/" + params.names()[i]);
        w.put<std::uint64_t>(t.rows());
        w.put<std::uint64_t>(t.cols());
        w.reals(a.v[i]);
    }

    const auto& p = ckpt.progress;
    w.put<std::uint64_t>(p.steps);
    w.put<std::uint64_t>(p.batches);
    w.put<std::uint64_t>(p.epoch);
    w.put<double>(p.learning_rate);
    w.put<std::uint32_t>(p.current_graph);
    w.put<std::uint64_t>(p.graph_cursor);
    w.array(p.graph_order);
    w.put<std::uint64_t>(p.node_cursor);
    w.array(p.node_order);
    std::ostringstream rng;
    rng << p.rng;
    w.str(rng.str());
    w.bytes(kEndMagic, sizeof kEndMagic);
    if (!out) throw CheckpointError("error writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
    Reader r(in);
    char magic[8];
    r.bytes(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw CheckpointError("not a checkpoint file (bad magic)");
    const auto version = r.get<std::uint32_t>();
    if (version != Checkpoint::format_version) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version) +
                              " (expected " + std::to_string(Checkpoint::format_version) + ")");
    }
    const auto model_kind = r.get<std::uint8_t>();
    const auto centrality = r.get<std::uint8_t>();
    r.get<std::uint16_t>();

    Checkpoint c;
    std::istringstream cfg(r.str());
    std::string line;
    while (std::getline(cfg, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) throw CheckpointError("malformed config block");
        try {
            c.config.set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const InvalidParameter& e) {
            throw CheckpointError(std::string("config block: ") + e.what());
        }
    }
    if (static_cast<std::uint8_t>(c.config.model.kind) != model_kind ||
        static_cast<std::uint8_t>(c.config.centrality) != centrality) {
        throw CheckpointError("checkpoint header disagrees with its config block");
    }

    const auto count = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < count; ++i) {
        auto name = r.str();
        const bool is_bias = r.get<std::uint8_t>() != 0;
        const auto rows = r.get<std::uint64_t>();
        const auto cols = r.get<std::uint64_t>();
        if (rows * cols > kMaxElements) throw CheckpointError("parameter too large: " + name);
        c.params.add(name, Tensor::parameter(rows, cols, r.reals(rows * cols)), is_bias);
    }

    c.adam.beta1 = r.get<double>();
    c.adam.beta2 = r.get<double>();
    c.adam.eps = r.get<double>();
    c.adam.t = r.get<std::uint64_t>();
    const auto moments = r.get<std::uint32_t>();
    if (moments != 0 && moments != count) throw CheckpointError("adam block count mismatch");
    for (std::uint32_t i = 0; i < moments; ++i) {
        const auto& t = c.params.tensors()[i];
        for (const char* which : {"adam.m/", "adam.v/"}) {
            auto name = r.str();
            const auto rows = r.get<std::uint64_t>();
            const auto cols = r.get<std::uint64_t>();
            if (name != which + c.params.names()[i] || rows != t.rows() || cols != t.cols()) {
                throw ShapeMismatch("adam block " + name + " does not match parameter " +
                                    c.params.names()[i]);
            }
            (std::string(which) == "adam.m/" ? c.adam.m : c.adam.v).push_back(r.reals(rows * cols));
        }
    }

    auto& p = c.progress;
    p.steps = r.get<std::uint64_t>();
    p.batches = r.get<std::uint64_t>();
    p.epoch = r.get<std::uint64_t>();
    p.learning_rate = r.get<double>();
    p.current_graph = r.get<std::uint32_t>();
    p.graph_cursor = r.get<std::uint64_t>();
    p.graph_order = r.array<std::uint32_t>(kMaxElements - 1);
    p.node_cursor = r.get<std::uint64_t>();
    p.node_order = r.array<NodeId>(kMaxElements - 1);
    std::istringstream rng(r.str());
    rng >> p.rng;
    if (!rng) throw CheckpointError("malformed RNG state");
    if (p.graph_cursor > p.graph_order.size() || p.node_cursor > p.node_order.size()) {
        throw CheckpointError("schedule cursor out of range");
    }

    char end[8];
    r.bytes(end, sizeof end);
    if (std::memcmp(end, kEndMagic, sizeof end) != 0) throw CheckpointError("checkpoint end marker missing");
    if (in.peek() != std::char_traits<char>::eof()) throw CheckpointError("trailing bytes after checkpoint");

    // Validates names and shapes against the declared config.
    (void)model_from_checkpoint(c);
    return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CheckpointError("cannot write checkpoint: " + tmp.string());
        write_checkpoint(ckpt, out);
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint: " + path.string());
    return read_checkpoint(in);
}

}  // namespace ncage
