// ncage: generate graphs, compute exact centralities, train, predict,
// evaluate and benchmark rank-approximation models.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ncage/centrality.hpp"
#include "ncage/errors.hpp"
#include "ncage/evaluation.hpp"
#include "ncage/graph.hpp"
#include "ncage/parallel.hpp"
#include "ncage/training.hpp"

#ifndef NCAGE_VERSION
#define NCAGE_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace ncage;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitFloor = 3;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

// key=value lines, '#' comments, surrounding whitespace ignored.
std::vector<std::pair<std::string, std::string>> read_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path.string());
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        }
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

void log_header(const std::string& command, const std::vector<std::pair<std::string, std::string>>& fields) {
    spdlog::info("ncage {} {}", NCAGE_VERSION, command);
    for (const auto& [k, v] : fields) spdlog::info("  {} = {}", k, v);
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot write " + path);
    return file;
}

// --- manifests ----------------------------------------------------------------

struct ManifestEntry {
    std::string file;
    std::string set;
    std::string topology;
    std::uint64_t seed = 0;
    NodeId nodes = 0;
    std::size_t edges = 0;
};

constexpr const char* kManifestName = "manifest.csv";

std::vector<ManifestEntry> read_manifest(const fs::path& dir) {
    std::ifstream in(dir / kManifestName);
    if (!in) throw ParseError(0, "no " + std::string(kManifestName) + " in " + dir.string());
    std::vector<ManifestEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line.rfind("file,", 0) == 0) continue;
        std::istringstream row(line);
        std::vector<std::string> cells;
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() < 9) throw ParseError(lineno, "manifest row has " + std::to_string(cells.size()) + " fields");
        ManifestEntry e;
        e.file = cells[0];
        e.set = cells[1];
        e.topology = cells[2];
        e.seed = std::stoull(cells[6]);
        e.nodes = static_cast<NodeId>(std::stoul(cells[7]));
        e.edges = std::stoull(cells[8]);
        out.push_back(e);
    }
    return out;
}

std::vector<TestGraph> load_graph_dir(const fs::path& dir) {
    std::vector<TestGraph> out;
    std::uint32_t id = 0;
    for (const auto& e : read_manifest(dir)) {
        TestGraph tg;
        tg.set = e.set;
        tg.topology = e.topology;
        tg.graph_id = id++;
        tg.graph = load_edge_list(dir / e.file).graph;
        out.push_back(std::move(tg));
    }
    return out;
}

// Real networks may be disconnected; distance-based centralities need one
// component, so evaluation keeps the largest.
TestGraph load_network(const fs::path& path, std::uint32_t id) {
    TestGraph tg;
    tg.set = path.stem().string();
    tg.topology = "real";
    tg.graph_id = id;
    tg.graph = load_edge_list(path).graph;
    if (!is_connected(tg.graph)) {
        const NodeId before = tg.graph.num_nodes();
        tg.graph = largest_component(tg.graph);
        spdlog::warn("{}: kept largest component ({} of {} nodes)", path.string(), tg.graph.num_nodes(), before);
    }
    return tg;
}

// --- subcommands --------------------------------------------------------------

struct GenerateArgs {
    std::string topology = "sf";
    std::size_t count = 1;
    NodeId min_n = 100;
    NodeId max_n = 1000;
    NodeId m = 2;
    NodeId k = 4;
    std::optional<double> p;
    std::uint64_t seed = 1;
    std::string out = "graphs";
};

int cmd_generate(const GenerateArgs& a) {
    if (a.count == 0) throw UsageError("--count must be at least 1");
    if (a.min_n > a.max_n) throw UsageError("--min-n exceeds --max-n");
    const bool mix = a.topology == "mix";
    const Topology fixed = mix ? Topology::scale_free : parse_topology(a.topology);
    log_header("generate", {{"topology", a.topology},
                            {"count", std::to_string(a.count)},
                            {"min_n", std::to_string(a.min_n)},
                            {"max_n", std::to_string(a.max_n)},
                            {"m", std::to_string(a.m)},
                            {"k", std::to_string(a.k)},
                            {"p", a.p ? std::to_string(*a.p) : "default"},
                            {"seed", std::to_string(a.seed)}});

    const fs::path dir(a.out);
    fs::create_directories(dir);
    std::vector<ManifestEntry> entries(a.count);
    std::vector<GeneratorSpec> specs(a.count);
    for (std::size_t i = 0; i < a.count; ++i) {
        std::seed_seq seq{a.seed, static_cast<std::uint64_t>(i)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<NodeId> size(a.min_n, a.max_n);
        static constexpr Topology cycle[] = {Topology::scale_free, Topology::small_world, Topology::random};
        auto& s = specs[i];
        s.topology = mix ? cycle[i % 3] : fixed;
        s.n = size(rng);
        s.m = a.m;
        s.k = a.k;
        s.p = a.p;
        s.seed = rng();
        s.validate();
    }
    parallel_for(a.count, [&](std::size_t i) {
        const Graph g = generate(specs[i]);
        char name[32];
        std::snprintf(name, sizeof name, "graph_%05zu.txt", i);
        save_edge_list(g, dir / name);
        entries[i] = {name, a.topology, to_string(specs[i].topology), specs[i].seed, g.num_nodes(), g.num_edges()};
    });

    std::ofstream manifest(dir / kManifestName);
    manifest << "# ncage generate topology=" << a.topology << " count=" << a.count << " min_n=" << a.min_n
             << " max_n=" << a.max_n << " m=" << a.m << " k=" << a.k
             << " p=" << (a.p ? std::to_string(*a.p) : "default") << " seed=" << a.seed << '\n';
    manifest << "file,set,topology,n_requested,m,k,seed,nodes,edges\n";
    for (std::size_t i = 0; i < a.count; ++i) {
        const auto& e = entries[i];
        manifest << e.file << ',' << e.set << ',' << e.topology << ',' << specs[i].n << ',' << a.m << ',' << a.k
                 << ',' << e.seed << ',' << e.nodes << ',' << e.edges << '\n';
    }
    if (!manifest) throw std::runtime_error("cannot write manifest in " + dir.string());
    spdlog::info("wrote {} graphs and {} to {}", a.count, kManifestName, dir.string());
    return kExitOk;
}

struct CentralityArgs {
    std::string graph;
    std::string kind = "betweenness";
    std::string out;
};

int cmd_centrality(const CentralityArgs& a) {
    const auto kind = parse_centrality(a.kind);
    const auto loaded = load_edge_list(a.graph);
    log_header("centrality", {{"graph", a.graph}, {"kind", to_string(kind)}});
    const auto values = compute_centrality(loaded.graph, kind);
    const auto ranks = normalize_ranks(values);
    std::ofstream file;
    auto& out = open_output(a.out, file);
    out << "node_id,value,normalized_rank\n";
    out.precision(17);
    for (NodeId i = 0; i < loaded.graph.num_nodes(); ++i) {
        out << loaded.original_ids[i] << ',' << values.values[i] << ',' << ranks.values[i] << '\n';
    }
    return kExitOk;
}

struct TrainArgs {
    std::string config_file;
    std::map<std::string, std::string> overrides;  // flag-supplied config keys
    std::string checkpoint;
    std::string resume;
    std::string graphs_dir;
    std::uint64_t log_every = 100;
};

// Precedence: model defaults (or the resumed checkpoint's config) < config
// file < flags.
TrainConfig resolve_train_config(const TrainArgs& a, const Checkpoint* resume) {
    std::vector<std::pair<std::string, std::string>> file_pairs;
    std::string config_path = a.config_file;
    if (config_path.empty()) {
        if (const char* env = std::getenv("NCAGE_CONFIG"); env && *env) config_path = env;
    }
    if (!config_path.empty()) {
        file_pairs = read_config_file(config_path);
        spdlog::info("config file {}", config_path);
    }
    for (const auto& [k, v] : file_pairs) {
        if (!TrainConfig::is_known_key(k)) throw UsageError("unknown config key '" + k + "' in " + config_path);
    }

    // The model kind selects the defaults the remaining keys refine.
    std::string kind = resume ? to_string(resume->config.model.kind) : "s2v";
    for (const auto& [k, v] : file_pairs) {
        if (k == "model") kind = v;
    }
    if (auto it = a.overrides.find("model"); it != a.overrides.end()) kind = it->second;
    TrainConfig c = TrainConfig::defaults_for(parse_model_kind(kind));
    const int default_layers = c.model.layers;
    if (resume) {
        if (resume->config.model.kind != c.model.kind) {
            throw KindMismatch("resume checkpoint holds a " + to_string(resume->config.model.kind) + " model");
        }
        c = resume->config;
    }
    for (const auto& [k, v] : file_pairs) {
        if (k != "model") c.set(k, v);
    }
    for (const auto& [k, v] : a.overrides) {
        if (k != "model") c.set(k, v);
    }
    if (!a.checkpoint.empty()) c.checkpoint_path = a.checkpoint;
    if (c.model.kind != ModelKind::baseline && c.model.layers != default_layers) {
        spdlog::warn("layers={} overrides the default of {}", c.model.layers, default_layers);
    }
    c.validate();
    return c;
}

int cmd_train(const TrainArgs& a) {
    std::optional<Checkpoint> resumed;
    if (!a.resume.empty()) resumed = load_checkpoint(a.resume);
    TrainConfig config = resolve_train_config(a, resumed ? &*resumed : nullptr);
    if (config.checkpoint_path.empty()) throw UsageError("--checkpoint is required");

    auto fields = config.to_pairs();
    fields.emplace_back("threads", std::to_string(max_threads()));
    if (!a.graphs_dir.empty()) fields.emplace_back("graphs", a.graphs_dir);
    if (!a.resume.empty()) fields.emplace_back("resume", a.resume + " sha256=" + sha256_file(a.resume));
    log_header("train", fields);

    std::shared_ptr<const TrainingSet> data;
    if (a.graphs_dir.empty()) {
        data = std::make_shared<const TrainingSet>(build_training_set(config));
    } else {
        std::vector<Graph> graphs;
        for (auto& tg : load_graph_dir(a.graphs_dir)) graphs.push_back(std::move(tg.graph));
        data = std::make_shared<const TrainingSet>(prepare_training_set(config, std::move(graphs)));
    }
    spdlog::info("training set: {} graphs", data->size());

    std::unique_ptr<Trainer> trainer;
    if (a.resume.empty()) {
        trainer = std::make_unique<Trainer>(config, data);
    } else {
        const Checkpoint& ckpt = *resumed;
        if (ckpt.config.model.kind != config.model.kind || ckpt.config.centrality != config.centrality) {
            throw KindMismatch("resume checkpoint is " + to_string(ckpt.config.model.kind) + "/" +
                               to_string(ckpt.config.centrality));
        }
        trainer = std::make_unique<Trainer>(ckpt, config, data);
        spdlog::info("resumed at step {}", ckpt.progress.steps);
    }

    double window = 0.0;
    std::uint64_t in_window = 0;
    trainer->run([&](const Trainer& t, double loss) {
        window += loss;
        ++in_window;
        const auto& p = t.progress();
        if (p.batches % a.log_every == 0 || t.done()) {
            spdlog::info("step {} batch {} epoch {} loss {:.6f} lr {:.6g}", p.steps, p.batches, p.epoch,
                         window / static_cast<double>(in_window), p.learning_rate);
            window = 0.0;
            in_window = 0;
        }
    });
    save_checkpoint(trainer->checkpoint(), config.checkpoint_path);
    spdlog::info("checkpoint {} sha256={}", config.checkpoint_path.string(), sha256_file(config.checkpoint_path));
    return kExitOk;
}

struct PredictArgs {
    std::string checkpoint;
    std::string graph;
    std::string centrality;
    bool allow_mismatch = false;
    std::string out;
};

int cmd_predict(const PredictArgs& a) {
    const Checkpoint ckpt = load_checkpoint(a.checkpoint);
    if (!a.centrality.empty()) {
        const auto want = parse_centrality(a.centrality);
        if (want != ckpt.config.centrality) {
            if (!a.allow_mismatch) {
                throw KindMismatch("checkpoint predicts " + to_string(ckpt.config.centrality) + ", not " +
                                   to_string(want) + " (pass --allow-kind-mismatch to override)");
            }
            spdlog::warn("checkpoint was trained for {}", to_string(ckpt.config.centrality));
        }
    }
    log_header("predict", {{"checkpoint", a.checkpoint + " sha256=" + sha256_file(a.checkpoint)},
                           {"model", to_string(ckpt.config.model.kind)},
                           {"centrality", to_string(ckpt.config.centrality)},
                           {"graph", a.graph}});
    const auto loaded = load_edge_list(a.graph);
    const Model model = model_from_checkpoint(ckpt);
    const auto raw = model.predict(model.prepare(loaded.graph));

    std::ofstream file;
    auto& out = open_output(a.out, file);
    out << "node_id,predicted_rank,raw\n";
    out.precision(17);
    for (NodeId i = 0; i < loaded.graph.num_nodes(); ++i) {
        out << loaded.original_ids[i] << ',' << std::clamp(raw[i], 0.0, 1.0) << ',' << raw[i] << '\n';
    }
    return kExitOk;
}

struct SourceArgs {
    std::string sets;
    std::vector<std::string> graph_files;
    std::string graph_dir;
    TestSetConfig test;
};

std::vector<TestGraph> collect_graphs(const SourceArgs& s) {
    std::vector<TestGraph> graphs;
    if (!s.graph_dir.empty()) graphs = load_graph_dir(s.graph_dir);
    std::uint32_t id = 0;
    for (const auto& f : s.graph_files) graphs.push_back(load_network(f, id++));
    if (!s.sets.empty() || graphs.empty()) {
        const auto kinds = parse_test_set_list(s.sets.empty() ? "sw,sf,rnd,mix" : s.sets);
        auto generated = build_test_sets(kinds, s.test);
        std::move(generated.begin(), generated.end(), std::back_inserter(graphs));
    }
    return graphs;
}

std::vector<std::pair<std::string, std::string>> source_fields(const SourceArgs& s) {
    std::vector<std::pair<std::string, std::string>> f;
    if (!s.sets.empty() || (s.graph_files.empty() && s.graph_dir.empty())) {
        f.emplace_back("sets", s.sets.empty() ? "sw,sf,rnd,mix" : s.sets);
        f.emplace_back("graphs_per_set", std::to_string(s.test.graphs_per_set));
        f.emplace_back("min_n", std::to_string(s.test.min_nodes));
        f.emplace_back("max_n", std::to_string(s.test.max_nodes));
        f.emplace_back("test_seed", std::to_string(s.test.seed));
    }
    if (!s.graph_dir.empty()) f.emplace_back("graph_dir", s.graph_dir);
    for (const auto& g : s.graph_files) f.emplace_back("graph", g);
    return f;
}

struct EvaluateArgs {
    std::vector<std::string> checkpoints;
    SourceArgs source;
    std::string centrality;
    bool allow_mismatch = false;
    std::string csv;
    std::string json;
    std::optional<double> tau_floor;
};

int cmd_evaluate(const EvaluateArgs& a) {
    std::vector<Checkpoint> ckpts;
    for (const auto& path : a.checkpoints) ckpts.push_back(load_checkpoint(path));
    const CentralityKind target =
        a.centrality.empty() ? ckpts.front().config.centrality : parse_centrality(a.centrality);

    auto fields = source_fields(a.source);
    for (const auto& path : a.checkpoints) fields.emplace_back("checkpoint", path + " sha256=" + sha256_file(path));
    fields.emplace_back("centrality", to_string(target));
    fields.emplace_back("threads", std::to_string(max_threads()));
    log_header("evaluate", fields);

    const auto graphs = collect_graphs(a.source);
    std::vector<EvalReport> reports;
    for (const auto& ckpt : ckpts) {
        reports.push_back(evaluate(model_from_checkpoint(ckpt), ckpt.config.centrality, target, graphs,
                                   {a.allow_mismatch}));
    }

    if (!a.csv.empty()) {
        std::ofstream out(a.csv);
        reports.front().write_csv(out);
        if (!out) throw std::runtime_error("cannot write " + a.csv);
    }
    if (!a.json.empty()) {
        std::ofstream out(a.json);
        reports.front().write_json(out);
        if (!out) throw std::runtime_error("cannot write " + a.json);
    }

    std::cout << "set,graphs,undefined,mean_tau_b,stddev_tau_b\n";
    for (const auto& s : reports.front().summaries) {
        std::cout << s.set << ',' << s.graphs << ',' << s.undefined << ',' << s.mean_tau << ',' << s.stddev_tau
                  << '\n';
    }
    if (reports.size() > 1) {
        std::cout << "set,runs,mean_of_means,stddev_of_means\n";
        for (const auto& r : aggregate_runs(reports)) {
            std::cout << r.set << ',' << r.runs << ',' << r.mean_tau << ',' << r.stddev_tau << '\n';
        }
    }

    if (a.tau_floor) {
        bool ok = true;
        for (const auto& report : reports) {
            for (const auto& s : report.summaries) {
                if (!(s.mean_tau >= *a.tau_floor)) {
                    spdlog::error("set {}: mean tau-b {} below floor {}", s.set, s.mean_tau, *a.tau_floor);
                    ok = false;
                }
            }
        }
        if (!ok) return kExitFloor;
    }
    return kExitOk;
}

struct BenchArgs {
    std::string checkpoint;
    SourceArgs source;
    std::size_t repeats = 5;
    std::string csv;
};

int cmd_bench(const BenchArgs& a) {
    if (a.repeats == 0) throw UsageError("--repeats must be at least 1");
    const Checkpoint ckpt = load_checkpoint(a.checkpoint);
    auto fields = source_fields(a.source);
    fields.emplace_back("checkpoint", a.checkpoint + " sha256=" + sha256_file(a.checkpoint));
    fields.emplace_back("model", to_string(ckpt.config.model.kind));
    fields.emplace_back("repeats", std::to_string(a.repeats));
    log_header("bench", fields);

    const auto graphs = collect_graphs(a.source);
    // Timings are taken on one thread.
    set_max_threads(1);
    const auto records = bench_inference(model_from_checkpoint(ckpt), graphs, a.repeats);

    if (!a.csv.empty()) {
        std::ofstream out(a.csv);
        write_bench_csv(records, out);
        if (!out) throw std::runtime_error("cannot write " + a.csv);
    }
    std::cout << "set,graph_id,n,m,time_s_mean,time_s_std\n";
    for (const auto& r : records) {
        std::cout << r.set << ',' << r.graph_id << ',' << r.n << ',' << r.m << ',' << r.total_mean << ','
                  << r.total_std << '\n';
    }
    return kExitOk;
}

void add_source_options(CLI::App* cmd, SourceArgs& s) {
    cmd->add_option("--sets", s.sets, "Generated test sets, comma-separated (sw,sf,rnd,mix)");
    cmd->add_option("--graph", s.graph_files, "Edge-list file (repeatable)")->check(CLI::ExistingFile);
    cmd->add_option("--graph-dir", s.graph_dir, "Directory written by 'generate'")->check(CLI::ExistingDirectory);
    cmd->add_option("--graphs-per-set", s.test.graphs_per_set, "Graphs per generated set")->capture_default_str();
    cmd->add_option("--min-n", s.test.min_nodes, "Smallest generated graph")->capture_default_str();
    cmd->add_option("--max-n", s.test.max_nodes, "Largest generated graph")->capture_default_str();
    cmd->add_option("--test-seed", s.test.seed, "Seed for generated sets")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("ncage"));
    spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");

    CLI::App app{"Node centrality rank approximation from graph embeddings"};
    app.set_version_flag("--version", std::string(NCAGE_VERSION));
    app.require_subcommand(1);
    unsigned threads = 0;
    std::string log_level = "info";
    app.add_option("--threads", threads, "Worker thread cap (0 = hardware concurrency)");
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

    GenerateArgs gen;
    auto* generate_cmd = app.add_subcommand("generate", "Write synthetic graphs and a manifest");
    generate_cmd->add_option("--topology", gen.topology, "sf, sw, rnd or mix")->capture_default_str();
    generate_cmd->add_option("--count", gen.count, "Number of graphs")->capture_default_str();
    generate_cmd->add_option("--min-n", gen.min_n, "Smallest node count")->capture_default_str();
    generate_cmd->add_option("--max-n", gen.max_n, "Largest node count")->capture_default_str();
    generate_cmd->add_option("--m", gen.m, "Scale-free edges per new node")->capture_default_str();
    generate_cmd->add_option("--k", gen.k, "Small-world ring degree")->capture_default_str();
    generate_cmd->add_option("--p", gen.p, "Rewiring or edge probability");
    generate_cmd->add_option("--seed", gen.seed, "Seed")->capture_default_str();
    generate_cmd->add_option("--out", gen.out, "Output directory")->capture_default_str();

    CentralityArgs cen;
    auto* centrality_cmd = app.add_subcommand("centrality", "Exact centrality and normalized rank per node");
    centrality_cmd->add_option("--graph", cen.graph, "Edge-list file")->required()->check(CLI::ExistingFile);
    centrality_cmd->add_option("--kind", cen.kind, "degree, eigenvector, closeness, harmonic or betweenness")
        ->capture_default_str();
    centrality_cmd->add_option("--out", cen.out, "CSV output (default stdout)");

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
    train_cmd->add_option("--config", tr.config_file, "key=value file (default $NCAGE_CONFIG)");
    train_cmd->add_option("--checkpoint", tr.checkpoint, "Checkpoint output path");
    train_cmd->add_option("--resume", tr.resume, "Continue from this checkpoint")->check(CLI::ExistingFile);
    train_cmd->add_option("--graphs", tr.graphs_dir, "Train on a directory written by 'generate'")
        ->check(CLI::ExistingDirectory);
    train_cmd->add_option("--log-every", tr.log_every, "Batches between log lines")->capture_default_str();
    const std::vector<std::pair<std::string, std::string>> train_flags = {
        {"--model", "model"},
        {"--centrality", "centrality"},
        {"--layers", "layers"},
        {"--embed-dim", "embed_dim"},
        {"--n-graphs", "n_graphs"},
        {"--min-n", "min_nodes"},
        {"--max-n", "max_nodes"},
        {"--m", "ba_m"},
        {"--steps", "total_steps"},
        {"--batch-size", "batch_size"},
        {"--lr", "learning_rate"},
        {"--decay", "decay"},
        {"--min-lr", "min_learning_rate"},
        {"--lambda", "lambda"},
        {"--seed", "seed"},
        {"--data-seed", "data_seed"},
        {"--checkpoint-interval", "checkpoint_interval"},
    };
    for (const auto& [flag, key] : train_flags) {
        train_cmd->add_option_function<std::string>(
            flag, [&tr, key = key](const std::string& v) { tr.overrides[key] = v; }, "Config key " + key);
    }

    PredictArgs pr;
    auto* predict_cmd = app.add_subcommand("predict", "Predicted rank for every node of a graph");
    predict_cmd->add_option("--checkpoint", pr.checkpoint, "Trained checkpoint")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--graph", pr.graph, "Edge-list file")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--centrality", pr.centrality, "Expected centrality (checked against the checkpoint)");
    predict_cmd->add_flag("--allow-kind-mismatch", pr.allow_mismatch, "Predict despite a centrality mismatch");
    predict_cmd->add_option("--out", pr.out, "CSV output (default stdout)");

    EvaluateArgs ev;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Kendall tau-b of predictions against exact ranks");
    evaluate_cmd->add_option("--checkpoint", ev.checkpoints, "Checkpoint (repeat to average runs)")
        ->required()
        ->check(CLI::ExistingFile);
    add_source_options(evaluate_cmd, ev.source);
    evaluate_cmd->add_option("--centrality", ev.centrality, "Target centrality (default: the checkpoint's)");
    evaluate_cmd->add_flag("--allow-kind-mismatch", ev.allow_mismatch, "Score against another centrality");
    evaluate_cmd->add_option("--csv", ev.csv, "Per-graph CSV report");
    evaluate_cmd->add_option("--json", ev.json, "Per-set JSON summary");
    evaluate_cmd->add_option("--tau-floor", ev.tau_floor, "Exit 3 when any set's mean tau-b is below this");

    BenchArgs be;
    auto* bench_cmd = app.add_subcommand("bench", "Time feature preparation plus inference");
    bench_cmd->add_option("--checkpoint", be.checkpoint, "Trained checkpoint")->required()->check(CLI::ExistingFile);
    add_source_options(bench_cmd, be.source);
    bench_cmd->add_option("--repeats", be.repeats, "Timed runs per graph")->capture_default_str();
    bench_cmd->add_option("--csv", be.csv, "Per-graph timing CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        spdlog::set_level(spdlog::level::from_str(log_level));
        if (threads > 0) set_max_threads(threads);
        if (generate_cmd->parsed()) return cmd_generate(gen);
        if (centrality_cmd->parsed()) return cmd_centrality(cen);
        if (train_cmd->parsed()) return cmd_train(tr);
        if (predict_cmd->parsed()) return cmd_predict(pr);
        if (evaluate_cmd->parsed()) return cmd_evaluate(ev);
        if (bench_cmd->parsed()) return cmd_bench(be);
    } catch (const UsageError& e) {
        spdlog::error("{}", e.what());
        return kExitUsage;
    } catch (const InvalidParameter& e) {
        spdlog::error("{}", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitData;
    }
    return kExitUsage;
}
