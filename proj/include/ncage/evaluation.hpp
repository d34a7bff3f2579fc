#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ncage/centrality.hpp"
#include "ncage/graph.hpp"
#include "ncage/model.hpp"

namespace ncage {

// Kendall tau-b with tie correction, O(n log n). Throws InvalidParameter on
// length mismatch, fewer than two entries, or NaN inputs. Returns NaN (and
// logs a warning) when either list is constant, where tau-b is undefined.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

enum class TestSetKind { sw, sf, rnd, mix };

std::string to_string(TestSetKind k);
TestSetKind parse_test_set_kind(const std::string& s);
// Comma-separated list, e.g. "sw,sf,rnd,mix". Duplicates are rejected.
std::vector<TestSetKind> parse_test_set_list(const std::string& s);

struct TestSetConfig {
    std::size_t graphs_per_set = 100;
    NodeId min_nodes = 100;
    NodeId max_nodes = 1000;
    NodeId ba_m = 2;
    NodeId sw_k = 4;
    std::optional<double> sw_p;   // default 0.1
    std::optional<double> rnd_p;  // default 4/(n-1)
    std::uint64_t seed = 1;

    void validate() const;
};

// set is "sf", "sw", "rnd", "mix" for generated sets, or any label (for
// example a file name) for loaded networks; topology is "real" for those.
struct TestGraph {
    std::string set;
    std::string topology;
    std::uint32_t graph_id = 0;
    Graph graph;  // largest component for SW and RND
};

// Graph i of a set depends only on (seed, set, i). MIX cycles through
// SF, SW, RND so its composition is exact thirds up to rounding.
std::vector<TestGraph> build_test_set(TestSetKind kind, const TestSetConfig& config);
std::vector<TestGraph> build_test_sets(std::span<const TestSetKind> kinds, const TestSetConfig& config);

struct EvalRecord {
    std::string set;
    std::string topology;
    std::uint32_t graph_id = 0;
    NodeId n = 0;
    std::size_t m = 0;
    double tau_b = 0.0;   // NaN when undefined
    double prep_s = 0.0;  // feature preparation
    double infer_s = 0.0; // forward pass
};

struct SetSummary {
    std::string set;
    std::size_t graphs = 0;
    std::size_t undefined = 0;  // graphs whose tau-b was NaN, excluded from the mean
    double mean_tau = 0.0;
    double stddev_tau = 0.0;  // population stddev over graphs
    double mean_prep_s = 0.0;
    double mean_infer_s = 0.0;
};

struct EvalReport {
    CentralityKind centrality = CentralityKind::closeness;
    std::vector<EvalRecord> records;
    std::vector<SetSummary> summaries;  // in order of first appearance

    const SetSummary& summary(const std::string& set) const;

    // set,topology,graph_id,n,m,tau_b,prep_s,infer_s
    void write_csv(std::ostream& out) const;
    void write_json(std::ostream& out) const;
};

std::vector<SetSummary> summarize(std::span<const EvalRecord> records);

struct EvalOptions {
    // Score against a centrality other than the one the model was trained on.
    bool allow_kind_mismatch = false;
};

// Full forward pass on every node of every graph, scored against exact
// ranks. Graphs are processed in parallel; records keep input order.
// Throws KindMismatch when target differs from trained unless allowed.
EvalReport evaluate(const Model& model, CentralityKind trained, CentralityKind target,
                    std::span<const TestGraph> graphs, const EvalOptions& options = {});

// Mean and spread of per-set mean tau-b across independent runs (for
// example retrainings with different seeds).
struct RunAggregate {
    std::string set;
    std::size_t runs = 0;
    double mean_tau = 0.0;
    double stddev_tau = 0.0;  // population stddev of the per-run means
};

std::vector<RunAggregate> aggregate_runs(std::span<const EvalReport> runs);

struct BenchRecord {
    std::string set;
    std::string topology;
    std::uint32_t graph_id = 0;
    NodeId n = 0;
    std::size_t m = 0;
    std::size_t repeats = 0;
    double prep_mean = 0.0;
    double prep_std = 0.0;
    double infer_mean = 0.0;
    double infer_std = 0.0;
    double total_mean = 0.0;
    double total_std = 0.0;
};

// Wall-clock time of feature preparation plus inference, repeated per
// graph. Runs sequentially; exact centralities and loading are not timed.
std::vector<BenchRecord> bench_inference(const Model& model, std::span<const TestGraph> graphs,
                                         std::size_t repeats = 5);
void write_bench_csv(std::span<const BenchRecord> records, std::ostream& out);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Ordinary least squares y = slope*x + intercept.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Population mean and standard deviation; {0,0} for an empty input.
std::pair<double, double> mean_stddev(std::span<const double> v);

}  // namespace ncage
