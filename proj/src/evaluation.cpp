#include "ncage/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "ncage/errors.hpp"
#include "ncage/parallel.hpp"

namespace ncage {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Sorts idx[lo, hi) by key and returns the number of swaps an insertion sort
// would need, i.e. the number of strictly inverted pairs.
std::int64_t merge_count(std::vector<std::size_t>& idx, std::vector<std::size_t>& buf,
                         std::span<const double> key, std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t swaps = merge_count(idx, buf, key, lo, mid) + merge_count(idx, buf, key, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (key[idx[j]] < key[idx[i]]) {
            swaps += static_cast<std::int64_t>(mid - i);
            buf[k++] = idx[j++];
        } else {
            buf[k++] = idx[i++];
        }
    }
    while (i < mid) buf[k++] = idx[i++];
    while (j < hi) buf[k++] = idx[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              idx.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

// Sum over runs of equal keys (in an order sorted by key) of t(t-1)/2.
template <typename Eq>
std::int64_t tied_pairs(const std::vector<std::size_t>& idx, Eq equal) {
    std::int64_t total = 0;
    std::int64_t run = 1;
    for (std::size_t i = 1; i < idx.size(); ++i) {
        if (equal(idx[i - 1], idx[i])) {
            ++run;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    return total + run * (run - 1) / 2;
}

}  // namespace

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw InvalidParameter("kendall_tau_b: length mismatch (" + std::to_string(x.size()) + " vs " +
                               std::to_string(y.size()) + ")");
    }
    const std::size_t n = x.size();
    if (n < 2) throw InvalidParameter("kendall_tau_b: need at least two entries");
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(x[i]) || std::isnan(y[i])) throw InvalidParameter("kendall_tau_b: NaN input");
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });

    const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    const std::int64_t tx = tied_pairs(idx, [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
    const std::int64_t txy = tied_pairs(
        idx, [&](std::size_t a, std::size_t b) { return x[a] == x[b] && y[a] == y[b]; });

    std::vector<std::size_t> buf(n);
    const std::int64_t discordant = merge_count(idx, buf, y, 0, n);
    const std::int64_t ty = tied_pairs(idx, [&](std::size_t a, std::size_t b) { return y[a] == y[b]; });

    // Pairs untied in both lists split into concordant and discordant.
    const std::int64_t concordant_minus_discordant = n0 - tx - ty + txy - 2 * discordant;
    const std::int64_t dx = n0 - tx;
    const std::int64_t dy = n0 - ty;
    if (dx == 0 || dy == 0) {
        spdlog::warn("kendall_tau_b undefined: {} list is constant", dx == 0 ? "first" : "second");
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double tau = static_cast<double>(concordant_minus_discordant) /
                       (std::sqrt(static_cast<double>(dx)) * std::sqrt(static_cast<double>(dy)));
    return std::clamp(tau, -1.0, 1.0);
}

// --- test sets ----------------------------------------------------------------

std::string to_string(TestSetKind k) {
    switch (k) {
        case TestSetKind::sw: return "sw";
        case TestSetKind::sf: return "sf";
        case TestSetKind::rnd: return "rnd";
        case TestSetKind::mix: return "mix";
    }
    return "?";
}

TestSetKind parse_test_set_kind(const std::string& s) {
    if (s == "sw") return TestSetKind::sw;
    if (s == "sf") return TestSetKind::sf;
    if (s == "rnd") return TestSetKind::rnd;
    if (s == "mix") return TestSetKind::mix;
    throw InvalidParameter("unknown test set: " + s + " (expected sw, sf, rnd or mix)");
}

std::vector<TestSetKind> parse_test_set_list(const std::string& s) {
    std::vector<TestSetKind> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = std::min(s.find(',', pos), s.size());
        const auto kind = parse_test_set_kind(s.substr(pos, comma - pos));
        if (std::find(out.begin(), out.end(), kind) != out.end()) {
            throw InvalidParameter("test set listed twice: " + to_string(kind));
        }
        out.push_back(kind);
        pos = comma + 1;
    }
    return out;
}

void TestSetConfig::validate() const {
    if (min_nodes < 2 || min_nodes > max_nodes) {
        throw InvalidParameter("test sets: node range must satisfy 2 <= min_nodes <= max_nodes");
    }
    if (ba_m < 1 || ba_m >= min_nodes) throw InvalidParameter("test sets: ba_m must satisfy 1 <= m < min_nodes");
}

std::vector<TestGraph> build_test_set(TestSetKind kind, const TestSetConfig& config) {
    config.validate();
    std::vector<TestGraph> out(config.graphs_per_set);
    parallel_for(out.size(), [&](std::size_t i) {
        std::seed_seq seq{config.seed, static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(i)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<NodeId> size(config.min_nodes, config.max_nodes);

        GeneratorSpec spec;
        switch (kind) {
            case TestSetKind::sf: spec.topology = Topology::scale_free; break;
            case TestSetKind::sw: spec.topology = Topology::small_world; break;
            case TestSetKind::rnd: spec.topology = Topology::random; break;
            case TestSetKind::mix: {
                static constexpr Topology cycle[] = {Topology::scale_free, Topology::small_world,
                                                     Topology::random};
                spec.topology = cycle[i % 3];
                break;
            }
        }
        spec.n = size(rng);
        spec.m = config.ba_m;
        spec.k = config.sw_k;
        if (spec.topology == Topology::small_world) spec.p = config.sw_p;
        if (spec.topology == Topology::random) spec.p = config.rnd_p;
        spec.seed = rng();

        auto& tg = out[i];
        tg.set = to_string(kind);
        tg.topology = to_string(spec.topology);
        tg.graph_id = static_cast<std::uint32_t>(i);
        tg.graph = generate(spec);
    });
    return out;
}

std::vector<TestGraph> build_test_sets(std::span<const TestSetKind> kinds, const TestSetConfig& config) {
    std::vector<TestGraph> out;
    for (auto kind : kinds) {
        auto set = build_test_set(kind, config);
        std::move(set.begin(), set.end(), std::back_inserter(out));
    }
    return out;
}

// --- scoring ------------------------------------------------------------------

std::pair<double, double> mean_stddev(std::span<const double> v) {
    if (v.empty()) return {0.0, 0.0};
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

std::vector<SetSummary> summarize(std::span<const EvalRecord> records) {
    std::vector<SetSummary> out;
    std::vector<std::string> order;
    for (const auto& r : records) {
        if (std::find(order.begin(), order.end(), r.set) == order.end()) order.push_back(r.set);
    }
    for (const auto& set : order) {
        SetSummary s;
        s.set = set;
        std::vector<double> taus;
        double prep = 0.0, infer = 0.0;
        for (const auto& r : records) {
            if (r.set != set) continue;
            ++s.graphs;
            prep += r.prep_s;
            infer += r.infer_s;
            if (std::isnan(r.tau_b)) {
                ++s.undefined;
            } else {
                taus.push_back(r.tau_b);
            }
        }
        std::tie(s.mean_tau, s.stddev_tau) = mean_stddev(taus);
        if (taus.empty()) s.mean_tau = s.stddev_tau = std::numeric_limits<double>::quiet_NaN();
        s.mean_prep_s = prep / static_cast<double>(s.graphs);
        s.mean_infer_s = infer / static_cast<double>(s.graphs);
        out.push_back(s);
    }
    return out;
}

const SetSummary& EvalReport::summary(const std::string& set) const {
    for (const auto& s : summaries) {
        if (s.set == set) return s;
    }
    throw InvalidParameter("report has no set named " + set);
}

void EvalReport::write_csv(std::ostream& out) const {
    out << "set,topology,graph_id,n,m,tau_b,prep_s,infer_s\n";
    out.precision(17);
    for (const auto& r : records) {
        out << r.set << ',' << r.topology << ',' << r.graph_id << ',' << r.n << ','
            << r.m << ',' << r.tau_b << ',' << r.prep_s << ',' << r.infer_s << '\n';
    }
}

namespace {

nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

void EvalReport::write_json(std::ostream& out) const {
    nlohmann::json j;
    j["centrality"] = to_string(centrality);
    j["sets"] = nlohmann::json::array();
    for (const auto& s : summaries) {
        j["sets"].push_back({{"set", s.set},
                             {"graphs", s.graphs},
                             {"undefined", s.undefined},
                             {"mean_tau_b", number_or_null(s.mean_tau)},
                             {"stddev_tau_b", number_or_null(s.stddev_tau)},
                             {"mean_prep_s", s.mean_prep_s},
                             {"mean_infer_s", s.mean_infer_s}});
    }
    out << j.dump(2) << '\n';
}

EvalReport evaluate(const Model& model, CentralityKind trained, CentralityKind target,
                    std::span<const TestGraph> graphs, const EvalOptions& options) {
    if (trained != target) {
        if (!options.allow_kind_mismatch) {
            throw KindMismatch("model was trained for " + to_string(trained) + ", not " + to_string(target));
        }
        spdlog::warn("scoring a {} model against {} ranks", to_string(trained), to_string(target));
    }
    EvalReport report;
    report.centrality = target;
    report.records.resize(graphs.size());
    parallel_for(graphs.size(), [&](std::size_t i) {
        const auto& tg = graphs[i];
        auto& r = report.records[i];
        r.set = tg.set;
        r.topology = tg.topology;
        r.graph_id = tg.graph_id;
        r.n = tg.graph.num_nodes();
        r.m = tg.graph.num_edges();

        auto t0 = Clock::now();
        const PreparedGraph input = model.prepare(tg.graph);
        r.prep_s = seconds_since(t0);
        t0 = Clock::now();
        const auto predicted = model.predict(input);
        r.infer_s = seconds_since(t0);

        const auto truth = normalize_ranks(compute_centrality(tg.graph, target));
        r.tau_b = kendall_tau_b(predicted, truth.values);
    });
    report.summaries = summarize(report.records);
    return report;
}

std::vector<RunAggregate> aggregate_runs(std::span<const EvalReport> runs) {
    std::vector<RunAggregate> out;
    if (runs.empty()) return out;
    for (const auto& first : runs.front().summaries) {
        RunAggregate a;
        a.set = first.set;
        std::vector<double> means;
        for (const auto& run : runs) means.push_back(run.summary(first.set).mean_tau);
        a.runs = means.size();
        std::tie(a.mean_tau, a.stddev_tau) = mean_stddev(means);
        out.push_back(a);
    }
    return out;
}

// --- timing -------------------------------------------------------------------

std::vector<BenchRecord> bench_inference(const Model& model, std::span<const TestGraph> graphs,
                                         std::size_t repeats) {
    if (repeats < 1) throw InvalidParameter("bench_inference: repeats must be >= 1");
    std::vector<BenchRecord> out;
    out.reserve(graphs.size());
    for (const auto& tg : graphs) {
        std::vector<double> prep(repeats), infer(repeats), total(repeats);
        for (std::size_t k = 0; k < repeats; ++k) {
            auto t0 = Clock::now();
            const PreparedGraph input = model.prepare(tg.graph);
            prep[k] = seconds_since(t0);
            auto t1 = Clock::now();
            const auto predicted = model.predict(input);
            infer[k] = seconds_since(t1);
            total[k] = prep[k] + infer[k];
        }
        BenchRecord r;
        r.set = tg.set;
        r.topology = tg.topology;
        r.graph_id = tg.graph_id;
        r.n = tg.graph.num_nodes();
        r.m = tg.graph.num_edges();
        r.repeats = repeats;
        std::tie(r.prep_mean, r.prep_std) = mean_stddev(prep);
        std::tie(r.infer_mean, r.infer_std) = mean_stddev(infer);
        std::tie(r.total_mean, r.total_std) = mean_stddev(total);
        out.push_back(r);
    }
    return out;
}

void write_bench_csv(std::span<const BenchRecord> records, std::ostream& out) {
    out << "set,topology,graph_id,n,m,repeats,prep_s_mean,prep_s_std,infer_s_mean,infer_s_std,"
           "total_s_mean,total_s_std\n";
    out.precision(17);
    for (const auto& r : records) {
        out << r.set << ',' << r.topology << ',' << r.graph_id << ',' << r.n << ','
            << r.m << ',' << r.repeats << ',' << r.prep_mean << ',' << r.prep_std << ',' << r.infer_mean << ','
            << r.infer_std << ',' << r.total_mean << ',' << r.total_std << '\n';
    }
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidParameter("linear_fit: need two or more paired samples");
    }
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidParameter("linear_fit: x has no spread");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

}  // namespace ncage
