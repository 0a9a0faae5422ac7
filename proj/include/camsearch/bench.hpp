#pragma once

#include "camsearch/graph.hpp"
#include "camsearch/predict.hpp"
#include "camsearch/rnn.hpp"
#include "camsearch/search.hpp"
#include "camsearch/trajectory.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace camsearch {

enum class Executor { naive, graph_search, spatula, tracer, oracle };

Executor parse_executor(const std::string& name);
std::string to_string(Executor e);
std::vector<Executor> parse_executor_list(const std::string& csv);

// One line of the long-format report. Aggregate rows use repeat = -1;
// the per-executor aggregate over all queries also uses query_id = -1.
struct RunRow {
    Executor executor = Executor::oracle;
    std::int64_t query_id = 0;
    std::int64_t repeat = 0;
    double frames_examined = 0.0; // integral on detail rows, means on aggregate rows
    double oracle_calls = 0.0;
    double sampling_rounds = 0.0;
    double modeled_latency_s = 0.0;
    double recall = 0.0;
    bool is_aggregate = false;

    bool operator==(const RunRow&) const = default;
};

struct CellStats {
    Executor executor = Executor::oracle;
    std::int64_t query_id = 0;
    double mean_frames = 0.0;
    double sd_frames = 0.0;
    double mean_latency = 0.0;
    double sd_latency = 0.0;
    double mean_rounds = 0.0;
    double mean_recall = 0.0;
};

// Geometric mean over queries of baseline / subject per-query means.
struct Speedup {
    Executor subject = Executor::tracer;
    Executor baseline = Executor::graph_search;
    double latency_ratio = 0.0;
    double frames_ratio = 0.0;
};

struct CostBreakdown {
    double detection_s = 0.0;
    double reid_s = 0.0;
    double prediction_s = 0.0;

    double total() const { return detection_s + reid_s + prediction_s; }
};

struct BenchConfig {
    std::vector<Executor> executors{Executor::naive, Executor::graph_search, Executor::spatula, Executor::tracer,
                                    Executor::oracle};
    std::size_t num_queries = 50;
    std::size_t repeats = 20;
    std::uint64_t master_seed = 0;
    SearchConfig search; // window 0 derives the default from the training split
    std::size_t jobs = 1;

    void validate() const;
};

// Fitted predictors the executors draw on. Null entries are only allowed
// when no executor needs them.
struct BenchModels {
    const Predictor* mle = nullptr;
    const Predictor* rnn = nullptr;
};

struct BenchReport {
    std::vector<RunRow> rows;       // detail rows, executor-major, then query, then repeat
    std::vector<RunRow> aggregates; // per (executor, query), then per executor
    std::vector<CellStats> cells;
    std::vector<Speedup> speedups;
    std::map<std::string, double> predictor_accuracy;
    std::map<std::string, CostBreakdown> cost; // per executor name
    SearchConfig search;                       // as resolved for the run

    // Mean of the per-query means for one executor.
    double mean_frames(Executor e) const;
    double mean_latency(Executor e) const;
    std::optional<Speedup> speedup(Executor subject, Executor baseline) const;
};

// Queries are the first visit of num_queries test trajectories sampled
// without replacement.
std::vector<Query> sample_queries(const Dataset& test, std::size_t num_queries, std::uint64_t seed);

// Runs every executor `repeats` times per query with per-run seeds derived
// from (master seed, query index, repeat). Throws DataError if any run
// misses a visited camera.
BenchReport run_bench(const BenchConfig& cfg, const CameraGraph& g, const Dataset& test, const BenchModels& models);

// Per-executor and per-query aggregates recomputed from detail rows.
std::vector<RunRow> aggregate_rows(std::span<const RunRow> detail);

// detection = frames * detector; reid = frames * occupancy * reid; prediction = rounds * predictor.
CostBreakdown cost_breakdown(std::span<const RunRow> detail, const CostModel& cost);

// --- end-to-end pipelines used by the sweeps ---

struct PipelineConfig {
    GraphPreset graph;
    TrajGenConfig traj;
    double train_fraction = 0.8;
    std::size_t ngram_order = 3;
    RnnConfig rnn;
    BenchConfig bench;
};

struct Pipeline {
    CameraGraph graph;
    Dataset dataset;
    std::vector<Trajectory> train;
    Dataset test;
    std::optional<RnnModel> rnn; // trained only when needed
};

// Builds graph, dataset and split; trains the RNN when train_rnn is set.
Pipeline build_pipeline(const PipelineConfig& cfg, bool train_rnn);

// Predictor accuracies on the test split; "rnn" only when a model was trained.
std::map<std::string, double> evaluate_predictors(const Pipeline& p, std::size_t ngram_order);

BenchReport bench_pipeline(const PipelineConfig& cfg, const Pipeline& p);

struct SkewPoint {
    double skew = 0.0;
    BenchReport report;
};

// One dataset + model per skew, seeds derived from the base seeds and the skew index.
std::vector<SkewPoint> skew_sweep(const PipelineConfig& cfg, const std::vector<double>& skews);

struct SizePoint {
    std::size_t cameras = 0;
    std::map<std::string, double> accuracy; // uniform, mle, ngram, rnn
    double rnn_mle_gap = 0.0;
};

std::vector<SizePoint> size_sweep(const PipelineConfig& cfg, const std::vector<std::size_t>& sizes);

// --- reports ---

enum class ReportFormat { csv, jsonl };
ReportFormat parse_report_format(const std::string& name);

inline constexpr const char* kCsvHeader =
    "executor,query_id,repeat,frames_examined,oracle_calls,sampling_rounds,modeled_latency_s,recall,is_aggregate";

// Detail rows followed by aggregate rows. config_json, when non-empty, is
// written as a leading comment (CSV) or {"config":...} line (JSONL).
std::string format_report(std::span<const RunRow> rows, ReportFormat format, const std::string& config_json = {});
std::vector<RunRow> parse_report(const std::string& text, ReportFormat format);
void emit_report(const BenchReport& report, ReportFormat format, const std::filesystem::path& path,
                 const std::string& config_json = {});
std::vector<RunRow> load_report(const std::filesystem::path& path);

// Speedups, per-cell spread, predictor accuracy and cost breakdown as JSON.
std::string summary_json(const BenchReport& report);

// Checks a parsed report: recall 1.0 everywhere, aggregates match detail rows,
// oracle is the per-query minimum. Throws DataError naming the first offending row.
void validate_report(std::span<const RunRow> rows);

} // namespace camsearch
