#include "camsearch/bench.hpp"
#include "camsearch/error.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>

using namespace camsearch;

namespace {

PipelineConfig small_config()
{
    PipelineConfig cfg;
    cfg.graph = GraphPreset::town05(7);
    cfg.traj.count = 300;
    cfg.traj.seed = 5;
    cfg.rnn.hidden_size = 16;
    cfg.rnn.embed_size = 8;
    cfg.rnn.max_epochs = 3;
    cfg.rnn.learning_rate = 0.01;
    cfg.bench.num_queries = 8;
    cfg.bench.repeats = 4;
    cfg.bench.master_seed = 11;
    return cfg;
}

// Built once; training dominates the cost.
const Pipeline& shared_pipeline()
{
    static const Pipeline p = build_pipeline(small_config(), true);
    return p;
}

const BenchReport& shared_report()
{
    static const BenchReport r = bench_pipeline(small_config(), shared_pipeline());
    return r;
}

} // namespace

TEST(Executor, NamesRoundTrip)
{
    for (auto e : {Executor::naive, Executor::graph_search, Executor::spatula, Executor::tracer, Executor::oracle})
        EXPECT_EQ(parse_executor(to_string(e)), e);
    EXPECT_EQ(to_string(Executor::graph_search), "graph-search");
    EXPECT_THROW(parse_executor("bogus"), ConfigError);
    EXPECT_EQ(parse_executor_list("oracle,tracer").size(), 2u);
    EXPECT_THROW(parse_executor_list("oracle,oracle"), ConfigError);
    EXPECT_THROW(parse_executor_list(""), ConfigError);
}

TEST(SampleQueries, FirstVisitWithoutReplacement)
{
    const auto& p = shared_pipeline();
    auto qs = sample_queries(p.test, 10, 3);
    ASSERT_EQ(qs.size(), 10u);
    std::set<ObjectId> ids;
    for (const auto& q : qs) {
        EXPECT_TRUE(ids.insert(q.object_id).second);
        const auto* t = p.test.find(q.object_id);
        ASSERT_NE(t, nullptr);
        EXPECT_EQ(q.source_camera, t->visits.front().camera);
        EXPECT_EQ(q.source_frame, t->visits.front().entry);
    }
    EXPECT_EQ(sample_queries(p.test, 10, 3).front().object_id, qs.front().object_id);
    EXPECT_THROW(sample_queries(p.test, p.test.trajectories.size() + 1, 3), DataError);
}

TEST(Bench, RowLayoutAndOracleHasNoSpread)
{
    const auto& r = shared_report();
    const auto cfg = small_config().bench;
    EXPECT_EQ(r.rows.size(), 5u * cfg.num_queries * cfg.repeats);
    EXPECT_EQ(r.aggregates.size(), 5u * cfg.num_queries + 5u);
    for (const auto& row : r.rows) {
        EXPECT_DOUBLE_EQ(row.recall, 1.0);
        EXPECT_FALSE(row.is_aggregate);
        EXPECT_EQ(row.frames_examined, std::floor(row.frames_examined));
    }
    for (const auto& c : r.cells) {
        if (c.executor == Executor::oracle) {
            EXPECT_EQ(c.sd_frames, 0.0);
            EXPECT_EQ(c.sd_latency, 0.0);
        }
        if (c.executor == Executor::naive)
            EXPECT_EQ(c.sd_frames, 0.0);
    }
    EXPECT_NO_THROW(validate_report(r.rows));
}

TEST(Bench, AggregatesRecomputeFromDetailRows)
{
    const auto& r = shared_report();
    // Independent mean over detail rows.
    std::map<std::pair<Executor, std::int64_t>, std::pair<double, int>> acc;
    for (const auto& row : r.rows) {
        auto& a = acc[{row.executor, row.query_id}];
        a.first += row.frames_examined;
        ++a.second;
    }
    for (const auto& agg : r.aggregates) {
        if (agg.query_id < 0)
            continue;
        const auto& a = acc.at({agg.executor, agg.query_id});
        EXPECT_NEAR(agg.frames_examined, a.first / a.second, 1e-9);
        EXPECT_EQ(agg.repeat, -1);
        EXPECT_TRUE(agg.is_aggregate);
    }
    EXPECT_EQ(aggregate_rows(r.rows), r.aggregates);
}

TEST(Bench, OracleIsMinimumAndSpeedupsAreGeometricMeans)
{
    const auto& r = shared_report();
    std::map<std::int64_t, std::map<Executor, double>> per_query;
    for (const auto& c : r.cells)
        per_query[c.query_id][c.executor] = c.mean_frames;
    for (const auto& [q, m] : per_query)
        for (const auto& [e, v] : m)
            EXPECT_LE(m.at(Executor::oracle), v + 1e-9);

    auto s = r.speedup(Executor::tracer, Executor::graph_search);
    ASSERT_TRUE(s);
    double log_sum = 0.0;
    for (const auto& [q, m] : per_query)
        log_sum += std::log(m.at(Executor::graph_search) / m.at(Executor::tracer));
    EXPECT_NEAR(s->frames_ratio, std::exp(log_sum / static_cast<double>(per_query.size())), 1e-9);
}

TEST(Bench, JobsDoNotChangeResults)
{
    auto cfg = small_config();
    cfg.bench.jobs = 2;
    auto parallel = bench_pipeline(cfg, shared_pipeline());
    EXPECT_EQ(parallel.rows, shared_report().rows);
    EXPECT_EQ(parallel.aggregates, shared_report().aggregates);
}

TEST(Bench, MissingModelIsConfigError)
{
    const auto& p = shared_pipeline();
    BenchConfig cfg;
    cfg.search.window = 50;
    cfg.num_queries = 2;
    cfg.repeats = 1;
    EXPECT_THROW(run_bench(cfg, p.graph, p.test, {}), ConfigError);
    cfg.executors = {Executor::naive, Executor::oracle};
    EXPECT_NO_THROW(run_bench(cfg, p.graph, p.test, {}));
}

TEST(CostBreakdown, SumsToLatencyAndReidDominates)
{
    const auto& r = shared_report();
    for (auto e : {Executor::naive, Executor::graph_search, Executor::spatula, Executor::tracer}) {
        std::vector<RunRow> rows;
        double latency = 0.0;
        for (const auto& row : r.rows)
            if (row.executor == e) {
                rows.push_back(row);
                latency += row.modeled_latency_s;
            }
        auto b = cost_breakdown(rows, r.search.cost);
        EXPECT_NEAR(b.total(), latency, 1e-9 * latency);
        EXPECT_GT(b.reid_s, b.detection_s);
        EXPECT_GT(b.detection_s, b.prediction_s);
    }
}

TEST(CostBreakdown, ZeroOccupancyRemovesReid)
{
    std::vector<RunRow> rows{{Executor::tracer, 1, 0, 100, 100, 4, 0, 1, false}};
    CostModel c;
    c.occupancy = 0.0;
    auto b = cost_breakdown(rows, c);
    EXPECT_EQ(b.reid_s, 0.0);
    EXPECT_NEAR(b.detection_s, 1.5, 1e-12);
    EXPECT_NEAR(b.prediction_s, 0.004, 1e-12);
}

TEST(Report, CsvAndJsonlRoundTripExactly)
{
    const auto& r = shared_report();
    std::vector<RunRow> all = r.rows;
    all.insert(all.end(), r.aggregates.begin(), r.aggregates.end());
    for (auto fmt : {ReportFormat::csv, ReportFormat::jsonl}) {
        auto text = format_report(all, fmt, R"({"seed":1})");
        EXPECT_EQ(parse_report(text, fmt), all);
    }
    auto csv = format_report(all, ReportFormat::csv);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);

    auto dir = testutil::scratch_dir("report_io");
    emit_report(r, ReportFormat::jsonl, dir / "r.jsonl", "{}");
    EXPECT_EQ(load_report(dir / "r.jsonl"), all);
    emit_report(r, ReportFormat::csv, dir / "r.csv", "{}");
    EXPECT_EQ(load_report(dir / "r.csv"), all);
}

TEST(Report, ValidatorCatchesTampering)
{
    const auto& r = shared_report();
    std::vector<RunRow> all = r.rows;
    all.insert(all.end(), r.aggregates.begin(), r.aggregates.end());
    EXPECT_NO_THROW(validate_report(all));

    auto bad_recall = all;
    bad_recall[3].recall = 0.5;
    EXPECT_THROW(validate_report(bad_recall), DataError);

    auto bad_agg = all;
    bad_agg.back().frames_examined += 1.0;
    EXPECT_THROW(validate_report(bad_agg), DataError);

    auto oracle_slow = all;
    for (auto& row : oracle_slow)
        if (row.executor == Executor::oracle && !row.is_aggregate)
            row.frames_examined = 1e9;
    oracle_slow.resize(r.rows.size());
    auto aggs = aggregate_rows(oracle_slow);
    oracle_slow.insert(oracle_slow.end(), aggs.begin(), aggs.end());
    EXPECT_THROW(validate_report(oracle_slow), DataError);
}

TEST(Report, MalformedInputIsDataError)
{
    EXPECT_THROW(parse_report("wrong,header\n", ReportFormat::csv), DataError);
    EXPECT_THROW(parse_report(std::string(kCsvHeader) + "\ntracer,1,0,xx,1,1,1,1,0\n", ReportFormat::csv), DataError);
    EXPECT_THROW(parse_report("{not json}\n", ReportFormat::jsonl), DataError);
    EXPECT_THROW(load_report("/nonexistent/report.csv"), DataError);
}

TEST(Summary, ContainsSpeedupsAndBreakdown)
{
    auto s = nlohmann::json::parse(summary_json(shared_report()));
    EXPECT_TRUE(s.contains("speedups"));
    EXPECT_TRUE(s.contains("cost_breakdown"));
    EXPECT_TRUE(s["predictor_accuracy"].contains("rnn"));
}

TEST(Sweeps, RejectTooFewPoints)
{
    auto cfg = small_config();
    EXPECT_THROW(skew_sweep(cfg, {1.1}), ConfigError);
    EXPECT_THROW(size_sweep(cfg, {20}), ConfigError);
}

TEST(Pipeline, EvaluatePredictorsHasAllNames)
{
    auto acc = evaluate_predictors(shared_pipeline(), 3);
    for (const char* k : {"uniform", "mle", "ngram", "rnn"}) {
        ASSERT_TRUE(acc.count(k)) << k;
        EXPECT_GE(acc[k], 0.0);
        EXPECT_LE(acc[k], 1.0);
    }
    EXPECT_GE(acc["mle"], acc["uniform"]);
}
