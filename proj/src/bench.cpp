#include "camsearch/bench.hpp"

#include "camsearch/error.hpp"
#include "io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace camsearch {

Executor parse_executor(const std::string& name)
{
    if (name == "naive")
        return Executor::naive;
    if (name == "graph-search")
        return Executor::graph_search;
    if (name == "spatula")
        return Executor::spatula;
    if (name == "tracer")
        return Executor::tracer;
    if (name == "oracle")
        return Executor::oracle;
    throw ConfigError("unknown executor '" + name + "' (naive, graph-search, spatula, tracer, oracle)");
}

std::string to_string(Executor e)
{
    switch (e) {
    case Executor::naive:
        return "naive";
    case Executor::graph_search:
        return "graph-search";
    case Executor::spatula:
        return "spatula";
    case Executor::tracer:
        return "tracer";
    case Executor::oracle:
        return "oracle";
    }
    return "?";
}

std::vector<Executor> parse_executor_list(const std::string& csv)
{
    std::vector<Executor> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(parse_executor(item));
    if (out.empty())
        throw ConfigError("executor list is empty");
    for (std::size_t i = 0; i < out.size(); ++i)
        if (std::find(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(i), out[i]) != out.begin() + static_cast<std::ptrdiff_t>(i))
            throw ConfigError("executor '" + to_string(out[i]) + "' listed twice");
    return out;
}

void BenchConfig::validate() const
{
    if (executors.empty())
        throw ConfigError("at least one executor is required");
    if (num_queries < 1 || repeats < 1)
        throw ConfigError("queries and repeats must be >= 1");
    if (jobs < 1)
        throw ConfigError("jobs must be >= 1");
}

double BenchReport::mean_frames(Executor e) const
{
    for (const auto& a : aggregates)
        if (a.executor == e && a.query_id == -1)
            return a.frames_examined;
    throw ConfigError("executor " + to_string(e) + " not in report");
}

double BenchReport::mean_latency(Executor e) const
{
    for (const auto& a : aggregates)
        if (a.executor == e && a.query_id == -1)
            return a.modeled_latency_s;
    throw ConfigError("executor " + to_string(e) + " not in report");
}

std::optional<Speedup> BenchReport::speedup(Executor subject, Executor baseline) const
{
    for (const auto& s : speedups)
        if (s.subject == subject && s.baseline == baseline)
            return s;
    return std::nullopt;
}

std::vector<Query> sample_queries(const Dataset& test, std::size_t num_queries, std::uint64_t seed)
{
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < test.trajectories.size(); ++i)
        if (!test.trajectories[i].visits.empty())
            pool.push_back(i);
    if (pool.size() < num_queries)
        throw DataError("test split has " + std::to_string(pool.size()) + " trajectories, " +
                        std::to_string(num_queries) + " queries requested");
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(pool));
    std::vector<Query> out;
    for (std::size_t i = 0; i < num_queries; ++i) {
        const Trajectory& t = test.trajectories[pool[i]];
        out.push_back({t.id, t.visits.front().camera, t.visits.front().entry});
    }
    return out;
}

namespace {

double mean_of(const std::vector<double>& xs)
{
    return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs)
{
    if (xs.size() < 2)
        return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs)
        s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

RunRow mean_row(Executor e, std::int64_t query_id, const std::vector<const RunRow*>& rows)
{
    RunRow a;
    a.executor = e;
    a.query_id = query_id;
    a.repeat = -1;
    a.is_aggregate = true;
    for (const RunRow* r : rows) {
        a.frames_examined += r->frames_examined;
        a.oracle_calls += r->oracle_calls;
        a.sampling_rounds += r->sampling_rounds;
        a.modeled_latency_s += r->modeled_latency_s;
        a.recall += r->recall;
    }
    const double n = static_cast<double>(rows.size());
    a.frames_examined /= n;
    a.oracle_calls /= n;
    a.sampling_rounds /= n;
    a.modeled_latency_s /= n;
    a.recall /= n;
    return a;
}

// Ordered unique executors and queries, in first-appearance order.
template <typename T, typename F>
std::vector<T> unique_in_order(std::span<const RunRow> rows, F key)
{
    std::vector<T> out;
    for (const auto& r : rows)
        if (std::find(out.begin(), out.end(), key(r)) == out.end())
            out.push_back(key(r));
    return out;
}

} // namespace

std::vector<RunRow> aggregate_rows(std::span<const RunRow> detail)
{
    auto executors = unique_in_order<Executor>(detail, [](const RunRow& r) { return r.executor; });
    auto queries = unique_in_order<std::int64_t>(detail, [](const RunRow& r) { return r.query_id; });
    std::vector<RunRow> per_query;
    std::vector<RunRow> overall;
    for (Executor e : executors) {
        std::vector<const RunRow*> cell_means;
        std::vector<RunRow> mine;
        for (std::int64_t q : queries) {
            std::vector<const RunRow*> cell;
            for (const auto& r : detail)
                if (!r.is_aggregate && r.executor == e && r.query_id == q)
                    cell.push_back(&r);
            if (cell.empty())
                continue;
            mine.push_back(mean_row(e, q, cell));
        }
        for (const auto& m : mine)
            cell_means.push_back(&m);
        overall.push_back(mean_row(e, -1, cell_means));
        per_query.insert(per_query.end(), mine.begin(), mine.end());
    }
    per_query.insert(per_query.end(), overall.begin(), overall.end());
    return per_query;
}

CostBreakdown cost_breakdown(std::span<const RunRow> detail, const CostModel& cost)
{
    CostBreakdown b;
    for (const auto& r : detail) {
        if (r.is_aggregate)
            continue;
        b.detection_s += r.frames_examined * cost.detector_cost;
        b.reid_s += r.frames_examined * cost.occupancy * cost.reid_cost;
        b.prediction_s += r.sampling_rounds * cost.predictor_cost;
    }
    return b;
}

BenchReport run_bench(const BenchConfig& cfg, const CameraGraph& g, const Dataset& test, const BenchModels& models)
{
    cfg.validate();
    SearchConfig search = cfg.search;
    if (search.horizon == 0)
        search.horizon = test.horizon;
    search.validate();
    if (test.graph_checksum != 0 && test.graph_checksum != g.checksum())
        throw DataError("dataset graph checksum " + checksum_hex(test.graph_checksum) + " does not match graph " +
                        checksum_hex(g.checksum()));
    for (Executor e : cfg.executors) {
        if (e == Executor::spatula && models.mle == nullptr)
            throw ConfigError("spatula needs an MLE model");
        if (e == Executor::tracer && models.rnn == nullptr)
            throw ConfigError("tracer needs an RNN model");
    }

    const auto queries = sample_queries(test, cfg.num_queries, derive_seed(cfg.master_seed, 0x9e37));
    const UniformPredictor uniform(g);
    const std::size_t per_exec = queries.size() * cfg.repeats;
    const std::size_t total = cfg.executors.size() * per_exec;
    std::vector<RunRow> rows(total);

    auto run_cell = [&](std::size_t idx) {
        const Executor e = cfg.executors[idx / per_exec];
        const std::size_t qi = (idx % per_exec) / cfg.repeats;
        const std::size_t rep = idx % cfg.repeats;
        const Query& q = queries[qi];
        Rng rng(derive_seed(cfg.master_seed, qi, rep));
        QueryResult r;
        switch (e) {
        case Executor::naive:
            r = run_query_naive(test, g, q, search);
            break;
        case Executor::graph_search:
            r = run_query_adaptive(test, g, q, uniform, search, rng, true);
            break;
        case Executor::spatula:
            r = run_query_adaptive(test, g, q, *models.mle, search, rng, true);
            break;
        case Executor::tracer:
            r = run_query_adaptive(test, g, q, *models.rnn, search, rng, false);
            break;
        case Executor::oracle:
            r = run_query_oracle(test, q, search.cost);
            break;
        }
        RunRow& row = rows[idx];
        row.executor = e;
        row.query_id = q.object_id;
        row.repeat = static_cast<std::int64_t>(rep);
        row.frames_examined = static_cast<double>(r.frames_examined);
        row.oracle_calls = static_cast<double>(r.oracle_calls);
        row.sampling_rounds = static_cast<double>(r.sampling_rounds);
        row.modeled_latency_s = r.modeled_latency;
        row.recall = r.recall;
    };

    const std::size_t jobs = std::min(cfg.jobs, std::max<std::size_t>(total, 1));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < total; ++i)
            run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) {
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < total;) {
                    try {
                        run_cell(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                        next = total;
                    }
                }
            });
        }
        for (auto& t : pool)
            t.join();
        if (failure)
            std::rethrow_exception(failure);
    }

    for (const auto& r : rows)
        if (r.recall != 1.0)
            throw DataError(to_string(r.executor) + " reached recall " + std::to_string(r.recall) + " on query " +
                            std::to_string(r.query_id) + " repeat " + std::to_string(r.repeat));

    BenchReport report;
    report.search = search;
    report.rows = std::move(rows);
    report.aggregates = aggregate_rows(report.rows);

    for (Executor e : cfg.executors) {
        for (const auto& q : queries) {
            std::vector<double> frames, latency, rounds, recall;
            for (const auto& r : report.rows) {
                if (r.executor != e || r.query_id != q.object_id)
                    continue;
                frames.push_back(r.frames_examined);
                latency.push_back(r.modeled_latency_s);
                rounds.push_back(r.sampling_rounds);
                recall.push_back(r.recall);
            }
            report.cells.push_back({e, q.object_id, mean_of(frames), sd_of(frames), mean_of(latency), sd_of(latency),
                                    mean_of(rounds), mean_of(recall)});
        }
        std::vector<RunRow> mine;
        for (const auto& r : report.rows)
            if (r.executor == e)
                mine.push_back(r);
        report.cost[to_string(e)] = cost_breakdown(mine, search.cost);
    }

    for (Executor subject : cfg.executors) {
        for (Executor baseline : cfg.executors) {
            if (subject == baseline)
                continue;
            double log_lat = 0.0, log_frames = 0.0;
            std::size_t n_lat = 0, n_frames = 0;
            for (std::size_t qi = 0; qi < queries.size(); ++qi) {
                const CellStats* s = nullptr;
                const CellStats* b = nullptr;
                for (const auto& c : report.cells) {
                    if (c.query_id != queries[qi].object_id)
                        continue;
                    if (c.executor == subject)
                        s = &c;
                    if (c.executor == baseline)
                        b = &c;
                }
                if (s->mean_latency > 0.0 && b->mean_latency > 0.0) {
                    log_lat += std::log(b->mean_latency / s->mean_latency);
                    ++n_lat;
                }
                if (s->mean_frames > 0.0 && b->mean_frames > 0.0) {
                    log_frames += std::log(b->mean_frames / s->mean_frames);
                    ++n_frames;
                }
            }
            report.speedups.push_back({subject, baseline,
                                       n_lat ? std::exp(log_lat / static_cast<double>(n_lat)) : 0.0,
                                       n_frames ? std::exp(log_frames / static_cast<double>(n_frames)) : 0.0});
        }
    }
    return report;
}

// ---- pipelines ----

Pipeline build_pipeline(const PipelineConfig& cfg, bool train_rnn_model)
{
    Pipeline p;
    p.graph = build_graph(cfg.graph);
    p.dataset = generate_dataset(p.graph, cfg.traj);
    auto [train, test] = split_dataset(p.dataset.trajectories, cfg.train_fraction, derive_seed(cfg.traj.seed, 0x7e57));
    p.train = std::move(train);
    p.test.graph_checksum = p.dataset.graph_checksum;
    p.test.horizon = p.dataset.horizon;
    p.test.trajectories = std::move(test);
    p.test.reindex();
    if (train_rnn_model)
        p.rnn = train_rnn(p.train, p.graph, cfg.rnn).first;
    return p;
}

std::map<std::string, double> evaluate_predictors(const Pipeline& p, std::size_t ngram_order)
{
    std::map<std::string, double> acc;
    acc["uniform"] = predictor_accuracy(UniformPredictor(p.graph), p.test.trajectories);
    acc["mle"] = predictor_accuracy(MlePredictor(p.graph, fit_mle(p.train)), p.test.trajectories);
    acc["ngram"] = predictor_accuracy(NgramPredictor(p.graph, fit_ngram(p.train, ngram_order)), p.test.trajectories);
    if (p.rnn)
        acc["rnn"] = predictor_accuracy(RnnPredictor(p.graph, *p.rnn), p.test.trajectories);
    return acc;
}

BenchReport bench_pipeline(const PipelineConfig& cfg, const Pipeline& p)
{
    BenchConfig bc = cfg.bench;
    if (bc.search.window == 0)
        bc.search.window = default_window(p.train);
    MlePredictor mle(p.graph, fit_mle(p.train));
    std::optional<RnnPredictor> rnn;
    if (p.rnn)
        rnn.emplace(p.graph, *p.rnn);
    BenchReport report = run_bench(bc, p.graph, p.test, {&mle, rnn ? &*rnn : nullptr});
    report.predictor_accuracy = evaluate_predictors(p, cfg.ngram_order);
    return report;
}

std::vector<SkewPoint> skew_sweep(const PipelineConfig& cfg, const std::vector<double>& skews)
{
    if (skews.size() < 2)
        throw ConfigError("a skew sweep needs at least two skew values");
    const bool need_rnn =
        std::find(cfg.bench.executors.begin(), cfg.bench.executors.end(), Executor::tracer) != cfg.bench.executors.end();
    std::vector<SkewPoint> out;
    for (std::size_t i = 0; i < skews.size(); ++i) {
        PipelineConfig c = cfg;
        c.traj.skew = skews[i];
        c.traj.seed = derive_seed(cfg.traj.seed, i);
        c.rnn.seed = derive_seed(cfg.rnn.seed, i);
        c.bench.master_seed = derive_seed(cfg.bench.master_seed, i);
        Pipeline p = build_pipeline(c, need_rnn);
        out.push_back({skews[i], bench_pipeline(c, p)});
    }
    return out;
}

std::vector<SizePoint> size_sweep(const PipelineConfig& cfg, const std::vector<std::size_t>& sizes)
{
    if (sizes.size() < 2)
        throw ConfigError("a size sweep needs at least two network sizes");
    std::vector<SizePoint> out;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        PipelineConfig c = cfg;
        c.graph.cameras = sizes[i];
        c.traj.seed = derive_seed(cfg.traj.seed, i);
        c.rnn.seed = derive_seed(cfg.rnn.seed, i);
        Pipeline p = build_pipeline(c, true);
        SizePoint pt;
        pt.cameras = sizes[i];
        pt.accuracy = evaluate_predictors(p, cfg.ngram_order);
        pt.rnn_mle_gap = pt.accuracy.at("rnn") - pt.accuracy.at("mle");
        out.push_back(std::move(pt));
    }
    return out;
}

// ---- reports ----

ReportFormat parse_report_format(const std::string& name)
{
    if (name == "csv")
        return ReportFormat::csv;
    if (name == "jsonl")
        return ReportFormat::jsonl;
    throw ConfigError("unknown report format '" + name + "' (csv, jsonl)");
}

namespace {

std::string num(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_num(const std::string& s, std::size_t line, const char* field)
{
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DataError("report line " + std::to_string(line) + ": bad " + field + " '" + s + "'");
    return v;
}

std::int64_t parse_int(const std::string& s, std::size_t line, const char* field)
{
    std::int64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DataError("report line " + std::to_string(line) + ": bad " + field + " '" + s + "'");
    return v;
}

nlohmann::ordered_json row_to_json(const RunRow& r)
{
    nlohmann::ordered_json j;
    j["executor"] = to_string(r.executor);
    j["query_id"] = r.query_id;
    j["repeat"] = r.repeat;
    j["frames_examined"] = r.frames_examined;
    j["oracle_calls"] = r.oracle_calls;
    j["sampling_rounds"] = r.sampling_rounds;
    j["modeled_latency_s"] = r.modeled_latency_s;
    j["recall"] = r.recall;
    j["is_aggregate"] = r.is_aggregate;
    return j;
}

} // namespace

std::string format_report(std::span<const RunRow> rows, ReportFormat format, const std::string& config_json)
{
    std::string out;
    if (format == ReportFormat::csv) {
        if (!config_json.empty())
            out += "# config: " + config_json + "\n";
        out += kCsvHeader;
        out += "\n";
        for (const auto& r : rows) {
            out += to_string(r.executor) + "," + std::to_string(r.query_id) + "," + std::to_string(r.repeat) + "," +
                   num(r.frames_examined) + "," + num(r.oracle_calls) + "," + num(r.sampling_rounds) + "," +
                   num(r.modeled_latency_s) + "," + num(r.recall) + "," + (r.is_aggregate ? "1" : "0") + "\n";
        }
    } else {
        if (!config_json.empty())
            out += "{\"config\":" + config_json + "}\n";
        for (const auto& r : rows)
            out += row_to_json(r).dump() + "\n";
    }
    return out;
}

std::vector<RunRow> parse_report(const std::string& text, ReportFormat format)
{
    std::vector<RunRow> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.rfind("# ", 0) == 0)
            continue;
        RunRow r;
        if (format == ReportFormat::csv) {
            if (!header_seen) {
                if (line != kCsvHeader)
                    throw DataError("report line " + std::to_string(lineno) + ": expected header '" + kCsvHeader + "'");
                header_seen = true;
                continue;
            }
            std::vector<std::string> f;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ','))
                f.push_back(cell);
            if (f.size() != 9)
                throw DataError("report line " + std::to_string(lineno) + ": expected 9 fields, got " +
                                std::to_string(f.size()));
            try {
                r.executor = parse_executor(f[0]);
            } catch (const ConfigError& e) {
                throw DataError("report line " + std::to_string(lineno) + ": " + e.what());
            }
            r.query_id = parse_int(f[1], lineno, "query_id");
            r.repeat = parse_int(f[2], lineno, "repeat");
            r.frames_examined = parse_num(f[3], lineno, "frames_examined");
            r.oracle_calls = parse_num(f[4], lineno, "oracle_calls");
            r.sampling_rounds = parse_num(f[5], lineno, "sampling_rounds");
            r.modeled_latency_s = parse_num(f[6], lineno, "modeled_latency_s");
            r.recall = parse_num(f[7], lineno, "recall");
            if (f[8] != "0" && f[8] != "1")
                throw DataError("report line " + std::to_string(lineno) + ": is_aggregate must be 0 or 1");
            r.is_aggregate = f[8] == "1";
        } else {
            try {
                auto j = nlohmann::json::parse(line);
                if (j.contains("config"))
                    continue;
                r.executor = parse_executor(j.at("executor").get<std::string>());
                r.query_id = j.at("query_id").get<std::int64_t>();
                r.repeat = j.at("repeat").get<std::int64_t>();
                r.frames_examined = j.at("frames_examined").get<double>();
                r.oracle_calls = j.at("oracle_calls").get<double>();
                r.sampling_rounds = j.at("sampling_rounds").get<double>();
                r.modeled_latency_s = j.at("modeled_latency_s").get<double>();
                r.recall = j.at("recall").get<double>();
                r.is_aggregate = j.at("is_aggregate").get<bool>();
            } catch (const nlohmann::json::exception& e) {
                throw DataError("report line " + std::to_string(lineno) + ": " + e.what());
            } catch (const ConfigError& e) {
                throw DataError("report line " + std::to_string(lineno) + ": " + e.what());
            }
        }
        rows.push_back(r);
    }
    if (format == ReportFormat::csv && !header_seen)
        throw DataError("report has no header line");
    return rows;
}

void emit_report(const BenchReport& report, ReportFormat format, const std::filesystem::path& path,
                 const std::string& config_json)
{
    std::vector<RunRow> all = report.rows;
    all.insert(all.end(), report.aggregates.begin(), report.aggregates.end());
    detail::write_text_file(path, format_report(all, format, config_json));
}

std::vector<RunRow> load_report(const std::filesystem::path& path)
{
    const std::string text = detail::read_text_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool jsonl = first != std::string::npos && text[first] == '{';
    return parse_report(text, jsonl ? ReportFormat::jsonl : ReportFormat::csv);
}

std::string summary_json(const BenchReport& report)
{
    nlohmann::ordered_json j;
    j["search"] = {{"window", report.search.window},
                   {"alpha", report.search.alpha},
                   {"horizon", report.search.horizon},
                   {"cost_model",
                    {{"detector_cost", report.search.cost.detector_cost},
                     {"reid_cost", report.search.cost.reid_cost},
                     {"occupancy", report.search.cost.occupancy},
                     {"predictor_cost", report.search.cost.predictor_cost}}}};
    auto means = nlohmann::ordered_json::object();
    for (const auto& a : report.aggregates)
        if (a.query_id == -1)
            means[to_string(a.executor)] = {{"frames_examined", a.frames_examined},
                                            {"sampling_rounds", a.sampling_rounds},
                                            {"modeled_latency_s", a.modeled_latency_s},
                                            {"recall", a.recall}};
    j["means"] = std::move(means);
    auto speedups = nlohmann::ordered_json::array();
    for (const auto& s : report.speedups)
        speedups.push_back({{"subject", to_string(s.subject)},
                            {"baseline", to_string(s.baseline)},
                            {"latency_ratio", s.latency_ratio},
                            {"frames_ratio", s.frames_ratio}});
    j["speedups"] = std::move(speedups);
    auto cells = nlohmann::ordered_json::array();
    for (const auto& c : report.cells)
        cells.push_back({{"executor", to_string(c.executor)},
                         {"query_id", c.query_id},
                         {"mean_frames", c.mean_frames},
                         {"sd_frames", c.sd_frames},
                         {"mean_latency_s", c.mean_latency},
                         {"sd_latency_s", c.sd_latency},
                         {"mean_rounds", c.mean_rounds},
                         {"mean_recall", c.mean_recall}});
    j["cells"] = std::move(cells);
    j["predictor_accuracy"] = report.predictor_accuracy;
    auto cost = nlohmann::ordered_json::object();
    for (const auto& [name, b] : report.cost)
        cost[name] = {{"detection_s", b.detection_s},
                      {"reid_s", b.reid_s},
                      {"prediction_s", b.prediction_s},
                      {"total_s", b.total()}};
    j["cost_breakdown"] = std::move(cost);
    return j.dump(2) + "\n";
}

void validate_report(std::span<const RunRow> rows)
{
    std::vector<RunRow> detail, aggregates;
    for (const auto& r : rows)
        (r.is_aggregate ? aggregates : detail).push_back(r);
    if (detail.empty())
        throw DataError("report has no detail rows");
    for (std::size_t i = 0; i < detail.size(); ++i) {
        const auto& r = detail[i];
        if (r.recall != 1.0)
            throw DataError("detail row " + std::to_string(i) + " (" + to_string(r.executor) + ", query " +
                            std::to_string(r.query_id) + "): recall " + num(r.recall));
        if (r.frames_examined < 0 || r.sampling_rounds < 0 || r.modeled_latency_s < 0 || r.repeat < 0)
            throw DataError("detail row " + std::to_string(i) + ": negative counter");
    }
    if (!aggregates.empty()) {
        const auto expect = aggregate_rows(detail);
        auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
        for (const auto& a : aggregates) {
            auto it = std::find_if(expect.begin(), expect.end(), [&a](const RunRow& e) {
                return e.executor == a.executor && e.query_id == a.query_id;
            });
            if (it == expect.end())
                throw DataError("aggregate row (" + to_string(a.executor) + ", query " + std::to_string(a.query_id) +
                                ") has no detail rows");
            if (!close(a.frames_examined, it->frames_examined) || !close(a.oracle_calls, it->oracle_calls) ||
                !close(a.sampling_rounds, it->sampling_rounds) || !close(a.modeled_latency_s, it->modeled_latency_s) ||
                !close(a.recall, it->recall))
                throw DataError("aggregate row (" + to_string(a.executor) + ", query " + std::to_string(a.query_id) +
                                ") disagrees with its detail rows");
        }
    }
    const auto per_query = aggregate_rows(detail);
    for (const auto& o : per_query) {
        if (o.executor != Executor::oracle || o.query_id == -1)
            continue;
        for (const auto& r : detail)
            if (r.query_id == o.query_id && r.frames_examined < o.frames_examined - 1e-9 * std::max(1.0, o.frames_examined))
                throw DataError(to_string(r.executor) + " examined fewer frames than the oracle on query " +
                                std::to_string(r.query_id));
    }
}

} // namespace camsearch
