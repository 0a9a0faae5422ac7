#include "camsearch/cli.hpp"

#include "camsearch/bench.hpp"
#include "camsearch/error.hpp"
#include "camsearch/graph.hpp"
#include "camsearch/predict.hpp"
#include "camsearch/rnn.hpp"
#include "camsearch/search.hpp"
#include "camsearch/trajectory.hpp"
#include "io_util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

namespace camsearch {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::uint64_t kSplitSalt = 0x7e57;

// ---- option blocks ----

struct GenGraphOpts {
    std::string preset = "town05";
    std::size_t cameras = 0;
    double degree = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

struct GenTrajOpts {
    std::string graph;
    TrajGenConfig cfg;
    std::string out;
};

struct SplitOpts {
    double train_fraction = 0.8;
    std::uint64_t split_seed = 0;
};

struct TrainOpts {
    std::string model = "rnn";
    std::string graph;
    std::string traj;
    SplitOpts split;
    std::size_t order = 3;
    double lambda = kDefaultSmoothing;
    RnnConfig rnn;
    std::string out;
};

struct EvalOpts {
    std::string graph;
    std::string traj;
    SplitOpts split;
    std::size_t order = 3;
    std::string mle_model;
    std::string ngram_model;
    std::string rnn_model;
    std::string out;
};

struct SearchOpts {
    Frame window = 0;
    double alpha = 0.75;
    CostModel cost;
};

struct QueryOpts {
    std::string graph;
    std::string traj;
    std::string executor = "tracer";
    std::string model;
    ObjectId object = 0;
    std::optional<CameraId> source_camera;
    std::optional<Frame> source_frame;
    SplitOpts split;
    SearchOpts search;
    std::uint64_t seed = 0;
    std::string out;
};

struct BenchOpts {
    std::string graph;
    std::string traj;
    std::string mle_model;
    std::string rnn_model;
    std::string executors = "naive,graph-search,spatula,tracer,oracle";
    std::size_t queries = 50;
    std::size_t repeats = 20;
    SplitOpts split;
    SearchOpts search;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::string format = "csv";
    std::string out;
    std::string summary;
};

struct SweepOpts {
    std::string kind = "skew";
    std::string preset = "town05";
    std::size_t cameras = 0;
    double degree = 0.0;
    std::vector<double> skews{0.0, 1.6};
    std::vector<std::size_t> sizes{20, 80};
    std::size_t count = 2000;
    double skew = 1.1;
    std::string executors = "graph-search,spatula,tracer,oracle";
    std::size_t queries = 50;
    std::size_t repeats = 20;
    double train_fraction = 0.8;
    SearchOpts search;
    RnnConfig rnn;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::string out;
};

struct ValidateOpts {
    std::string kind;
    std::string path;
    std::string graph;
};

// ---- helpers ----

void add_split(CLI::App* sub, SplitOpts& s)
{
    sub->add_option("--train-fraction", s.train_fraction, "Share of trajectories used for training")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--split-seed", s.split_seed, "Seed of the train/test split (shared by train, eval and bench)");
}

void add_search(CLI::App* sub, SearchOpts& s)
{
    sub->add_option("--window", s.window, "Frames per sampling round (0: rounded mean dwell of the training split)");
    sub->add_option("--alpha", s.alpha, "Exploration factor in (0, 1]");
    sub->add_option("--detector-cost", s.cost.detector_cost, "Seconds per examined frame");
    sub->add_option("--reid-cost", s.cost.reid_cost, "Seconds per detected object");
    sub->add_option("--occupancy", s.cost.occupancy, "Objects per frame");
    sub->add_option("--predictor-cost", s.cost.predictor_cost, "Seconds per sampling round");
}

void add_rnn(CLI::App* sub, RnnConfig& r)
{
    sub->add_option("--hidden", r.hidden_size, "LSTM hidden units");
    sub->add_option("--embed", r.embed_size, "Camera embedding size");
    sub->add_option("--lr", r.learning_rate, "Adam learning rate");
    sub->add_option("--batch", r.batch_size, "Minibatch size");
    sub->add_option("--epochs", r.max_epochs, "Maximum training epochs");
    sub->add_option("--patience", r.patience, "Early-stopping patience in epochs");
    sub->add_option("--clip", r.clip_norm, "Global gradient-norm clip");
}

GraphPreset make_preset(const std::string& name, std::size_t cameras, double degree, std::uint64_t seed)
{
    GraphPreset p;
    p.kind = parse_graph_kind(name);
    p.seed = seed;
    switch (p.kind) {
    case GraphKind::town05:
        p = GraphPreset::town05(seed);
        break;
    case GraphKind::town07:
        p = GraphPreset::town07(seed);
        break;
    case GraphKind::geometric:
        p.cameras = 200;
        p.degree = 7.1;
        break;
    case GraphKind::grid:
        p.cameras = 25;
        p.degree = 3.2;
        break;
    }
    if (cameras > 0)
        p.cameras = cameras;
    if (degree > 0.0)
        p.degree = degree;
    return p;
}

struct Loaded {
    CameraGraph graph;
    Dataset dataset;
};

Loaded load_inputs(const std::string& graph_path, const std::string& traj_path)
{
    Loaded l;
    l.graph = load_graph(graph_path);
    l.dataset = load_dataset(traj_path);
    validate_dataset(l.graph, l.dataset);
    return l;
}

std::pair<std::vector<Trajectory>, Dataset> split(const Dataset& d, const SplitOpts& s)
{
    auto [train, test] = split_dataset(d.trajectories, s.train_fraction, derive_seed(s.split_seed, kSplitSalt));
    Dataset t;
    t.graph_checksum = d.graph_checksum;
    t.horizon = d.horizon;
    t.trajectories = std::move(test);
    t.reindex();
    return {std::move(train), std::move(t)};
}

void check_checksum(std::uint64_t model, const CameraGraph& g, const std::string& what)
{
    if (model != 0 && model != g.checksum())
        throw DataError(what + " graph checksum " + checksum_hex(model) + " does not match graph " +
                        checksum_hex(g.checksum()));
}

MlePredictor load_mle_predictor(const std::string& path, const CameraGraph& g)
{
    auto m = load_mle(path);
    check_checksum(m.graph_checksum, g, path);
    return MlePredictor(g, std::move(m.counts), m.lambda);
}

void write_output(const std::string& path, const std::string& data, std::ostream& out)
{
    if (path.empty() || path == "-")
        out << data;
    else
        detail::write_text_file(path, data);
}

// Resolved option values of one subcommand, for the diagnostic echo and report headers.
Json resolved_config(const CLI::App* sub)
{
    Json j;
    j["command"] = sub->get_name();
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "config")
            continue;
        auto results = opt->results();
        if (!results.empty())
            j[name] = results.back();
        else if (!opt->get_default_str().empty())
            j[name] = opt->get_default_str();
    }
    return j;
}

// Turns a JSON defaults file into "--key value" tokens for the chosen
// subcommand. Top-level keys apply when the subcommand has that option;
// keys inside an object named after the subcommand must all exist.
std::vector<std::string> config_tokens(const std::string& path, const CLI::App* sub)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(detail::read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("config " + path + ": " + e.what());
    }
    if (!doc.is_object())
        throw DataError("config " + path + ": expected a JSON object");
    std::vector<std::string> tokens;
    auto emit = [&tokens](const std::string& key, const nlohmann::json& v) {
        std::string value;
        if (v.is_string())
            value = v.get<std::string>();
        else if (v.is_array()) {
            for (std::size_t i = 0; i < v.size(); ++i)
                value += (i ? "," : "") + (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
        } else
            value = v.dump();
        tokens.push_back("--" + key);
        tokens.push_back(value);
    };
    for (const auto& [key, v] : doc.items()) {
        if (v.is_object()) {
            if (key != sub->get_name())
                continue;
            for (const auto& [k2, v2] : v.items())
                emit(k2, v2);
        } else if (sub->get_option_no_throw("--" + key) != nullptr) {
            emit(key, v);
        }
    }
    return tokens;
}

template <typename T>
std::vector<T> parse_list(const std::string& csv, const char* what)
{
    std::vector<T> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        try {
            if constexpr (std::is_same_v<T, double>)
                out.push_back(std::stod(item));
            else
                out.push_back(static_cast<T>(std::stoull(item)));
        } catch (const std::exception&) {
            throw ConfigError(std::string("bad ") + what + " entry '" + item + "'");
        }
    }
    return out;
}

// ---- subcommands ----

void cmd_gen_graph(const GenGraphOpts& o, std::ostream& out)
{
    CameraGraph g = build_graph(make_preset(o.preset, o.cameras, o.degree, o.seed));
    write_output(o.out, graph_to_json(g), out);
}

void cmd_gen_traj(const GenTrajOpts& o, std::ostream& out)
{
    CameraGraph g = load_graph(o.graph);
    write_output(o.out, dataset_to_jsonl(generate_dataset(g, o.cfg)), out);
}

void cmd_train(const TrainOpts& o, std::ostream& out, std::ostream& err)
{
    auto in = load_inputs(o.graph, o.traj);
    auto [train, test] = split(in.dataset, o.split);
    if (o.model == "mle") {
        MleModelFile m{fit_mle(train), o.lambda, in.graph.checksum()};
        write_output(o.out, mle_to_json(m), out);
    } else if (o.model == "ngram") {
        NgramModelFile m{fit_ngram(train, o.order), o.lambda, in.graph.checksum()};
        write_output(o.out, ngram_to_json(m), out);
    } else if (o.model == "rnn") {
        if (o.out.empty())
            throw ConfigError("rnn checkpoints are binary; pass -o PATH");
        auto [model, report] = train_rnn(train, in.graph, o.rnn);
        save_model(model, o.out);
        err << "trained " << report.epochs_run << " epochs, best epoch " << report.best_epoch
            << ", validation accuracy " << report.validation_accuracy[report.best_epoch - 1] << "\n";
    } else {
        throw ConfigError("unknown model type '" + o.model + "' (mle, ngram, rnn)");
    }
}

void cmd_eval(const EvalOpts& o, std::ostream& out)
{
    auto in = load_inputs(o.graph, o.traj);
    auto [train, test] = split(in.dataset, o.split);
    Json acc;
    acc["uniform"] = predictor_accuracy(UniformPredictor(in.graph), test.trajectories);
    if (o.mle_model.empty())
        acc["mle"] = predictor_accuracy(MlePredictor(in.graph, fit_mle(train)), test.trajectories);
    else
        acc["mle"] = predictor_accuracy(load_mle_predictor(o.mle_model, in.graph), test.trajectories);
    if (o.ngram_model.empty()) {
        acc["ngram"] = predictor_accuracy(NgramPredictor(in.graph, fit_ngram(train, o.order)), test.trajectories);
    } else {
        auto m = load_ngram(o.ngram_model);
        check_checksum(m.graph_checksum, in.graph, o.ngram_model);
        acc["ngram"] = predictor_accuracy(NgramPredictor(in.graph, std::move(m.model), m.lambda), test.trajectories);
    }
    if (!o.rnn_model.empty())
        acc["rnn"] = predictor_accuracy(RnnPredictor(in.graph, load_model(o.rnn_model, in.graph)), test.trajectories);
    Json doc;
    doc["test_trajectories"] = test.trajectories.size();
    doc["accuracy"] = std::move(acc);
    write_output(o.out, doc.dump(2) + "\n", out);
}

SearchConfig make_search(const SearchOpts& s, const std::vector<Trajectory>& train)
{
    SearchConfig c;
    c.window = s.window > 0 ? s.window : default_window(train);
    c.alpha = s.alpha;
    c.cost = s.cost;
    return c;
}

void cmd_query(const QueryOpts& o, std::ostream& out)
{
    auto in = load_inputs(o.graph, o.traj);
    auto [train, test] = split(in.dataset, o.split);
    const Trajectory* t = in.dataset.find(o.object);
    if (t == nullptr)
        throw DataError("object " + std::to_string(o.object) + " is not in " + o.traj);
    Query q{o.object, o.source_camera.value_or(t->visits.front().camera),
            o.source_frame.value_or(t->visits.front().entry)};
    SearchConfig sc = make_search(o.search, train);
    Rng rng(o.seed);
    const Executor e = parse_executor(o.executor);
    QueryResult r;
    switch (e) {
    case Executor::naive:
        r = run_query_naive(in.dataset, in.graph, q, sc);
        break;
    case Executor::oracle:
        r = run_query_oracle(in.dataset, q, sc.cost);
        break;
    case Executor::graph_search:
        r = run_query_adaptive(in.dataset, in.graph, q, UniformPredictor(in.graph), sc, rng, true);
        break;
    case Executor::spatula: {
        MlePredictor p = o.model.empty() ? MlePredictor(in.graph, fit_mle(train)) : load_mle_predictor(o.model, in.graph);
        r = run_query_adaptive(in.dataset, in.graph, q, p, sc, rng, true);
        break;
    }
    case Executor::tracer:
        if (o.model.empty())
            throw ConfigError("tracer needs --model CHECKPOINT");
        r = run_query_adaptive(in.dataset, in.graph, q, RnnPredictor(in.graph, load_model(o.model, in.graph)), sc,
                               rng, false);
        break;
    }
    Json doc;
    doc["executor"] = to_string(e);
    doc["object_id"] = q.object_id;
    doc["source_camera"] = q.source_camera;
    doc["source_frame"] = q.source_frame;
    auto sightings = Json::array();
    for (const auto& s : r.sightings)
        sightings.push_back({{"camera", s.camera}, {"frame", s.frame}});
    doc["sightings"] = std::move(sightings);
    doc["frames_examined"] = r.frames_examined;
    doc["oracle_calls"] = r.oracle_calls;
    doc["sampling_rounds"] = r.sampling_rounds;
    doc["modeled_latency_s"] = r.modeled_latency;
    doc["recall"] = r.recall;
    write_output(o.out, doc.dump(2) + "\n", out);
}

void cmd_bench(const BenchOpts& o, const std::string& config_json, std::ostream& out)
{
    auto in = load_inputs(o.graph, o.traj);
    auto [train, test] = split(in.dataset, o.split);
    BenchConfig bc;
    bc.executors = parse_executor_list(o.executors);
    bc.num_queries = o.queries;
    bc.repeats = o.repeats;
    bc.master_seed = o.seed;
    bc.jobs = o.jobs;
    bc.search = make_search(o.search, train);

    std::optional<MlePredictor> mle;
    std::optional<RnnPredictor> rnn;
    auto wants = [&bc](Executor e) { return std::find(bc.executors.begin(), bc.executors.end(), e) != bc.executors.end(); };
    if (wants(Executor::spatula))
        mle.emplace(o.mle_model.empty() ? MlePredictor(in.graph, fit_mle(train))
                                        : load_mle_predictor(o.mle_model, in.graph));
    if (wants(Executor::tracer)) {
        if (o.rnn_model.empty())
            throw ConfigError("tracer needs --rnn-model CHECKPOINT");
        rnn.emplace(in.graph, load_model(o.rnn_model, in.graph));
    }
    BenchReport report = run_bench(bc, in.graph, test, {mle ? &*mle : nullptr, rnn ? &*rnn : nullptr});
    if (mle)
        report.predictor_accuracy["mle"] = predictor_accuracy(*mle, test.trajectories);
    if (rnn)
        report.predictor_accuracy["rnn"] = predictor_accuracy(*rnn, test.trajectories);

    const ReportFormat fmt = parse_report_format(o.format);
    std::vector<RunRow> all = report.rows;
    all.insert(all.end(), report.aggregates.begin(), report.aggregates.end());
    write_output(o.out, format_report(all, fmt, config_json), out);
    if (!o.summary.empty())
        detail::write_text_file(o.summary, summary_json(report));
}

void cmd_sweep(const SweepOpts& o, const std::string& config_json, std::ostream& out)
{
    PipelineConfig pc;
    pc.graph = make_preset(o.preset, o.cameras, o.degree, o.seed);
    pc.traj.count = o.count;
    pc.traj.skew = o.skew;
    pc.traj.seed = derive_seed(o.seed, 1);
    pc.train_fraction = o.train_fraction;
    pc.rnn = o.rnn;
    pc.rnn.seed = derive_seed(o.seed, 2);
    pc.bench.executors = parse_executor_list(o.executors);
    pc.bench.num_queries = o.queries;
    pc.bench.repeats = o.repeats;
    pc.bench.master_seed = derive_seed(o.seed, 3);
    pc.bench.jobs = o.jobs;
    pc.bench.search.window = o.search.window;
    pc.bench.search.alpha = o.search.alpha;
    pc.bench.search.cost = o.search.cost;

    std::ostringstream csv;
    csv << "# config: " << config_json << "\n";
    if (o.kind == "skew") {
        if (o.skews.size() < 2)
            throw ConfigError("a skew sweep needs at least two --skews values");
        csv << "skew,executor,mean_frames_examined,mean_sampling_rounds,mean_modeled_latency_s,"
               "latency_speedup_vs_graph_search,frames_speedup_vs_graph_search\n";
        for (const auto& pt : skew_sweep(pc, o.skews)) {
            for (Executor e : pc.bench.executors) {
                const auto agg = std::find_if(pt.report.aggregates.begin(), pt.report.aggregates.end(),
                                              [e](const RunRow& r) { return r.executor == e && r.query_id == -1; });
                auto sp = pt.report.speedup(e, Executor::graph_search);
                csv << pt.skew << "," << to_string(e) << "," << agg->frames_examined << "," << agg->sampling_rounds
                    << "," << agg->modeled_latency_s << "," << (sp ? sp->latency_ratio : 1.0) << ","
                    << (sp ? sp->frames_ratio : 1.0) << "\n";
            }
        }
    } else if (o.kind == "size") {
        if (o.sizes.size() < 2)
            throw ConfigError("a size sweep needs at least two --sizes values");
        csv << "cameras,predictor,accuracy\n";
        for (const auto& pt : size_sweep(pc, o.sizes))
            for (const auto& [name, acc] : pt.accuracy)
                csv << pt.cameras << "," << name << "," << acc << "\n";
    } else {
        throw ConfigError("unknown sweep kind '" + o.kind + "' (skew, size)");
    }
    write_output(o.out, csv.str(), out);
}

bool is_checkpoint(const std::string& bytes) { return bytes.rfind(std::string("CSRNNCK\0", 8), 0) == 0; }

void cmd_validate(const ValidateOpts& o, std::ostream& out)
{
    std::optional<CameraGraph> g;
    if (!o.graph.empty())
        g = load_graph(o.graph);
    if (o.kind == "graph") {
        CameraGraph graph = load_graph(o.path);
        out << "graph ok: " << graph.num_cameras() << " cameras, " << graph.num_edges() << " edges, checksum "
            << checksum_hex(graph.checksum()) << "\n";
    } else if (o.kind == "traj") {
        Dataset d = load_dataset(o.path);
        if (!g)
            throw ConfigError("validating trajectories needs --graph");
        validate_dataset(*g, d);
        std::size_t visits = 0;
        for (const auto& t : d.trajectories)
            visits += t.visits.size();
        out << "traj ok: " << d.trajectories.size() << " trajectories, " << visits << " visits, horizon "
            << d.horizon << "\n";
    } else if (o.kind == "model") {
        const std::string bytes = detail::read_text_file(o.path);
        std::uint64_t checksum = 0;
        std::string type;
        if (is_checkpoint(bytes)) {
            RnnModel m = deserialize_model(bytes);
            checksum = m.graph_checksum();
            type = "rnn";
            if (g && m.num_cameras() != g->num_cameras())
                throw DataError(o.path + ": model has " + std::to_string(m.num_cameras()) + " cameras, graph has " +
                                std::to_string(g->num_cameras()));
        } else {
            nlohmann::json doc;
            try {
                doc = nlohmann::json::parse(bytes);
            } catch (const nlohmann::json::parse_error& e) {
                throw DataError(o.path + ": " + e.what());
            }
            type = doc.is_object() ? doc.value("type", "") : "";
            if (type == "mle")
                checksum = mle_from_json(bytes).graph_checksum;
            else if (type == "ngram")
                checksum = ngram_from_json(bytes).graph_checksum;
            else
                throw DataError(o.path + ": field 'type' must be mle, ngram, or the file an rnn checkpoint");
        }
        if (g)
            check_checksum(checksum, *g, o.path);
        out << "model ok: " << type << ", graph checksum " << checksum_hex(checksum) << "\n";
    } else if (o.kind == "report") {
        auto rows = load_report(o.path);
        validate_report(rows);
        out << "report ok: " << rows.size() << " rows\n";
    } else {
        throw ConfigError("unknown kind '" + o.kind + "' (graph, traj, model, report)");
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Camera-network object re-identification search engine", "camsearch"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
    std::string config_path;

    auto add_common = [&config_path](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON file of option defaults; flags override it");
    };

    GenGraphOpts gg;
    auto* s_gg = app.add_subcommand("gen-graph", "Generate a camera graph");
    s_gg->add_option("--preset", gg.preset, "grid, geometric, town05 or town07")
        ->check(CLI::IsMember({"grid", "geometric", "town05", "town07"}));
    s_gg->add_option("--cameras", gg.cameras, "Vertex count (0: preset default)");
    s_gg->add_option("--degree", gg.degree, "Target average degree (0: preset default)");
    s_gg->add_option("--seed", gg.seed, "Generation seed");
    s_gg->add_option("-o,--out", gg.out, "Output graph file (default: stdout)");

    GenTrajOpts gt;
    auto* s_gt = app.add_subcommand("gen-traj", "Generate ground-truth trajectories");
    s_gt->add_option("--graph", gt.graph, "Graph file")->required();
    s_gt->add_option("--count", gt.cfg.count, "Number of trajectories");
    s_gt->add_option("--skew", gt.cfg.skew, "Zipf exponent of source/destination hotspots");
    s_gt->add_option("--horizon", gt.cfg.horizon, "Video length in frames (0: derived from the graph)");
    s_gt->add_option("--dwell-min", gt.cfg.dwell_min, "Minimum frames per camera visit");
    s_gt->add_option("--dwell-max", gt.cfg.dwell_max, "Maximum frames per camera visit");
    s_gt->add_option("--travel-min", gt.cfg.travel_min, "Minimum frames between cameras");
    s_gt->add_option("--travel-max", gt.cfg.travel_max, "Maximum frames between cameras");
    s_gt->add_option("--min-path-len", gt.cfg.min_path_len, "Minimum hops per trajectory");
    s_gt->add_option("--seed", gt.cfg.seed, "Generation seed");
    s_gt->add_option("-o,--out", gt.out, "Output trajectory file (default: stdout)");

    TrainOpts tr;
    auto* s_tr = app.add_subcommand("train", "Fit a next-camera predictor on the training split");
    s_tr->add_option("--model", tr.model, "mle, ngram or rnn")->check(CLI::IsMember({"mle", "ngram", "rnn"}));
    s_tr->add_option("--graph", tr.graph, "Graph file")->required();
    s_tr->add_option("--traj", tr.traj, "Trajectory file")->required();
    add_split(s_tr, tr.split);
    s_tr->add_option("--order", tr.order, "n-gram order");
    s_tr->add_option("--lambda", tr.lambda, "Additive smoothing for count models");
    add_rnn(s_tr, tr.rnn);
    s_tr->add_option("--seed", tr.rnn.seed, "Training seed");
    s_tr->add_option("-o,--out", tr.out, "Output model file");

    EvalOpts ev;
    auto* s_ev = app.add_subcommand("eval-predictor", "Top-1 next-camera accuracy on the test split");
    s_ev->add_option("--graph", ev.graph, "Graph file")->required();
    s_ev->add_option("--traj", ev.traj, "Trajectory file")->required();
    add_split(s_ev, ev.split);
    s_ev->add_option("--order", ev.order, "n-gram order when fitting on the fly");
    s_ev->add_option("--mle-model", ev.mle_model, "Saved MLE model (default: fit on the training split)");
    s_ev->add_option("--ngram-model", ev.ngram_model, "Saved n-gram model (default: fit on the training split)");
    s_ev->add_option("--rnn-model", ev.rnn_model, "RNN checkpoint");
    s_ev->add_option("-o,--out", ev.out, "Output JSON (default: stdout)");

    QueryOpts qo;
    auto* s_q = app.add_subcommand("query", "Run one re-identification query");
    s_q->add_option("--graph", qo.graph, "Graph file")->required();
    s_q->add_option("--traj", qo.traj, "Trajectory file")->required();
    s_q->add_option("--executor", qo.executor, "naive, graph-search, spatula, tracer or oracle");
    s_q->add_option("--model", qo.model, "MLE model (spatula) or RNN checkpoint (tracer)");
    s_q->add_option("--object", qo.object, "Query object id")->required();
    s_q->add_option("--source-camera", qo.source_camera, "Source camera (default: first visit)");
    s_q->add_option("--source-frame", qo.source_frame, "Source frame (default: first visit entry)");
    add_split(s_q, qo.split);
    add_search(s_q, qo.search);
    s_q->add_option("--seed", qo.seed, "Sampling seed");
    s_q->add_option("-o,--out", qo.out, "Output JSON (default: stdout)");

    BenchOpts bo;
    auto* s_b = app.add_subcommand("bench", "Compare executors over sampled test queries");
    s_b->add_option("--graph", bo.graph, "Graph file")->required();
    s_b->add_option("--traj", bo.traj, "Trajectory file")->required();
    s_b->add_option("--mle-model", bo.mle_model, "MLE model for spatula (default: fit on the training split)");
    s_b->add_option("--rnn-model", bo.rnn_model, "RNN checkpoint for tracer");
    s_b->add_option("--executors", bo.executors, "Comma-separated executors");
    s_b->add_option("--queries", bo.queries, "Number of queries");
    s_b->add_option("--repeats", bo.repeats, "Runs per query");
    add_split(s_b, bo.split);
    add_search(s_b, bo.search);
    s_b->add_option("--seed", bo.seed, "Master seed for query sampling and runs");
    s_b->add_option("--jobs", bo.jobs, "Worker threads")->check(CLI::PositiveNumber);
    s_b->add_option("--format", bo.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    s_b->add_option("-o,--out", bo.out, "Report file (default: stdout)");
    s_b->add_option("--summary", bo.summary, "Summary JSON file (speedups, spread, cost breakdown)");

    SweepOpts so;
    std::string skews_csv, sizes_csv;
    auto* s_s = app.add_subcommand("sweep", "Skew or network-size sweep over generated pipelines");
    s_s->add_option("--kind", so.kind, "skew or size")->check(CLI::IsMember({"skew", "size"}));
    s_s->add_option("--preset", so.preset, "Graph preset")->check(CLI::IsMember({"grid", "geometric", "town05", "town07"}));
    s_s->add_option("--cameras", so.cameras, "Vertex count (0: preset default)");
    s_s->add_option("--degree", so.degree, "Target average degree (0: preset default)");
    s_s->add_option("--skews", skews_csv, "Comma-separated skews (kind=skew)");
    s_s->add_option("--sizes", sizes_csv, "Comma-separated camera counts (kind=size)");
    s_s->add_option("--count", so.count, "Trajectories per dataset");
    s_s->add_option("--skew", so.skew, "Skew for size sweeps");
    s_s->add_option("--executors", so.executors, "Comma-separated executors (kind=skew)");
    s_s->add_option("--queries", so.queries, "Queries per point");
    s_s->add_option("--repeats", so.repeats, "Runs per query");
    s_s->add_option("--train-fraction", so.train_fraction, "Share of trajectories used for training");
    add_search(s_s, so.search);
    add_rnn(s_s, so.rnn);
    s_s->add_option("--seed", so.seed, "Master seed");
    s_s->add_option("--jobs", so.jobs, "Worker threads")->check(CLI::PositiveNumber);
    s_s->add_option("-o,--out", so.out, "Output CSV (default: stdout)");

    ValidateOpts vo;
    auto* s_v = app.add_subcommand("validate", "Check a file against its invariants");
    s_v->add_option("--kind", vo.kind, "graph, traj, model or report")
        ->required()
        ->check(CLI::IsMember({"graph", "traj", "model", "report"}));
    s_v->add_option("path", vo.path, "File to check")->required();
    s_v->add_option("--graph", vo.graph, "Graph file for checksum and adjacency checks");

    for (auto* sub : app.get_subcommands({}))
        add_common(sub);

    try {
        // Splice defaults from --config in right after the subcommand name so
        // that later command-line flags take precedence.
        std::vector<std::string> argv = args;
        auto sub_it = std::find_if(argv.begin(), argv.end(),
                                   [&app](const std::string& a) { return app.get_subcommand_no_throw(a) != nullptr; });
        if (sub_it != argv.end()) {
            std::string path;
            for (std::size_t i = 0; i < argv.size(); ++i) {
                if (argv[i] == "--config" && i + 1 < argv.size())
                    path = argv[i + 1];
                else if (argv[i].rfind("--config=", 0) == 0)
                    path = argv[i].substr(9);
            }
            if (!path.empty()) {
                auto tokens = config_tokens(path, app.get_subcommand(*sub_it));
                argv.insert(sub_it + 1, tokens.begin(), tokens.end());
            }
        }
        std::reverse(argv.begin(), argv.end());
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string config_json = resolved_config(sub).dump();
    err << "config: " << config_json << "\n";

    try {
        if (sub == s_gg)
            cmd_gen_graph(gg, out);
        else if (sub == s_gt)
            cmd_gen_traj(gt, out);
        else if (sub == s_tr)
            cmd_train(tr, out, err);
        else if (sub == s_ev)
            cmd_eval(ev, out);
        else if (sub == s_q)
            cmd_query(qo, out);
        else if (sub == s_b)
            cmd_bench(bo, config_json, out);
        else if (sub == s_s) {
            if (!skews_csv.empty())
                so.skews = parse_list<double>(skews_csv, "skew");
            if (!sizes_csv.empty())
                so.sizes = parse_list<std::size_t>(sizes_csv, "size");
            cmd_sweep(so, config_json, out);
        } else if (sub == s_v)
            cmd_validate(vo, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

} // namespace camsearch
