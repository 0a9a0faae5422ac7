// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include "camsearch/bench.hpp"
#include "camsearch/cli.hpp"
#include "camsearch/error.hpp"
#include "camsearch/rnn.hpp"
#include "camsearch/search.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace camsearch;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int prec = 4)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

// Shared town05 setup: 2500 trajectories, 2000 of them for training.
PipelineConfig town05_config(double skew, std::uint64_t seed)
{
    PipelineConfig cfg;
    cfg.graph = GraphPreset::town05(7);
    cfg.traj.count = 2500;
    cfg.traj.skew = skew;
    cfg.traj.seed = seed;
    cfg.train_fraction = 0.8;
    cfg.rnn.seed = seed;
    cfg.bench.num_queries = 50;
    cfg.bench.repeats = 20;
    cfg.bench.master_seed = seed;
    return cfg;
}

const Pipeline& town05_pipeline()
{
    static const Pipeline p = build_pipeline(town05_config(1.1, 7), true);
    return p;
}

// ---- 1 ----
Outcome update_exactness()
{
    auto u = update_probabilities({{7, 8, 9}, {0.1, 0.8, 0.1}}, 1, 0.75);
    const std::vector<double> expect{0.2, 0.6, 0.2};
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        worst = std::max(worst, std::abs(u.probs[i] - expect[i]));
    bool ok = worst <= 1e-12;

    Rng rng(2024);
    std::size_t violations = 0;
    for (int trial = 0; trial < 100000; ++trial) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(1, 10));
        NeighborDistribution d;
        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d.camera_ids.push_back(static_cast<CameraId>(i));
            d.probs.push_back(rng.uniform01() + 1e-6);
            z += d.probs.back();
        }
        for (auto& p : d.probs)
            p /= z;
        const auto k = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
        const double alpha = 1.0 - rng.uniform01() * 0.999;
        auto r = update_probabilities(d, k, alpha);
        double sum = 0.0;
        bool bad = false;
        for (std::size_t i = 0; i < n; ++i) {
            sum += r.probs[i];
            bad |= r.probs[i] < 0.0;
            if (n >= 2 && alpha < 1.0)
                bad |= i == k ? !(r.probs[i] < d.probs[i]) : !(r.probs[i] > d.probs[i]);
        }
        bad |= std::abs(sum - 1.0) > 1e-12;
        violations += bad ? 1 : 0;
    }
    ok &= violations == 0;
    return {ok, "worked-example max error " + std::to_string(worst) + ", randomized violations " +
                    std::to_string(violations) + "/100000"};
}

// ---- 2 and 3 share one run over 1000 queries ----
struct QuerySweep {
    std::size_t queries = 0;
    std::size_t oracle_mismatch = 0;
    std::size_t oracle_not_min = 0;
    std::map<std::string, std::size_t> recall_misses;
};

const QuerySweep& thousand_queries()
{
    static const QuerySweep s = [] {
        const auto& p = town05_pipeline();
        // Fresh held-out objects on the same network.
        TrajGenConfig tc;
        tc.count = 1000;
        tc.skew = 1.1;
        tc.seed = 1001;
        Dataset data = generate_dataset(p.graph, tc);
        MlePredictor mle(p.graph, fit_mle(p.train));
        RnnPredictor rnn(p.graph, *p.rnn);
        UniformPredictor uniform(p.graph);
        SearchConfig cfg;
        cfg.window = default_window(p.train);
        QuerySweep out;
        for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
            const auto& t = data.trajectories[i];
            Query q{t.id, t.visits.front().camera, t.visits.front().entry};
            auto oracle_r = run_query_oracle(data, q, cfg.cost);
            if (oracle_r.frames_examined != t.visits.size() - 1)
                ++out.oracle_mismatch;
            Rng r1(derive_seed(5, i)), r2(derive_seed(5, i)), r3(derive_seed(5, i));
            std::map<std::string, QueryResult> runs{
                {"naive", run_query_naive(data, p.graph, q, cfg)},
                {"graph-search", run_query_adaptive(data, p.graph, q, uniform, cfg, r1, true)},
                {"spatula", run_query_adaptive(data, p.graph, q, mle, cfg, r2, true)},
                {"tracer", run_query_adaptive(data, p.graph, q, rnn, cfg, r3, false)},
                {"oracle", oracle_r},
            };
            bool is_min = true;
            for (const auto& [name, r] : runs) {
                if (r.recall != 1.0)
                    ++out.recall_misses[name];
                is_min &= oracle_r.frames_examined <= r.frames_examined;
            }
            out.oracle_not_min += is_min ? 0 : 1;
            ++out.queries;
        }
        return out;
    }();
    return s;
}

Outcome oracle_bound()
{
    const auto& s = thousand_queries();
    return {s.queries == 1000 && s.oracle_mismatch == 0 && s.oracle_not_min == 0,
            std::to_string(s.queries) + " queries, |V'| mismatches " + std::to_string(s.oracle_mismatch) +
                ", queries where oracle is not minimal " + std::to_string(s.oracle_not_min)};
}

Outcome full_recall()
{
    const auto& s = thousand_queries();
    std::size_t misses = 0;
    std::string detail;
    for (const auto& [name, n] : s.recall_misses) {
        misses += n;
        detail += " " + name + "=" + std::to_string(n);
    }
    return {s.queries == 1000 && misses == 0,
            std::to_string(s.queries) + " queries x 5 executors, runs with recall < 1: " + std::to_string(misses) + detail};
}

// ---- 4 ----
Outcome predictor_ordering()
{
    const auto& p = town05_pipeline();
    auto acc = evaluate_predictors(p, 3);
    const double rnn = acc.at("rnn"), ngram = acc.at("ngram"), mle = acc.at("mle"), uni = acc.at("uniform");
    return {rnn >= ngram && ngram >= mle && mle > uni && rnn - mle >= 0.10,
            "train " + std::to_string(p.train.size()) + ", test " + std::to_string(p.test.trajectories.size()) +
                ": rnn " + fmt(rnn) + " ngram " + fmt(ngram) + " mle " + fmt(mle) + " uniform " + fmt(uni) +
                " (rnn-mle " + fmt(rnn - mle) + ", need >= 0.10)"};
}

// ---- 5 ----
// Straight lines across a 10x10 grid: the next camera continues the
// direction of the last hop, so it depends on the previous two cameras.
Outcome long_term_correlation()
{
    const CameraId side = 10;
    auto g = build_graph({GraphKind::grid, side * side, 3.6, 0});
    TrajGenConfig timing;
    Rng rng(55);
    std::vector<Trajectory> trajs;
    for (ObjectId id = 0; id < 1500; ++id) {
        const auto line = static_cast<CameraId>(rng.uniform_int(0, side - 1));
        const bool horizontal = rng.uniform_int(0, 1) == 1;
        const bool forward = rng.uniform_int(0, 1) == 1;
        std::vector<CameraId> path;
        for (CameraId k = 0; k < side; ++k) {
            const CameraId step = forward ? k : side - 1 - k;
            path.push_back(horizontal ? line * side + step : step * side + line);
        }
        trajs.push_back(timed_trajectory(id, path, 0, timing, rng));
    }
    auto [train, test] = split_dataset(trajs, 0.8, 9);
    RnnConfig rc;
    rc.seed = 3;
    auto [model, report] = train_rnn(train, g, rc);
    const double rnn = predictor_accuracy(RnnPredictor(g, model), test);
    const double mle = predictor_accuracy(MlePredictor(g, fit_mle(train)), test);
    return {rnn - mle >= 0.20, "rnn " + fmt(rnn) + " mle " + fmt(mle) + " (gap " + fmt(rnn - mle) + ", need >= 0.20)"};
}

// ---- 6, 7 and 11 share the skew runs ----
constexpr std::size_t kSkewSeeds = 5;

const std::vector<std::vector<SkewPoint>>& skew_runs()
{
    static const std::vector<std::vector<SkewPoint>> runs = [] {
        std::vector<std::vector<SkewPoint>> out;
        for (std::uint64_t s = 0; s < kSkewSeeds; ++s)
            out.push_back(skew_sweep(town05_config(0.0, 100 + s), {0.0, 1.6}));
        return out;
    }();
    return runs;
}

Outcome end_to_end_ordering()
{
    const BenchReport& r = skew_runs().front().back().report;
    const double tracer = r.mean_frames(Executor::tracer), spatula = r.mean_frames(Executor::spatula),
                 gs = r.mean_frames(Executor::graph_search), oracle = r.mean_frames(Executor::oracle);
    const double ratio = tracer / oracle;
    return {tracer < spatula && tracer < gs && ratio <= 5.0,
            "skew 1.6, 50x20: tracer " + fmt(tracer, 1) + " spatula " + fmt(spatula, 1) + " graph-search " +
                fmt(gs, 1) + " oracle " + fmt(oracle, 2) + "; tracer/oracle " + fmt(ratio, 1) + " (need <= 5)"};
}

Outcome skew_monotonicity()
{
    double low = 0.0, high = 0.0;
    for (const auto& run : skew_runs()) {
        low += run.front().report.speedup(Executor::tracer, Executor::graph_search)->frames_ratio / kSkewSeeds;
        high += run.back().report.speedup(Executor::tracer, Executor::graph_search)->frames_ratio / kSkewSeeds;
    }
    return {high > low, "tracer speedup over graph-search (frames, mean of " + std::to_string(kSkewSeeds) +
                            " seeds): skew 0.0 " + fmt(low, 3) + ", skew 1.6 " + fmt(high, 3)};
}

Outcome cost_ordering()
{
    std::size_t checked = 0, bad = 0;
    std::string first_bad;
    for (const auto& run : skew_runs())
        for (const auto& pt : run)
            for (const auto& [name, b] : pt.report.cost) {
                ++checked;
                if (!(b.reid_s > b.detection_s && b.detection_s > b.prediction_s)) {
                    ++bad;
                    if (first_bad.empty())
                        first_bad = " first: " + name + " reid " + fmt(b.reid_s, 2) + " det " + fmt(b.detection_s, 2) +
                                    " pred " + fmt(b.prediction_s, 2);
                }
            }
    return {checked > 0 && bad == 0, std::to_string(checked) + " executor breakdowns (occupancy " +
                                         fmt(CostModel{}.occupancy, 1) + "), out of order: " + std::to_string(bad) +
                                         first_bad};
}

// ---- 8 ----
Outcome size_trend()
{
    double gap20 = 0.0, gap80 = 0.0, uni20 = 0.0, uni80 = 0.0;
    const int seeds = 3;
    for (int s = 0; s < seeds; ++s) {
        PipelineConfig cfg;
        cfg.graph = {GraphKind::geometric, 20, 3.5, static_cast<std::uint64_t>(200 + s)};
        cfg.traj.count = 2500;
        cfg.traj.skew = 1.1;
        cfg.traj.seed = 300 + s;
        cfg.rnn.seed = 400 + s;
        auto pts = size_sweep(cfg, {20, 80});
        gap20 += pts[0].rnn_mle_gap / seeds;
        gap80 += pts[1].rnn_mle_gap / seeds;
        uni20 += pts[0].accuracy.at("uniform") / seeds;
        uni80 += pts[1].accuracy.at("uniform") / seeds;
    }
    return {gap80 >= gap20 && std::abs(uni80 - uni20) <= 0.03,
            "rnn-mle gap 20 cams " + fmt(gap20) + ", 80 cams " + fmt(gap80) + "; uniform " + fmt(uni20) + " vs " +
                fmt(uni80) + " (|diff| " + fmt(std::abs(uni80 - uni20)) + ", need <= 0.03)"};
}

// ---- 9 ----
Outcome gradient_correctness()
{
    RnnConfig cfg;
    cfg.hidden_size = 4;
    cfg.embed_size = 3;
    RnnModel m(6, cfg, 0);
    Rng rng(9);
    m.params.visit([&](const std::string&, auto& t) {
        for (Eigen::Index i = 0; i < t.size(); ++i)
            t.data()[i] = 0.5 * (2.0 * rng.uniform01() - 1.0);
    });
    const std::vector<std::vector<CameraId>> batch{{0, 5, 2, 3}, {4, 1}, {3, 3, 0, 1, 2}};
    auto lg = loss_and_gradients(m, batch);
    double worst = 0.0;
    std::string worst_name;
    std::size_t tensors = 0;
    for (const auto& [name, err] : oracle::gradient_check(m, batch, lg.gradients)) {
        ++tensors;
        if (err >= worst) {
            worst = err;
            worst_name = name;
        }
    }
    std::ostringstream os;
    os << tensors << " tensors, max relative error " << std::scientific << std::setprecision(2) << worst << " ("
       << worst_name << ", need < 1e-4)";
    return {tensors > 0 && worst < 1e-4, os.str()};
}

// ---- 10 ----
Outcome generator_fidelity()
{
    auto g = build_graph({GraphKind::geometric, 200, 7.1, 1});
    TrajGenConfig cfg;
    cfg.count = 5000;
    cfg.skew = 1.5;
    cfg.seed = 10;
    const double conc = endpoint_concentration(generate_trajectories(g, cfg), g.num_cameras());

    Rng rng(10);
    ZipfSampler z(200, 1.1);
    std::vector<double> freq(200, 0.0);
    for (int i = 0; i < 100000; ++i)
        freq[z.sample(rng)] += 1e-5;
    const double tv = oracle::total_variation(freq, oracle::zipf_mass(200, 1.1));
    return {conc >= 0.70 && tv <= 0.02, "endpoint concentration at skew 1.5 on 200 cameras " + fmt(conc) +
                                            " (need >= 0.70); Zipf TV distance " + fmt(tv) + " (need <= 0.02)"};
}

// ---- 12 ----
Outcome reproducibility()
{
    auto dir = testutil::scratch_dir("acceptance_repro");
    auto path = [&](const char* f) { return (dir / f).string(); };
    const std::vector<std::vector<std::string>> steps{
        {"gen-graph", "--preset", "town05", "--seed", "7", "-o", path("g.json")},
        {"gen-traj", "--graph", path("g.json"), "--count", "600", "--seed", "3", "-o", path("t.jsonl")},
        {"train", "--model", "mle", "--graph", path("g.json"), "--traj", path("t.jsonl"), "-o", path("mle.json")},
        {"train", "--model", "rnn", "--graph", path("g.json"), "--traj", path("t.jsonl"), "--hidden", "32", "--embed",
         "16", "--epochs", "4", "-o", path("rnn.ckpt")},
        {"bench", "--graph", path("g.json"), "--traj", path("t.jsonl"), "--mle-model", path("mle.json"),
         "--rnn-model", path("rnn.ckpt"), "--queries", "10", "--repeats", "5", "--seed", "4", "-o", path("r.csv"),
         "--summary", path("s.json")},
        {"bench", "--graph", path("g.json"), "--traj", path("t.jsonl"), "--mle-model", path("mle.json"),
         "--rnn-model", path("rnn.ckpt"), "--queries", "10", "--repeats", "5", "--seed", "4", "--format", "jsonl",
         "-o", path("r.jsonl")},
    };
    const std::vector<std::string> files{"g.json", "t.jsonl", "mle.json", "rnn.ckpt", "r.csv", "s.json", "r.jsonl"};
    auto run_all = [&] {
        std::map<std::string, std::string> bytes;
        for (const auto& args : steps) {
            std::ostringstream out, err;
            if (run_cli(args, out, err) != kExitOk)
                throw DataError("cli step " + args.front() + " failed: " + err.str());
        }
        for (const auto& f : files) {
            std::ifstream in(dir / f, std::ios::binary);
            std::stringstream ss;
            ss << in.rdbuf();
            bytes[f] = ss.str();
        }
        return bytes;
    };
    auto a = run_all();
    auto b = run_all();
    std::size_t differ = 0;
    std::string names;
    for (const auto& f : files)
        if (a[f] != b[f] || a[f].empty()) {
            ++differ;
            names += " " + f;
        }
    return {differ == 0, std::to_string(files.size()) + " artifacts compared, differing or empty: " +
                             std::to_string(differ) + names};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"probability update exactness", update_exactness},
        {"oracle lower bound", oracle_bound},
        {"full recall", full_recall},
        {"predictor ordering", predictor_ordering},
        {"long-term correlation", long_term_correlation},
        {"end-to-end ordering at high skew", end_to_end_ordering},
        {"skew monotonicity", skew_monotonicity},
        {"size sweep trend", size_trend},
        {"gradient correctness", gradient_correctness},
        {"generator fidelity", generator_fidelity},
        {"cost breakdown ordering", cost_ordering},
        {"reproducibility", reproducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << std::setw(2) << i + 1 << "] " << criteria[i].first << ": "
                  << o.detail << " (" << fmt(secs, 1) << " s)" << std::endl;
    }
    std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
