#include "camsearch/trajectory.hpp"

#include "camsearch/error.hpp"
#include "io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace camsearch {

std::vector<CameraId> Trajectory::cameras() const
{
    std::vector<CameraId> out;
    out.reserve(visits.size());
    for (const auto& v : visits)
        out.push_back(v.camera);
    return out;
}

const Trajectory* Dataset::find(ObjectId id) const
{
    if (index_.size() == trajectories.size()) {
        auto it = index_.find(id);
        return it == index_.end() ? nullptr : &trajectories[it->second];
    }
    // Stale index (trajectories edited after reindex()); fall back to a scan.
    auto it = std::find_if(trajectories.begin(), trajectories.end(), [id](const Trajectory& t) { return t.id == id; });
    return it == trajectories.end() ? nullptr : &*it;
}

void Dataset::reindex()
{
    index_.clear();
    for (std::size_t i = 0; i < trajectories.size(); ++i)
        index_.emplace(trajectories[i].id, i);
}

ZipfSampler::ZipfSampler(std::size_t n, double s)
{
    if (n == 0)
        throw ConfigError("zipf sampler needs at least one category");
    if (!(s >= 0.0))
        throw ConfigError("zipf exponent must be >= 0");
    cdf_.resize(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        total += std::pow(static_cast<double>(k + 1), -s);
        cdf_[k] = total;
    }
    for (auto& c : cdf_)
        c /= total;
    cdf_.back() = 1.0;
}

std::size_t ZipfSampler::sample(Rng& rng) const
{
    double u = rng.uniform01();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
}

double ZipfSampler::probability(std::size_t k) const
{
    return k == 0 ? cdf_[0] : cdf_[k] - cdf_[k - 1];
}

std::size_t zipf_sample(std::size_t n, double s, Rng& rng) { return ZipfSampler(n, s).sample(rng); }

Trajectory timed_trajectory(ObjectId id, const std::vector<CameraId>& path, Frame start, const TrajGenConfig& cfg,
                            Rng& rng)
{
    Trajectory t;
    t.id = id;
    Frame cursor = start;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0)
            cursor += rng.uniform_int(cfg.travel_min, cfg.travel_max);
        Frame dwell = rng.uniform_int(cfg.dwell_min, cfg.dwell_max);
        t.visits.push_back({path[i], cursor, cursor + dwell - 1});
        cursor += dwell;
    }
    return t;
}

namespace {

void check_config(const TrajGenConfig& cfg)
{
    if (cfg.dwell_min < 1 || cfg.dwell_max < cfg.dwell_min)
        throw ConfigError("dwell range must satisfy 1 <= dwell_min <= dwell_max");
    if (cfg.travel_min < 0 || cfg.travel_max < cfg.travel_min)
        throw ConfigError("travel range must satisfy 0 <= travel_min <= travel_max");
    if (cfg.min_path_len < 2)
        throw ConfigError("min_path_len must be >= 2");
    if (!(cfg.skew >= 0.0))
        throw ConfigError("skew must be >= 0");
    if (cfg.horizon < 0)
        throw ConfigError("horizon must be >= 0");
}

} // namespace

Frame resolve_horizon(const CameraGraph& g, const TrajGenConfig& cfg)
{
    check_config(cfg);
    const Frame hops = diameter(g);
    const Frame longest = (hops + 1) * cfg.dwell_max + hops * cfg.travel_max;
    if (cfg.horizon == 0) {
        Frame t = (4 * longest + 2) / 3 + 1;
        while (t - t / 4 < longest)
            ++t;
        return t;
    }
    if (cfg.horizon - cfg.horizon / 4 < longest)
        throw ConfigError("horizon " + std::to_string(cfg.horizon) + " cannot hold a " + std::to_string(hops) +
                          "-hop trajectory starting as late as T/4 (needs " + std::to_string(longest) +
                          " frames after the latest start)");
    return cfg.horizon;
}

std::vector<Trajectory> generate_trajectories(const CameraGraph& g, const TrajGenConfig& cfg)
{
    const Frame horizon = resolve_horizon(g, cfg);
    const std::size_t n = g.num_cameras();
    Rng rng(cfg.seed);

    std::vector<CameraId> sources(n), destinations(n);
    std::iota(sources.begin(), sources.end(), 0);
    std::iota(destinations.begin(), destinations.end(), 0);
    rng.shuffle(std::span<CameraId>(sources));
    rng.shuffle(std::span<CameraId>(destinations));
    const ZipfSampler zipf(n, cfg.skew);

    std::vector<std::optional<BfsTree>> trees(n);
    std::vector<Trajectory> out;
    out.reserve(cfg.count);
    const std::size_t max_attempts = 10 * std::max<std::size_t>(cfg.count, 1);
    std::size_t attempts = 0;
    while (out.size() < cfg.count) {
        if (attempts++ >= max_attempts)
            throw DataError("could not draw " + std::to_string(cfg.count) + " trajectories with >= " +
                            std::to_string(cfg.min_path_len) + " hops in " + std::to_string(max_attempts) +
                            " attempts");
        CameraId src = sources[zipf.sample(rng)];
        CameraId dst = destinations[zipf.sample(rng)];
        if (src == dst)
            continue;
        if (!trees[src])
            trees[src] = bfs_tree(g, src);
        if (trees[src]->distance[dst] < cfg.min_path_len)
            continue;
        auto path = trees[src]->path_to(dst);
        Frame start = rng.uniform_int(0, horizon / 4);
        out.push_back(timed_trajectory(static_cast<ObjectId>(out.size()), path, start, cfg, rng));
    }
    return out;
}

Dataset generate_dataset(const CameraGraph& g, const TrajGenConfig& cfg)
{
    Dataset d;
    d.graph_checksum = g.checksum();
    d.horizon = resolve_horizon(g, cfg);
    d.trajectories = generate_trajectories(g, cfg);
    d.reindex();
    return d;
}

double endpoint_concentration(const std::vector<Trajectory>& trajs, std::size_t num_cameras)
{
    if (trajs.empty())
        throw ConfigError("endpoint concentration of an empty trajectory set");
    std::vector<std::size_t> hits(num_cameras, 0);
    std::size_t total = 0;
    for (const auto& t : trajs) {
        if (t.visits.empty())
            continue;
        for (CameraId c : {t.visits.front().camera, t.visits.back().camera}) {
            if (c >= num_cameras)
                throw DataError("trajectory " + std::to_string(t.id) + " references camera " + std::to_string(c));
            ++hits[c];
            ++total;
        }
    }
    if (total == 0)
        return 0.0;
    std::sort(hits.begin(), hits.end(), std::greater<>());
    const std::size_t slots = std::clamp<std::size_t>((num_cameras + 9) / 10, 1, num_cameras);
    std::size_t top = std::accumulate(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(slots), std::size_t{0});
    return static_cast<double>(top) / static_cast<double>(total);
}

std::pair<std::vector<Trajectory>, std::vector<Trajectory>> split_dataset(const std::vector<Trajectory>& trajs,
                                                                          double train_fraction, std::uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("train fraction must lie in (0, 1)");
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(trajs.size())));
    if (n_train == 0 || n_train >= trajs.size())
        throw ConfigError("train fraction " + std::to_string(train_fraction) + " leaves an empty side for " +
                          std::to_string(trajs.size()) + " trajectories");
    std::vector<std::size_t> order(trajs.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));
    std::pair<std::vector<Trajectory>, std::vector<Trajectory>> out;
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < n_train ? out.first : out.second).push_back(trajs[order[i]]);
    return out;
}

double mean_dwell(const std::vector<Trajectory>& trajs)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& t : trajs) {
        for (const auto& v : t.visits) {
            sum += static_cast<double>(v.exit - v.entry + 1);
            ++n;
        }
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

void validate_trajectory(const CameraGraph& g, const Trajectory& t, Frame horizon)
{
    auto fail = [&t](const std::string& what) {
        throw DataError("trajectory " + std::to_string(t.id) + ": " + what);
    };
    if (t.visits.empty())
        fail("has no visits");
    for (std::size_t i = 0; i < t.visits.size(); ++i) {
        const auto& v = t.visits[i];
        if (v.camera >= g.num_cameras())
            fail("visit " + std::to_string(i) + " references unknown camera " + std::to_string(v.camera));
        if (v.entry < 0 || v.exit < v.entry)
            fail("visit " + std::to_string(i) + " has an invalid interval [" + std::to_string(v.entry) + ", " +
                 std::to_string(v.exit) + "]");
        if (horizon > 0 && v.exit >= horizon)
            fail("visit " + std::to_string(i) + " ends at frame " + std::to_string(v.exit) + " beyond horizon " +
                 std::to_string(horizon));
        if (i == 0)
            continue;
        const auto& prev = t.visits[i - 1];
        if (prev.camera == v.camera)
            fail("repeats camera " + std::to_string(v.camera) + " at visits " + std::to_string(i - 1) + "," +
                 std::to_string(i));
        if (!g.adjacent(prev.camera, v.camera))
            fail("hop " + std::to_string(prev.camera) + "->" + std::to_string(v.camera) + " is not a graph edge");
        if (prev.exit >= v.entry)
            fail("visit " + std::to_string(i) + " overlaps the previous interval");
    }
}

void validate_dataset(const CameraGraph& g, const Dataset& d)
{
    if (d.graph_checksum != 0 && d.graph_checksum != g.checksum())
        throw DataError("dataset graph checksum " + checksum_hex(d.graph_checksum) + " does not match graph " +
                        checksum_hex(g.checksum()));
    for (const auto& t : d.trajectories)
        validate_trajectory(g, t, d.horizon);
}

std::string trajectory_to_json(const Trajectory& t)
{
    nlohmann::ordered_json doc;
    doc["id"] = t.id;
    auto visits = nlohmann::ordered_json::array();
    for (const auto& v : t.visits) {
        nlohmann::ordered_json jv;
        jv["camera"] = v.camera;
        jv["entry"] = v.entry;
        jv["exit"] = v.exit;
        visits.push_back(std::move(jv));
    }
    doc["visits"] = std::move(visits);
    return doc.dump();
}

namespace {

Trajectory trajectory_from_doc(const nlohmann::json& doc)
{
    if (!doc.is_object() || !doc.contains("id") || !doc.contains("visits") || !doc["id"].is_number_integer() ||
        !doc["visits"].is_array())
        throw DataError("trajectory needs integer 'id' and list 'visits'");
    Trajectory t;
    t.id = doc["id"].get<ObjectId>();
    for (const auto& jv : doc["visits"]) {
        if (!jv.is_object() || !jv.contains("camera") || !jv.contains("entry") || !jv.contains("exit") ||
            !jv["camera"].is_number_unsigned() || !jv["entry"].is_number_integer() || !jv["exit"].is_number_integer())
            throw DataError("trajectory " + std::to_string(t.id) + ": visit needs integer camera/entry/exit");
        t.visits.push_back({jv["camera"].get<CameraId>(), jv["entry"].get<Frame>(), jv["exit"].get<Frame>()});
    }
    return t;
}

} // namespace

Trajectory trajectory_from_json(const std::string& line)
{
    try {
        return trajectory_from_doc(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed trajectory: ") + e.what());
    }
}

std::string dataset_to_jsonl(const Dataset& d)
{
    std::string out;
    nlohmann::ordered_json header;
    header["graph_checksum"] = checksum_hex(d.graph_checksum);
    header["horizon"] = d.horizon;
    out += header.dump();
    out += '\n';
    for (const auto& t : d.trajectories) {
        out += trajectory_to_json(t);
        out += '\n';
    }
    return out;
}

Dataset dataset_from_jsonl(const std::string& text)
{
    Dataset d;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            auto doc = nlohmann::json::parse(line);
            if (doc.is_object() && doc.contains("graph_checksum")) {
                if (lineno != 1)
                    throw DataError("metadata header must be the first line");
                d.graph_checksum = parse_checksum_hex(doc["graph_checksum"].get<std::string>());
                if (doc.contains("horizon"))
                    d.horizon = doc["horizon"].get<Frame>();
                continue;
            }
            d.trajectories.push_back(trajectory_from_doc(doc));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("line " + std::to_string(lineno) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    // Without a header the video ends right after the last sighting.
    if (d.horizon == 0)
        for (const auto& t : d.trajectories)
            for (const auto& v : t.visits)
                d.horizon = std::max(d.horizon, v.exit + 1);
    d.reindex();
    std::vector<ObjectId> ids;
    for (const auto& t : d.trajectories)
        ids.push_back(t.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw DataError("duplicate trajectory id " + std::to_string(*std::adjacent_find(ids.begin(), ids.end())));
    return d;
}

void save_dataset(const Dataset& d, const std::filesystem::path& path)
{
    detail::write_text_file(path, dataset_to_jsonl(d));
}

Dataset load_dataset(const std::filesystem::path& path)
{
    try {
        return dataset_from_jsonl(detail::read_text_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

} // namespace camsearch
