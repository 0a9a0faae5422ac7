#pragma once

#include "camsearch/graph.hpp"
#include "camsearch/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace camsearch {

using Frame = std::int64_t;
using ObjectId = std::int64_t;

// Contiguous frame interval [entry, exit] during which an object is visible.
struct CameraVisit {
    CameraId camera = 0;
    Frame entry = 0;
    Frame exit = 0;

    bool contains(Frame f) const { return entry <= f && f <= exit; }
    bool operator==(const CameraVisit&) const = default;
};

struct Trajectory {
    ObjectId id = 0;
    std::vector<CameraVisit> visits;

    std::vector<CameraId> cameras() const;
    bool operator==(const Trajectory&) const = default;
};

struct TrajGenConfig {
    std::size_t count = 1000;
    double skew = 1.1;
    Frame horizon = 0; // 0 derives the smallest safe horizon from the graph diameter
    Frame dwell_min = 30;
    Frame dwell_max = 80;
    Frame travel_min = 10;
    Frame travel_max = 60;
    std::size_t min_path_len = 3; // hops
    std::uint64_t seed = 0;
};

// Ground-truth trajectories for one camera graph, plus the video horizon T.
struct Dataset {
    std::uint64_t graph_checksum = 0;
    Frame horizon = 0;
    std::vector<Trajectory> trajectories;

    // Null when the object is unknown.
    const Trajectory* find(ObjectId id) const;
    void reindex();

private:
    std::unordered_map<ObjectId, std::size_t> index_;
};

// Draws ranks 0..n-1 with P(k) proportional to 1/(k+1)^s.
class ZipfSampler {
public:
    ZipfSampler(std::size_t n, double s);

    std::size_t sample(Rng& rng) const;
    double probability(std::size_t k) const;
    std::size_t size() const { return cdf_.size(); }

private:
    std::vector<double> cdf_;
};

std::size_t zipf_sample(std::size_t n, double s, Rng& rng);

// Lays a camera path out in time: dwell and travel drawn uniformly from the
// configured ranges, first entry at `start`.
Trajectory timed_trajectory(ObjectId id, const std::vector<CameraId>& path, Frame start, const TrajGenConfig& cfg,
                            Rng& rng);

// Horizon used when cfg.horizon == 0. Throws ConfigError when an explicit
// horizon cannot hold the longest shortest-path trajectory.
Frame resolve_horizon(const CameraGraph& g, const TrajGenConfig& cfg);

// Zipf-distributed sources and destinations (independent hotspot
// permutations), routed along shortest paths.
std::vector<Trajectory> generate_trajectories(const CameraGraph& g, const TrajGenConfig& cfg);
Dataset generate_dataset(const CameraGraph& g, const TrajGenConfig& cfg);

// Fraction of all endpoints (sources and destinations) falling on the most
// frequent ceil(10%) of cameras.
double endpoint_concentration(const std::vector<Trajectory>& trajs, std::size_t num_cameras);

// Seeded shuffle split; both sides non-empty.
std::pair<std::vector<Trajectory>, std::vector<Trajectory>> split_dataset(const std::vector<Trajectory>& trajs,
                                                                          double train_fraction, std::uint64_t seed);

// Mean visit duration in frames.
double mean_dwell(const std::vector<Trajectory>& trajs);

// Throws DataError naming the trajectory on any invariant violation.
void validate_trajectory(const CameraGraph& g, const Trajectory& t, Frame horizon);
void validate_dataset(const CameraGraph& g, const Dataset& d);

std::string trajectory_to_json(const Trajectory& t);
Trajectory trajectory_from_json(const std::string& line);

// Line-delimited file: an optional metadata header line
// {"graph_checksum":"...","horizon":T} followed by one trajectory per line.
std::string dataset_to_jsonl(const Dataset& d);
Dataset dataset_from_jsonl(const std::string& text);
void save_dataset(const Dataset& d, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

} // namespace camsearch
