#pragma once

#include "camsearch/graph.hpp"
#include "camsearch/predict.hpp"
#include "camsearch/rng.hpp"
#include "camsearch/trajectory.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace camsearch {

// Re-identify object_id, first seen at source_camera during source_frame.
struct Query {
    ObjectId object_id = 0;
    CameraId source_camera = 0;
    Frame source_frame = 0;
};

struct Sighting {
    CameraId camera = 0;
    Frame frame = 0;

    bool operator==(const Sighting&) const = default;
};

// Modeled seconds per operation; stands in for detector / Re-id inference.
struct CostModel {
    double detector_cost = 0.015;  // s per frame
    double reid_cost = 0.025;      // s per detected object
    double occupancy = 1.0;        // objects per frame
    double predictor_cost = 0.001; // s per sampling round

    void validate() const;
    double frame_cost() const { return detector_cost + occupancy * reid_cost; }
    double latency(std::uint64_t frames, std::uint64_t rounds) const
    {
        return static_cast<double>(frames) * frame_cost() + static_cast<double>(rounds) * predictor_cost;
    }
};

struct SearchConfig {
    Frame window = 0;    // W, frames per sampling round
    double alpha = 0.75; // exploration factor
    Frame horizon = 0;   // T; 0 takes the dataset horizon
    CostModel cost;

    void validate() const;
};

struct QueryResult {
    std::vector<Sighting> sightings; // in visit order, source excluded
    std::uint64_t frames_examined = 0;
    std::uint64_t oracle_calls = 0;
    std::uint64_t sampling_rounds = 0;
    double modeled_latency = 0.0; // seconds
    double recall = 0.0;

    bool operator==(const QueryResult&) const = default;
};

// Answers "is the object in this camera at this frame" from ground truth.
// Each answered frame counts as one examined frame.
class FrameOracle {
public:
    FrameOracle(const Dataset& dataset, ObjectId object_id, std::size_t num_cameras);

    bool present(CameraId camera, Frame frame);

    // Examines frames first..last in order and stops at the first hit.
    // Charges only the frames actually examined.
    std::optional<Frame> scan(CameraId camera, Frame first, Frame last);

    std::uint64_t frames_examined() const { return frames_; }
    Frame horizon() const { return horizon_; }
    const Trajectory& trajectory() const { return *traj_; }

private:
    void check(CameraId camera, Frame frame) const;

    const Trajectory* traj_;
    Frame horizon_;
    std::size_t num_cameras_;
    std::uint64_t frames_ = 0;
};

// Multiplies the sampled entry by alpha and spreads the removed mass evenly
// over the other entries. A single-entry distribution is returned unchanged.
NeighborDistribution update_probabilities(const NeighborDistribution& dist, std::size_t sampled_index, double alpha);

// Source of uniform draws in [0, 1); injectable so a sampling sequence can be scripted.
using UnitSampler = std::function<double()>;

struct HopRound {
    CameraId camera = 0;
    Frame first = 0; // window bounds, inclusive
    Frame last = 0;
    bool hit = false;
};

struct HopResult {
    std::optional<Sighting> sighting; // empty when every neighbor is exhausted
    std::uint64_t frames_examined = 0;
    std::uint64_t rounds = 0;
    std::vector<HopRound> trace;
};

// Windowed search over the neighbors in dist0. Each neighbor keeps its own
// cursor starting at t_last; each round samples a non-exhausted neighbor by
// inverse CDF, examines its next window, and on a miss applies the update
// rule (or, when update_probs is false, keeps the probabilities static).
HopResult adaptive_hop(FrameOracle& oracle, const NeighborDistribution& dist0, Frame t_last, const SearchConfig& cfg,
                       const UnitSampler& uniform, bool update_probs = true);

// Follows the object hop by hop until a hop exhausts every neighbor.
// static_probs = true keeps the predictor's scores fixed within a hop.
QueryResult run_query_adaptive(const Dataset& dataset, const CameraGraph& g, const Query& query,
                               const Predictor& predictor, const SearchConfig& cfg, Rng& rng, bool static_probs);

// Scans every camera from source_frame to the horizon, stopping per camera at the first hit.
QueryResult run_query_naive(const Dataset& dataset, const CameraGraph& g, const Query& query, const SearchConfig& cfg);

// One frame per visited camera: the lower bound for any executor.
QueryResult run_query_oracle(const Dataset& dataset, const Query& query, const CostModel& cost = {});

// Index of the visit that holds (source_camera, source_frame); ConfigError if none.
std::size_t source_visit_index(const Trajectory& t, const Query& query);

// Fraction of the distinct cameras visited after the source visit that appear in sightings.
double query_recall(const Trajectory& t, std::size_t source_index, const std::vector<Sighting>& sightings);

// Window size rounded from the mean dwell of the training trajectories.
Frame default_window(const std::vector<Trajectory>& train);

} // namespace camsearch
