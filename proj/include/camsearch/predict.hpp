#pragma once

#include "camsearch/graph.hpp"
#include "camsearch/trajectory.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace camsearch {

// Probability of finding the object at each neighbor of the current camera.
// camera_ids are the current camera's neighbors, ascending.
struct NeighborDistribution {
    std::vector<CameraId> camera_ids;
    std::vector<double> probs;

    std::size_t size() const { return camera_ids.size(); }
    // Index of the largest probability; ties go to the lowest camera id.
    std::size_t argmax() const;
    // Support is exactly the neighbor set of `current`, probabilities are
    // non-negative and sum to one within `tol`.
    bool is_valid_for(const CameraGraph& g, CameraId current, double tol = 1e-9) const;
};

// Cameras traversed so far; back() is the current camera.
using CameraHistory = std::span<const CameraId>;

class Predictor {
public:
    virtual ~Predictor() = default;

    virtual std::string name() const = 0;
    virtual NeighborDistribution predict(CameraHistory history) const = 0;

    // Distributions for the prefixes sequence[0..k], k = 0..size-2, i.e. one
    // per hop of the sequence. Recurrent models override this to share work.
    virtual std::vector<NeighborDistribution> predict_hops(CameraHistory sequence) const;
};

// Historical u -> v traversal counts.
struct TransitionCounts {
    std::map<std::pair<CameraId, CameraId>, std::uint64_t> counts;

    std::uint64_t count(CameraId from, CameraId to) const;
};

// Successor tallies keyed by context. tables[m - 2] holds length m-1 contexts.
struct NgramModel {
    std::size_t order = 3;
    std::vector<std::map<std::vector<CameraId>, std::map<CameraId, std::uint64_t>>> tables;
};

constexpr double kDefaultSmoothing = 1.0;

TransitionCounts fit_mle(const std::vector<Trajectory>& trajs);
NeighborDistribution predict_mle(const CameraGraph& g, const TransitionCounts& counts, CameraHistory history,
                                 double lambda = kDefaultSmoothing);

NgramModel fit_ngram(const std::vector<Trajectory>& trajs, std::size_t order);
NeighborDistribution predict_ngram(const CameraGraph& g, const NgramModel& model, CameraHistory history,
                                   double lambda = kDefaultSmoothing);

NeighborDistribution uniform_predict(const CameraGraph& g, CameraHistory history);

// Add-lambda estimate over the neighbors of `current`: (c + lambda) / (N + lambda * deg).
// Falls back to uniform when both counts and lambda are zero.
NeighborDistribution smoothed_distribution(const CameraGraph& g, CameraId current,
                                           std::span<const std::uint64_t> neighbor_counts, double lambda);

// Graph-Search: neighbors in random order.
class UniformPredictor : public Predictor {
public:
    explicit UniformPredictor(const CameraGraph& g) : graph_(g) {}
    std::string name() const override { return "uniform"; }
    NeighborDistribution predict(CameraHistory history) const override { return uniform_predict(graph_, history); }

private:
    const CameraGraph& graph_;
};

// Spatula: local per-camera transition frequencies.
class MlePredictor : public Predictor {
public:
    MlePredictor(const CameraGraph& g, TransitionCounts counts, double lambda = kDefaultSmoothing)
        : graph_(g), counts_(std::move(counts)), lambda_(lambda)
    {
    }
    std::string name() const override { return "mle"; }
    NeighborDistribution predict(CameraHistory history) const override
    {
        return predict_mle(graph_, counts_, history, lambda_);
    }
    const TransitionCounts& counts() const { return counts_; }

private:
    const CameraGraph& graph_;
    TransitionCounts counts_;
    double lambda_;
};

class NgramPredictor : public Predictor {
public:
    NgramPredictor(const CameraGraph& g, NgramModel model, double lambda = kDefaultSmoothing)
        : graph_(g), model_(std::move(model)), lambda_(lambda)
    {
    }
    std::string name() const override { return "ngram"; }
    NeighborDistribution predict(CameraHistory history) const override
    {
        return predict_ngram(graph_, model_, history, lambda_);
    }

private:
    const CameraGraph& graph_;
    NgramModel model_;
    double lambda_;
};

// Teacher-forced top-1 next-camera accuracy over every hop of every
// trajectory with at least two visits.
double predictor_accuracy(const Predictor& predictor, const std::vector<Trajectory>& test_trajs);

// Text model files. Layout documented in docs/formats.md.
struct MleModelFile {
    TransitionCounts counts;
    double lambda = kDefaultSmoothing;
    std::uint64_t graph_checksum = 0;
};

struct NgramModelFile {
    NgramModel model;
    double lambda = kDefaultSmoothing;
    std::uint64_t graph_checksum = 0;
};

std::string mle_to_json(const MleModelFile& m);
MleModelFile mle_from_json(const std::string& text);
std::string ngram_to_json(const NgramModelFile& m);
NgramModelFile ngram_from_json(const std::string& text);

void save_mle(const MleModelFile& m, const std::filesystem::path& path);
MleModelFile load_mle(const std::filesystem::path& path);
void save_ngram(const NgramModelFile& m, const std::filesystem::path& path);
NgramModelFile load_ngram(const std::filesystem::path& path);

} // namespace camsearch
