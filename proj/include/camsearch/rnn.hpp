#pragma once

#include "camsearch/graph.hpp"
#include "camsearch/predict.hpp"
#include "camsearch/trajectory.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace camsearch {

struct RnnConfig {
    std::size_t hidden_size = 128;
    std::size_t embed_size = 32;
    double learning_rate = 0.001;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 50;
    std::size_t patience = 5;
    double clip_norm = 5.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Trainable tensors. Gate order everywhere is input, forget, cell, output;
// gate matrices act on the stacked column [embedding(x_t); h_{t-1}].
struct RnnParams {
    Eigen::MatrixXd embedding;             // vocab x embed
    std::array<Eigen::MatrixXd, 4> gate_w; // hidden x (embed + hidden)
    std::array<Eigen::VectorXd, 4> gate_b; // hidden
    Eigen::MatrixXd head_w;                // vocab x hidden
    Eigen::VectorXd head_b;                // vocab

    static constexpr std::array<const char*, 4> kGateNames{"input", "forget", "cell", "output"};

    // Calls f(name, tensor) for every tensor in checkpoint order.
    template <typename F>
    void visit(F&& f)
    {
        f(std::string("embedding"), embedding);
        for (std::size_t k = 0; k < 4; ++k)
            f(std::string(kGateNames[k]) + "_gate_weights", gate_w[k]);
        for (std::size_t k = 0; k < 4; ++k)
            f(std::string(kGateNames[k]) + "_gate_bias", gate_b[k]);
        f(std::string("head_weights"), head_w);
        f(std::string("head_bias"), head_b);
    }
    template <typename F>
    void visit(F&& f) const
    {
        const_cast<RnnParams&>(*this).visit([&f](const std::string& name, const auto& t) { f(name, t); });
    }

    // Same shapes, all zero.
    RnnParams zeros_like() const;
    bool all_finite() const;
    bool operator==(const RnnParams& other) const;
};

// Embedding + single-layer LSTM + linear head over the camera vocabulary.
// Token num_cameras is the start-of-sequence marker.
class RnnModel {
public:
    RnnModel() = default;
    RnnModel(std::size_t num_cameras, const RnnConfig& config, std::uint64_t graph_checksum);

    // Uniform(+-1/sqrt(hidden)) weights, forget-gate bias 1.
    static RnnModel initialized(std::size_t num_cameras, const RnnConfig& config, std::uint64_t graph_checksum);

    std::size_t num_cameras() const { return num_cameras_; }
    std::size_t vocab() const { return num_cameras_ + 1; }
    CameraId start_token() const { return static_cast<CameraId>(num_cameras_); }
    const RnnConfig& config() const { return config_; }
    std::uint64_t graph_checksum() const { return graph_checksum_; }

    RnnParams params;

private:
    std::size_t num_cameras_ = 0;
    RnnConfig config_;
    std::uint64_t graph_checksum_ = 0;
};

// Row t holds the logits for the camera following sequence[0..t]; the start
// token is consumed first. Shape: sequence.size() x vocab.
Eigen::MatrixXd forward(const RnnModel& model, std::span<const CameraId> sequence);

struct LossAndGradients {
    double loss = 0.0;     // mean cross-entropy per label position, nats
    std::size_t tokens = 0; // label positions contributing
    RnnParams gradients;
};

// Inputs are [start, s0 .. s_{n-2}], labels [s0 .. s_{n-1}]; sequences of
// different length are padded and masked. Full backpropagation through time.
LossAndGradients loss_and_gradients(const RnnModel& model, const std::vector<std::vector<CameraId>>& batch);

struct TrainReport {
    std::vector<double> train_loss;          // per epoch, nats/token
    std::vector<double> validation_accuracy; // per epoch, top-1 over hops
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0; // 1-based
};

// Adam with global-norm clipping on a seeded 90/10 split; returns the
// checkpoint with the best validation accuracy. Throws DataError if the
// loss diverges.
std::pair<RnnModel, TrainReport> train_rnn(const std::vector<Trajectory>& trajs, const CameraGraph& g,
                                           const RnnConfig& cfg);

// Softmax of the final-step logits restricted to the neighbors of history.back().
NeighborDistribution predict_rnn(const RnnModel& model, const CameraGraph& g, CameraHistory history);

class RnnPredictor : public Predictor {
public:
    RnnPredictor(const CameraGraph& g, RnnModel model) : graph_(g), model_(std::move(model)) {}
    std::string name() const override { return "rnn"; }
    NeighborDistribution predict(CameraHistory history) const override;
    std::vector<NeighborDistribution> predict_hops(CameraHistory sequence) const override;
    const RnnModel& model() const { return model_; }

private:
    const CameraGraph& graph_;
    RnnModel model_;
};

// Binary checkpoint: magic, version, JSON header, then float64 little-endian
// tensors in RnnParams::visit order, each row-major.
std::string serialize_model(const RnnModel& model);
RnnModel deserialize_model(const std::string& bytes);
void save_model(const RnnModel& model, const std::filesystem::path& path);
RnnModel load_model(const std::filesystem::path& path);
// Also rejects a checkpoint trained on a different graph.
RnnModel load_model(const std::filesystem::path& path, const CameraGraph& g);

} // namespace camsearch
