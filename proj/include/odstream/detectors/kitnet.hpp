#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "odstream/detector.hpp"

namespace odstream {

// Hidden width for a KitNET autoencoder: max(1, ceil(beta * input)), clamped
// to input-1 so the code path always compresses when input >= 2.
std::size_t kitnet_hidden_dim(std::size_t input_dim, double beta);

// Tiny dense autoencoder, sigmoid on both layers, trained by SGD on the mean
// squared reconstruction error L = sum((xhat - x)^2) / dim. Operates on
// already-normalized vectors; normalization lives in RunningMinMax.
struct Autoencoder {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    double lr0 = 0.1;
    std::uint64_t steps = 0;
    std::vector<double> w1, b1;  // hidden x input, row-major
    std::vector<double> w2, b2;  // input x hidden, row-major

    static Autoencoder init(std::size_t input_dim, std::size_t hidden_dim,
                            double lr0, std::uint64_t seed);
};

// Reconstruction decode(encode(x)) and its RMSE against x.
std::pair<std::vector<double>, double> ae_forward(const Autoencoder& ae,
                                                  const std::vector<double>& x);

// One SGD step with lr = lr0 / sqrt(steps) after incrementing steps.
// Gradients are plain backprop through both sigmoid layers.
void ae_sgd_step(Autoencoder& ae, const std::vector<double>& x);

// Per-feature running min-max scaler used in front of each autoencoder.
// apply() maps into [0,1] on the seen range; a collapsed range maps to 0.
// Values outside the seen range are deliberately not clamped, so far-out
// inputs saturate the sigmoids and produce large reconstruction errors.
struct RunningMinMax {
    std::vector<double> lo, hi;
    bool seen = false;

    void update(const std::vector<double>& x);
    std::vector<double> apply(const std::vector<double>& x) const;
};

// Groups feature indices by agglomerative average-linkage clustering under
// the correlation distance 1 - |corr|, never letting a group exceed m_max.
// A constant feature has distance exactly 1 to everything and stays alone.
// Deterministic for a fixed sample. Throws on fewer than 2 records.
std::vector<std::vector<std::size_t>> learn_feature_map(
    const std::vector<std::vector<double>>& sample, int m_max);

// Ensemble of per-group autoencoders plus an output autoencoder over the
// vector of per-group RMSEs; the emitted score is the output RMSE. The first
// window fit learns the feature map (grace phase), initializes the ensemble,
// and trains one epoch; later fits train one epoch each, warm-started.
class KitnetDetector final : public Detector {
public:
    KitnetDetector(const DetectorConfig& cfg, std::uint64_t seed);

    DetectorKind kind() const override { return DetectorKind::kitnet; }
    bool map_learned() const { return !groups_.empty(); }
    const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }
    std::uint64_t grace_count() const { return grace_count_; }

    void save_payload(std::ostream& out) const override;
    void load_payload(std::istream& in) override;

protected:
    void do_fit_window(std::span<const Record> window) override;
    AnomalyScore do_score_one(const Record& record) const override;
    void do_learn_one(const Record& record) override;

private:
    void init_ensemble(std::span<const Record> window);
    void train_record(const std::vector<double>& features);
    std::vector<double> slice(const std::vector<double>& features,
                              std::size_t group) const;

    int m_max_;
    double beta_;
    double lr_;

    std::vector<std::vector<std::size_t>> groups_;
    std::vector<RunningMinMax> group_norms_;
    std::vector<Autoencoder> ensemble_;
    RunningMinMax output_norm_;
    Autoencoder output_ae_;
    std::uint64_t grace_count_ = 0;  // records consumed by map learning
};

}  // namespace odstream
