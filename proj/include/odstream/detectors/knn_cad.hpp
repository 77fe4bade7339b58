#pragma once

#include <vector>

#include "odstream/detector.hpp"

namespace odstream {

// Non-conformity measure: sum of Euclidean distances from the query to its k
// nearest points in the training set. Throws if the training set has fewer
// than k points.
double cad_ncm(const std::vector<std::vector<double>>& training,
               const std::vector<double>& query, int k);

// Conformal p-value: p = (#{a in calibration : a >= ncm} + 1) / (|calibration| + 1).
// Ties count as >=. Throws on empty calibration.
double cad_p_value(const std::vector<double>& calibration_scores, double ncm);

// Conformal anomaly detector over a ring of recent points. Each fit splits the
// reference 2:1 into a training part and a calibration part (the most recent
// third calibrates) and precomputes the calibration NCMs. Emitted score is
// 1 - p, so higher means more anomalous.
class KnnCadDetector final : public Detector {
public:
    KnnCadDetector(const DetectorConfig& cfg, std::uint64_t seed);

    DetectorKind kind() const override { return DetectorKind::knn_cad; }
    std::size_t buffered_points() const override { return points_.size(); }

    std::size_t training_count() const { return train_count_; }
    const std::vector<double>& calibration_scores() const { return calib_scores_; }

    void save_payload(std::ostream& out) const override;
    void load_payload(std::istream& in) override;

protected:
    void do_fit_window(std::span<const Record> window) override;
    AnomalyScore do_score_one(const Record& record) const override;
    void do_learn_one(const Record& record) override;

private:
    void rebuild();

    int k_;
    std::size_t ring_limit_ = 0;
    std::vector<std::vector<double>> points_;
    std::size_t train_count_ = 0;
    std::vector<std::vector<double>> train_points_;
    std::vector<double> calib_scores_;
};

}  // namespace odstream
