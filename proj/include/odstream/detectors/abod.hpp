#pragma once

#include <vector>

#include "odstream/detector.hpp"

namespace odstream {

// Angle-based outlier factor, exact all-pairs form. For a query q and reference
// points B, C the factor is the weighted variance of cos(angle(B-q, C-q)) over
// unordered pairs, each pair weighted by 1/(|B-q|^2 * |C-q|^2). Pairs where
// either difference vector is zero are skipped. Returns the negated factor so
// that higher means more anomalous (outliers see little angular spread).
AnomalyScore abod_score(const std::vector<std::vector<double>>& reference,
                        const std::vector<double>& query);

// Keeps a ring of recent points as the reference set. No hyperparameters.
class AbodDetector final : public Detector {
public:
    AbodDetector(const DetectorConfig& cfg, std::uint64_t seed);

    DetectorKind kind() const override { return DetectorKind::abod; }
    std::size_t buffered_points() const override { return points_.size(); }

    void save_payload(std::ostream& out) const override;
    void load_payload(std::istream& in) override;

protected:
    void do_fit_window(std::span<const Record> window) override;
    AnomalyScore do_score_one(const Record& record) const override;
    void do_learn_one(const Record& record) override;

private:
    std::size_t ring_limit_ = 0;
    std::vector<std::vector<double>> points_;
};

}  // namespace odstream
