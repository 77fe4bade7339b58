#pragma once

#include <cstdint>
#include <vector>

#include "odstream/detector.hpp"

namespace odstream {

// Linear one-class SVM trained by subgradient descent. No kernel: the model
// is just (w, rho) and one update touches O(dim) memory, which keeps the
// online contract honest.
struct OcsvmModel {
    std::vector<double> w;
    double rho = 0.0;
    double nu = 0.1;       // in (0, 1], bounds the training outlier fraction
    double lr0 = 0.01;
    std::uint64_t steps = 0;
};

// One subgradient step. With violation v = (w.x < rho):
//   w   <- w - lr * (w - (1/nu) * x * [v])
//   rho <- rho - lr * (-1 + (1/nu) * [v])
// where lr = lr0 / sqrt(steps) after incrementing steps.
void ocsvm_sgd_step(OcsvmModel& model, const std::vector<double>& x);

// Decision value rho - w.x; positive means outside the boundary (anomalous).
double ocsvm_score(const OcsvmModel& model, const std::vector<double>& x);

class OcsvmDetector final : public Detector {
public:
    OcsvmDetector(const DetectorConfig& cfg, std::uint64_t seed);

    DetectorKind kind() const override { return DetectorKind::ocsvm; }
    const OcsvmModel& model() const { return model_; }

    void save_payload(std::ostream& out) const override;
    void load_payload(std::istream& in) override;

protected:
    void do_fit_window(std::span<const Record> window) override;
    AnomalyScore do_score_one(const Record& record) const override;
    void do_learn_one(const Record& record) override;

private:
    void ensure_initialized();

    OcsvmModel model_;
    int epochs_;
};

}  // namespace odstream
