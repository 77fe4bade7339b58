#include "odstream/detectors/knn_cad.hpp"

#include <stdexcept>
#include <string>

#include "odstream/kernels.hpp"
#include "odstream/serialize.hpp"

namespace odstream {

double cad_ncm(const std::vector<std::vector<double>>& training,
               const std::vector<double>& query, int k) {
    if (k < 1) throw std::invalid_argument("cad.k must be positive");
    if (training.size() < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("cad: training set smaller than k");
    }
    const auto neighbors = kernels::knn_of(training, query, static_cast<std::size_t>(k));
    double sum = 0.0;
    for (const auto& [dist, idx] : neighbors) sum += dist;
    return sum;
}

double cad_p_value(const std::vector<double>& calibration_scores, double ncm) {
    if (calibration_scores.empty()) {
        throw std::invalid_argument("cad: empty calibration set");
    }
    std::size_t at_least = 0;
    for (double a : calibration_scores) {
        if (a >= ncm) ++at_least;
    }
    return static_cast<double>(at_least + 1) /
           static_cast<double>(calibration_scores.size() + 1);
}

KnnCadDetector::KnnCadDetector(const DetectorConfig& cfg, std::uint64_t seed)
    : Detector(seed), k_(cfg.cad_k) {
    if (k_ < 1) throw std::invalid_argument("cad.k must be positive");
}

void KnnCadDetector::rebuild() {
    const std::size_t n = points_.size();
    const std::size_t calib = std::max<std::size_t>(1, n / 3);
    if (n <= calib || n - calib < static_cast<std::size_t>(k_)) {
        throw std::invalid_argument(
            "cad: window too small, training part needs at least k=" +
            std::to_string(k_) + " points");
    }
    train_count_ = n - calib;
    train_points_.assign(points_.begin(),
                         points_.begin() + static_cast<std::ptrdiff_t>(train_count_));
    calib_scores_.assign(calib, 0.0);
    const auto sc = static_cast<std::ptrdiff_t>(calib);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < sc; ++i) {
        calib_scores_[static_cast<std::size_t>(i)] =
            cad_ncm(train_points_, points_[train_count_ + static_cast<std::size_t>(i)], k_);
    }
}

void KnnCadDetector::do_fit_window(std::span<const Record> window) {
    points_.clear();
    points_.reserve(window.size());
    for (const auto& r : window) points_.push_back(r.features);
    ring_limit_ = window.size();
    rebuild();
}

AnomalyScore KnnCadDetector::do_score_one(const Record& record) const {
    const double ncm = cad_ncm(train_points_, record.features, k_);
    return 1.0 - cad_p_value(calib_scores_, ncm);
}

void KnnCadDetector::do_learn_one(const Record& record) {
    points_.push_back(record.features);
    const std::size_t limit = ring_limit_ > 0 ? ring_limit_ : 256;
    while (points_.size() > limit) points_.erase(points_.begin());
    rebuild();
}

void KnnCadDetector::save_payload(std::ostream& out) const {
    io::write_pod<std::uint64_t>(out, dim_);
    io::write_pod<std::int32_t>(out, k_);
    io::write_pod<std::uint64_t>(out, ring_limit_);
    io::write_pod<std::uint64_t>(out, points_.size());
    for (const auto& p : points_) io::write_vec(out, p);
}

void KnnCadDetector::load_payload(std::istream& in) {
    dim_ = io::read_pod<std::uint64_t>(in);
    k_ = io::read_pod<std::int32_t>(in);
    ring_limit_ = io::read_pod<std::uint64_t>(in);
    const auto n = io::read_pod<std::uint64_t>(in);
    points_.clear();
    points_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) points_.push_back(io::read_vec(in));
    if (!points_.empty()) rebuild();
}

}  // namespace odstream
