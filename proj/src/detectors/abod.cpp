#include "odstream/detectors/abod.hpp"

#include <algorithm>
#include <stdexcept>

#include "odstream/kernels.hpp"
#include "odstream/serialize.hpp"

namespace odstream {

AnomalyScore abod_score(const std::vector<std::vector<double>>& reference,
                        const std::vector<double>& query) {
    if (reference.size() < 2) {
        throw std::invalid_argument("abod: need at least 2 reference points");
    }
    const auto m = kernels::angle_moments(reference, query);
    if (m.valid_pairs == 0) {
        throw std::invalid_argument(
            "abod: no valid angle pair (query coincides with the reference set)");
    }
    const double mean = m.weighted_cos / m.weight_sum;
    const double mean_sq = m.weighted_cos_sq / m.weight_sum;
    const double variance = std::max(0.0, mean_sq - mean * mean);
    return -variance;
}

AbodDetector::AbodDetector(const DetectorConfig&, std::uint64_t seed)
    : Detector(seed) {}

void AbodDetector::do_fit_window(std::span<const Record> window) {
    points_.clear();
    points_.reserve(window.size());
    for (const auto& r : window) points_.push_back(r.features);
    ring_limit_ = window.size();
}

AnomalyScore AbodDetector::do_score_one(const Record& record) const {
    return abod_score(points_, record.features);
}

void AbodDetector::do_learn_one(const Record& record) {
    points_.push_back(record.features);
    const std::size_t limit = ring_limit_ > 0 ? ring_limit_ : 256;
    while (points_.size() > limit) points_.erase(points_.begin());
}

void AbodDetector::save_payload(std::ostream& out) const {
    io::write_pod<std::uint64_t>(out, dim_);
    io::write_pod<std::uint64_t>(out, ring_limit_);
    io::write_pod<std::uint64_t>(out, points_.size());
    for (const auto& p : points_) io::write_vec(out, p);
}

void AbodDetector::load_payload(std::istream& in) {
    dim_ = io::read_pod<std::uint64_t>(in);
    ring_limit_ = io::read_pod<std::uint64_t>(in);
    const auto n = io::read_pod<std::uint64_t>(in);
    points_.clear();
    points_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) points_.push_back(io::read_vec(in));
}

}  // namespace odstream
