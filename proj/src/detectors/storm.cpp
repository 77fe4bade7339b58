#include "odstream/detectors/storm.hpp"

#include <algorithm>
#include <iostream>

#include "odstream/kernels.hpp"
#include "odstream/serialize.hpp"

namespace odstream {

StormDetector::StormDetector(const DetectorConfig& cfg, std::uint64_t seed)
    : Detector(seed),
      radius_(cfg.storm_radius),
      k_(cfg.storm_k),
      window_w_(cfg.storm_window) {
    if (k_ < 1) throw std::invalid_argument("storm.k must be positive");
    if (radius_ < 0.0) throw std::invalid_argument("storm.radius must be >= 0");
    if (window_w_ != 0 && window_w_ < k_) {
        throw std::invalid_argument("storm.window must be >= storm.k");
    }
}

std::uint64_t StormDetector::oldest_live() const {
    const auto w = static_cast<std::uint64_t>(window_w_);
    return next_arrival_ > w ? next_arrival_ - w : 0;
}

void StormDetector::calibrate(std::span<const Record> window) {
    if (window_w_ == 0) {
        window_w_ = std::max<int>(static_cast<int>(window.size()), k_);
        std::cerr << "[exact-storm] auto window = " << window_w_ << "\n";
    }
    if (radius_ == 0.0) {
        if (window.size() >= 2) {
            std::vector<std::vector<double>> pts;
            pts.reserve(window.size());
            for (const auto& r : window) pts.push_back(r.features);
            radius_ = kernels::pairwise_distance_percentile(pts, 0.05);
        }
        if (radius_ <= 0.0) radius_ = 1.0;  // degenerate window (all identical)
        std::cerr << "[exact-storm] auto radius = " << radius_ << "\n";
    }
}

void StormDetector::insert(const std::vector<double>& point) {
    const std::uint64_t arrival = next_arrival_++;
    Node node;
    node.point = point;
    node.arrival = arrival;

    const double r_sq = radius_ * radius_;
    std::vector<std::uint64_t> preceding;  // in arrival order
    for (auto& existing : nodes_) {
        if (kernels::squared_distance(existing.point, point) <= r_sq) {
            existing.count_after += 1;
            preceding.push_back(existing.arrival);
        }
    }
    // keep the k most recent, most recent first
    const auto take = std::min<std::size_t>(preceding.size(), static_cast<std::size_t>(k_));
    node.prev_neighbors.assign(preceding.rbegin(),
                               preceding.rbegin() + static_cast<std::ptrdiff_t>(take));
    nodes_.push_back(std::move(node));

    while (!nodes_.empty() && nodes_.front().arrival < oldest_live()) {
        nodes_.pop_front();
    }
}

int StormDetector::live_neighbor_count(const Node& node) const {
    const std::uint64_t floor = oldest_live();
    int live_prev = 0;
    for (std::uint64_t a : node.prev_neighbors) {
        if (a >= floor) ++live_prev;
    }
    return node.count_after + live_prev;
}

AnomalyScore StormDetector::score_point(const std::vector<double>& point) const {
    if (nodes_.empty()) throw std::logic_error("exact-storm: empty ISB");
    const double r_sq = radius_ * radius_;
    int c = 0;
    for (const auto& node : nodes_) {
        if (kernels::squared_distance(node.point, point) <= r_sq) ++c;
    }
    const double frac = static_cast<double>(c) / static_cast<double>(k_);
    return std::max(0.0, 1.0 - frac);
}

void StormDetector::do_fit_window(std::span<const Record> window) {
    calibrate(window);
    nodes_.clear();
    next_arrival_ = 0;
    for (const auto& record : window) insert(record.features);
}

AnomalyScore StormDetector::do_score_one(const Record& record) const {
    return score_point(record.features);
}

void StormDetector::do_learn_one(const Record& record) {
    if (window_w_ == 0) window_w_ = std::max(256, k_);
    if (radius_ <= 0.0) radius_ = 1.0;
    insert(record.features);
}

void StormDetector::save_payload(std::ostream& out) const {
    io::write_pod<std::uint64_t>(out, dim_);
    io::write_pod<double>(out, radius_);
    io::write_pod<std::int32_t>(out, k_);
    io::write_pod<std::int32_t>(out, window_w_);
    io::write_pod<std::uint64_t>(out, next_arrival_);
    io::write_pod<std::uint64_t>(out, nodes_.size());
    for (const auto& node : nodes_) {
        io::write_vec(out, node.point);
        io::write_pod<std::uint64_t>(out, node.arrival);
        io::write_pod<std::int32_t>(out, node.count_after);
        io::write_u64_vec(out, node.prev_neighbors);
    }
}

void StormDetector::load_payload(std::istream& in) {
    dim_ = io::read_pod<std::uint64_t>(in);
    radius_ = io::read_pod<double>(in);
    k_ = io::read_pod<std::int32_t>(in);
    window_w_ = io::read_pod<std::int32_t>(in);
    next_arrival_ = io::read_pod<std::uint64_t>(in);
    const auto n = io::read_pod<std::uint64_t>(in);
    nodes_.clear();
    for (std::uint64_t i = 0; i < n; ++i) {
        Node node;
        node.point = io::read_vec(in);
        node.arrival = io::read_pod<std::uint64_t>(in);
        node.count_after = io::read_pod<std::int32_t>(in);
        node.prev_neighbors = io::read_u64_vec(in);
        nodes_.push_back(std::move(node));
    }
}

}  // namespace odstream
