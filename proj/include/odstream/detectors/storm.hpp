#pragma once

#include <deque>

#include "odstream/detector.hpp"

namespace odstream {

/// Exact-STORM over a count-based window. The indexed stream buffer (ISB)
/// keeps one node per live stream object; each node tracks how many later
/// arrivals fell within radius R (count_after, exact) and the arrival
/// ordinals of up to k preceding in-radius neighbors, most recent first.
/// A node is evicted once window_w newer objects have arrived.
///
/// The binary Exact-STORM rule flags an object whose live neighbor count c
/// is below k; the continuous score max(0, 1 - c/k) preserves that decision
/// as score > 0 while staying rankable for AUC.
class StormDetector final : public Detector {
public:
    struct Node {
        std::vector<double> point;
        std::uint64_t arrival = 0;
        int count_after = 0;
        std::vector<std::uint64_t> prev_neighbors;  // most recent first
    };

    StormDetector(const DetectorConfig& cfg, std::uint64_t seed);

    DetectorKind kind() const override { return DetectorKind::exact_storm; }
    std::size_t buffered_points() const override { return nodes_.size(); }

    /// Inserts one stream object: bumps count_after of live in-radius
    /// nodes, records the new node's preceding neighbors, evicts expired
    /// nodes. Calibrates radius/window on first use if configured to 0.
    void insert(const std::vector<double>& point);

    /// c = live nodes within R of the query (a fresh object, never its own
    /// neighbor); score = max(0, 1 - c/k). Throws on an empty ISB.
    AnomalyScore score_point(const std::vector<double>& point) const;

    /// Live neighbor count of a stored node: count_after plus the still
    /// live entries of its preceding-neighbor list.
    int live_neighbor_count(const Node& node) const;

    const std::deque<Node>& nodes() const { return nodes_; }
    double radius() const { return radius_; }
    int neighbor_k() const { return k_; }
    int window_size() const { return window_w_; }
    std::uint64_t arrivals() const { return next_arrival_; }

    void save_payload(std::ostream& out) const override;
    void load_payload(std::istream& in) override;

protected:
    void do_fit_window(std::span<const Record> window) override;
    AnomalyScore do_score_one(const Record& record) const override;
    void do_learn_one(const Record& record) override;

private:
    void calibrate(std::span<const Record> window);
    std::uint64_t oldest_live() const;

    double radius_;       // 0 until calibrated
    int k_;
    int window_w_;        // 0 until calibrated
    std::deque<Node> nodes_;
    std::uint64_t next_arrival_ = 0;
};

}  // namespace odstream
