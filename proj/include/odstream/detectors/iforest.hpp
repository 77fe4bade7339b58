#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "odstream/detector.hpp"

namespace odstream {

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t size = 0;  // points routed here during the build
};

// Nodes in depth-first order, root at index 0.
using IsolationTree = std::vector<TreeNode>;

// Average unsuccessful-search depth of a BST with m points:
// c(1) = 0, c(2) = 1, c(m) = 2 H(m-1) - 2 (m-1)/m.
double iforest_c_factor(std::size_t m);

// Builds one isolation tree. Recursion stops on a single point, on points
// identical in every feature, or at the height limit. Split feature is drawn
// uniformly among features with nonzero range; the threshold is drawn as a
// fraction of that range, strictly inside (min, max), so the structure is
// preserved under per-feature affine maps x -> a x + b (a > 0) at equal seeds.
IsolationTree build_isolation_tree(const std::vector<std::vector<double>>& sample,
                                   int height_limit, std::mt19937_64& rng);

// Depth of the leaf x routes to plus c(leaf size).
double tree_path_length(const IsolationTree& tree, const std::vector<double>& x);

// Ensemble score 2^(-E[h(x)] / c(psi)); in (0,1), higher = more anomalous.
double iforest_score(const std::vector<IsolationTree>& forest, std::size_t psi,
                     const std::vector<double>& x);

// Isolation forest with an adaptive retrain rule: each window fit measures the
// anomaly rate r (fraction of window points scoring above 0.5 under the
// current forest, r = 1 while untrained) and rebuilds every tree from the
// window when r exceeds threshold_u, otherwise keeps the forest.
class IforestAsdDetector final : public Detector {
public:
    IforestAsdDetector(const DetectorConfig& cfg, std::uint64_t seed);

    DetectorKind kind() const override { return DetectorKind::iforest_asd; }
    std::size_t buffered_points() const override { return ring_.size(); }

    double last_window_rate() const { return last_window_rate_; }
    std::uint64_t forest_builds() const { return builds_; }
    const std::vector<IsolationTree>& forest() const { return forest_; }
    std::size_t psi() const { return psi_used_; }

    void save_payload(std::ostream& out) const override;
    void load_payload(std::istream& in) override;

protected:
    void do_fit_window(std::span<const Record> window) override;
    AnomalyScore do_score_one(const Record& record) const override;
    void do_learn_one(const Record& record) override;

private:
    void rebuild_forest(const std::vector<std::vector<double>>& data);
    double anomaly_rate(const std::vector<std::vector<double>>& data) const;

    int trees_;
    int psi_cap_;
    double threshold_u_;

    std::vector<IsolationTree> forest_;
    std::size_t psi_used_ = 0;
    double last_window_rate_ = 1.0;
    std::uint64_t builds_ = 0;

    // Recent points kept for single-record updates; refreshed by window fits.
    std::size_t ring_limit_ = 0;
    std::vector<std::vector<double>> ring_;
    double ewma_rate_ = 1.0;  // smoothed anomaly rate driving learn_one rebuilds
};

}  // namespace odstream
