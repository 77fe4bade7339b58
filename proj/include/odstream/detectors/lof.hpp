#pragma once

#include "odstream/detector.hpp"

namespace odstream {
namespace lof {

/// Density clamp for points whose k neighbors are all coincident: a zero
/// mean reachability distance would make lrd infinite, so duplicates rank
/// as maximally dense instead.
inline constexpr double kDensityClamp = 1e12;

/// max{k-distance(B), d(A,B)}. Throws on negative input.
double reachability_distance(double k_distance_b, double d_ab);

/// Reference set with precomputed per-point k-distances and local
/// reachability densities. Build is OpenMP-parallel over points.
struct Reference {
    std::vector<std::vector<double>> points;
    std::vector<double> k_distance;
    std::vector<double> lrd;
    int k = 10;

    static Reference build(std::vector<std::vector<double>> points, int k);

    /// LOF of an external query: mean over its k nearest reference
    /// neighbors o of lrd(o) / lrd(query).
    double score(const std::vector<double>& query) const;
};

/// One-shot form of the operation; builds the reference and scores.
AnomalyScore lof_score(const std::vector<std::vector<double>>& reference,
                       const std::vector<double>& query, int k);

}  // namespace lof

class LofDetector final : public Detector {
public:
    LofDetector(const DetectorConfig& cfg, std::uint64_t seed);

    DetectorKind kind() const override { return DetectorKind::lof; }
    std::size_t buffered_points() const override { return ref_.points.size(); }

    void save_payload(std::ostream& out) const override;
    void load_payload(std::istream& in) override;

protected:
    void do_fit_window(std::span<const Record> window) override;
    AnomalyScore do_score_one(const Record& record) const override;
    void do_learn_one(const Record& record) override;

private:
    int k_;
    std::size_t ring_limit_ = 0;  // last fit window length, bounds learn_one growth
    lof::Reference ref_;          // rebuilt on every write
};

}  // namespace odstream
