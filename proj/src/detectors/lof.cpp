#include "odstream/detectors/lof.hpp"

#include <cmath>

#include "odstream/kernels.hpp"
#include "odstream/serialize.hpp"

namespace odstream {
namespace lof {

double reachability_distance(double k_distance_b, double d_ab) {
    if (k_distance_b < 0.0 || d_ab < 0.0) {
        throw std::invalid_argument("reachability_distance: negative input");
    }
    return std::max(k_distance_b, d_ab);
}

namespace {

double lrd_from_neighbors(const std::vector<kernels::Neighbor>& neighbors,
                          const std::vector<double>& k_distance) {
    double sum = 0.0;
    for (const auto& [dist, idx] : neighbors) {
        sum += reachability_distance(k_distance[idx], dist);
    }
    const double mean = sum / static_cast<double>(neighbors.size());
    return mean > 0.0 ? 1.0 / mean : kDensityClamp;
}

}  // namespace

Reference Reference::build(std::vector<std::vector<double>> points, int k) {
    if (k < 1) throw std::invalid_argument("lof.k must be positive");
    if (points.size() <= static_cast<std::size_t>(k)) {
        throw std::invalid_argument("lof: reference too small (need more than k points)");
    }
    Reference ref;
    ref.points = std::move(points);
    ref.k = k;

    const auto graph = kernels::knn_graph(ref.points, static_cast<std::size_t>(k));
    const std::size_t n = ref.points.size();
    ref.k_distance.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ref.k_distance[i] = graph[i].back().first;
    }
    ref.lrd.resize(n);
    const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < sn; ++i) {
        ref.lrd[static_cast<std::size_t>(i)] =
            lrd_from_neighbors(graph[static_cast<std::size_t>(i)], ref.k_distance);
    }
    return ref;
}

double Reference::score(const std::vector<double>& query) const {
    const auto neighbors =
        kernels::knn_of(points, query, static_cast<std::size_t>(k));
    const double lrd_query = lrd_from_neighbors(neighbors, k_distance);
    double lrd_sum = 0.0;
    for (const auto& [dist, idx] : neighbors) {
        lrd_sum += lrd[idx];
    }
    const double mean_neighbor_lrd = lrd_sum / static_cast<double>(neighbors.size());
    return mean_neighbor_lrd / lrd_query;
}

AnomalyScore lof_score(const std::vector<std::vector<double>>& reference,
                       const std::vector<double>& query, int k) {
    return Reference::build(reference, k).score(query);
}

}  // namespace lof

LofDetector::LofDetector(const DetectorConfig& cfg, std::uint64_t seed)
    : Detector(seed), k_(cfg.lof_k) {
    if (k_ < 1) throw std::invalid_argument("lof.k must be positive");
}

void LofDetector::do_fit_window(std::span<const Record> window) {
    std::vector<std::vector<double>> pts;
    pts.reserve(window.size());
    for (const auto& r : window) pts.push_back(r.features);
    ring_limit_ = window.size();
    ref_ = lof::Reference::build(std::move(pts), k_);
}

AnomalyScore LofDetector::do_score_one(const Record& record) const {
    return ref_.score(record.features);
}

void LofDetector::do_learn_one(const Record& record) {
    auto pts = ref_.points;
    pts.push_back(record.features);
    const std::size_t limit = ring_limit_ > 0 ? ring_limit_ : 256;
    while (pts.size() > limit) pts.erase(pts.begin());
    ref_ = lof::Reference::build(std::move(pts), k_);
}

void LofDetector::save_payload(std::ostream& out) const {
    io::write_pod<std::uint64_t>(out, dim_);
    io::write_pod<std::int32_t>(out, k_);
    io::write_pod<std::uint64_t>(out, ring_limit_);
    io::write_pod<std::uint64_t>(out, ref_.points.size());
    for (const auto& p : ref_.points) io::write_vec(out, p);
}

void LofDetector::load_payload(std::istream& in) {
    dim_ = io::read_pod<std::uint64_t>(in);
    k_ = io::read_pod<std::int32_t>(in);
    ring_limit_ = io::read_pod<std::uint64_t>(in);
    const auto n = io::read_pod<std::uint64_t>(in);
    std::vector<std::vector<double>> pts;
    pts.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) pts.push_back(io::read_vec(in));
    if (!pts.empty()) {
        ref_ = lof::Reference::build(std::move(pts), k_);
    }
}

}  // namespace odstream
