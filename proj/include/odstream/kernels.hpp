#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace odstream::kernels {

/// (distance, reference index), ascending by (distance, index).
using Neighbor = std::pair<double, std::size_t>;

double squared_distance(const std::vector<double>& a, const std::vector<double>& b);
double distance(const std::vector<double>& a, const std::vector<double>& b);

/// k nearest points to `query` among `refs`, ties broken by index.
/// `skip` (if < refs.size()) excludes one reference, used for self-queries.
std::vector<Neighbor> knn_of(const std::vector<std::vector<double>>& refs,
                             const std::vector<double>& query, std::size_t k,
                             std::size_t skip = static_cast<std::size_t>(-1));

/// For every reference point: its k nearest neighbors among the others.
/// OpenMP-parallel over points; per-point results are order-independent,
/// so output is identical for any thread count.
std::vector<std::vector<Neighbor>> knn_graph(
    const std::vector<std::vector<double>>& refs, std::size_t k);

/// Weighted first/second moments of the pairwise angle cosines seen from
/// `query`: for unordered pairs (i, j) of reference points with nonzero
/// difference vectors, cos = <di,dj>/(|di||dj|), weight = 1/(|di|^2 |dj|^2).
/// Accumulated as per-i partials summed in index order, so the result does
/// not depend on the OpenMP thread count.
struct AngleMoments {
    double weight_sum = 0.0;
    double weighted_cos = 0.0;
    double weighted_cos_sq = 0.0;
    std::size_t valid_pairs = 0;
};
AngleMoments angle_moments(const std::vector<std::vector<double>>& refs,
                           const std::vector<double>& query);

/// q-th percentile (q in [0,1], linear interpolation) of all pairwise
/// distances among `points`. Used for auto-calibrating the STORM radius.
double pairwise_distance_percentile(const std::vector<std::vector<double>>& points,
                                    double q);

/// Serial reference implementations, kept for testing and benchmarking the
/// OpenMP kernels against. Textbook loops, no tiling or partials.
namespace serial {

std::vector<std::vector<Neighbor>> knn_graph(
    const std::vector<std::vector<double>>& refs, std::size_t k);

AngleMoments angle_moments(const std::vector<std::vector<double>>& refs,
                           const std::vector<double>& query);

double pairwise_distance_percentile(const std::vector<std::vector<double>>& points,
                                    double q);

}  // namespace serial

}  // namespace odstream::kernels
