#include "odstream/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace odstream::kernels {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
    return std::sqrt(squared_distance(a, b));
}

std::vector<Neighbor> knn_of(const std::vector<std::vector<double>>& refs,
                             const std::vector<double>& query, std::size_t k,
                             std::size_t skip) {
    std::vector<Neighbor> all;
    all.reserve(refs.size());
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (i == skip) continue;
        all.emplace_back(distance(refs[i], query), i);
    }
    if (k > all.size()) {
        throw std::invalid_argument("knn_of: k exceeds reference size");
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k),
                      all.end());
    all.resize(k);
    return all;
}

std::vector<std::vector<Neighbor>> knn_graph(
    const std::vector<std::vector<double>>& refs, std::size_t k) {
    const auto n = static_cast<std::ptrdiff_t>(refs.size());
    std::vector<std::vector<Neighbor>> graph(refs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        graph[static_cast<std::size_t>(i)] =
            knn_of(refs, refs[static_cast<std::size_t>(i)], k,
                   static_cast<std::size_t>(i));
    }
    return graph;
}

AngleMoments angle_moments(const std::vector<std::vector<double>>& refs,
                           const std::vector<double>& query) {
    const std::size_t n = refs.size();
    std::vector<std::vector<double>> diffs(n);
    std::vector<double> sq_norms(n);
    for (std::size_t i = 0; i < n; ++i) {
        diffs[i].resize(query.size());
        double sq = 0.0;
        for (std::size_t f = 0; f < query.size(); ++f) {
            const double d = refs[i][f] - query[f];
            diffs[i][f] = d;
            sq += d * d;
        }
        sq_norms[i] = sq;
    }

    // Per-i partial sums over j > i, combined in index order afterwards:
    // the totals are independent of how the outer loop is scheduled.
    std::vector<AngleMoments> partial(n);
    const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t si = 0; si < sn; ++si) {
        const auto i = static_cast<std::size_t>(si);
        if (sq_norms[i] == 0.0) continue;
        AngleMoments acc;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (sq_norms[j] == 0.0) continue;
            double dot = 0.0;
            for (std::size_t f = 0; f < query.size(); ++f) {
                dot += diffs[i][f] * diffs[j][f];
            }
            const double cosine = dot / std::sqrt(sq_norms[i] * sq_norms[j]);
            const double w = 1.0 / (sq_norms[i] * sq_norms[j]);
            acc.weight_sum += w;
            acc.weighted_cos += w * cosine;
            acc.weighted_cos_sq += w * cosine * cosine;
            acc.valid_pairs += 1;
        }
        partial[i] = acc;
    }

    AngleMoments total;
    for (const auto& p : partial) {
        total.weight_sum += p.weight_sum;
        total.weighted_cos += p.weighted_cos;
        total.weighted_cos_sq += p.weighted_cos_sq;
        total.valid_pairs += p.valid_pairs;
    }
    return total;
}

namespace {

double percentile_of(std::vector<double>& values, double q) {
    if (values.empty()) {
        throw std::invalid_argument("percentile of empty set");
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace

double pairwise_distance_percentile(const std::vector<std::vector<double>>& points,
                                    double q) {
    const std::size_t n = points.size();
    if (n < 2) {
        throw std::invalid_argument("pairwise percentile needs at least 2 points");
    }
    std::vector<std::vector<double>> rows(n);
    const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t si = 0; si < sn; ++si) {
        const auto i = static_cast<std::size_t>(si);
        auto& row = rows[i];
        row.reserve(n - i - 1);
        for (std::size_t j = i + 1; j < n; ++j) {
            row.push_back(distance(points[i], points[j]));
        }
    }
    std::vector<double> all;
    all.reserve(n * (n - 1) / 2);
    for (auto& row : rows) {
        all.insert(all.end(), row.begin(), row.end());
    }
    return percentile_of(all, q);
}

namespace serial {

std::vector<std::vector<Neighbor>> knn_graph(
    const std::vector<std::vector<double>>& refs, std::size_t k) {
    std::vector<std::vector<Neighbor>> graph(refs.size());
    for (std::size_t i = 0; i < refs.size(); ++i) {
        graph[i] = knn_of(refs, refs[i], k, i);
    }
    return graph;
}

AngleMoments angle_moments(const std::vector<std::vector<double>>& refs,
                           const std::vector<double>& query) {
    const std::size_t n = refs.size();
    AngleMoments total;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> di(query.size());
        double sq_i = 0.0;
        for (std::size_t f = 0; f < query.size(); ++f) {
            di[f] = refs[i][f] - query[f];
            sq_i += di[f] * di[f];
        }
        if (sq_i == 0.0) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            double sq_j = 0.0;
            double dot = 0.0;
            for (std::size_t f = 0; f < query.size(); ++f) {
                const double dj = refs[j][f] - query[f];
                sq_j += dj * dj;
                dot += di[f] * dj;
            }
            if (sq_j == 0.0) continue;
            const double cosine = dot / std::sqrt(sq_i * sq_j);
            const double w = 1.0 / (sq_i * sq_j);
            total.weight_sum += w;
            total.weighted_cos += w * cosine;
            total.weighted_cos_sq += w * cosine * cosine;
            total.valid_pairs += 1;
        }
    }
    return total;
}

double pairwise_distance_percentile(const std::vector<std::vector<double>>& points,
                                    double q) {
    const std::size_t n = points.size();
    if (n < 2) {
        throw std::invalid_argument("pairwise percentile needs at least 2 points");
    }
    std::vector<double> all;
    all.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            all.push_back(distance(points[i], points[j]));
        }
    }
    return percentile_of(all, q);
}

}  // namespace serial

}  // namespace odstream::kernels
