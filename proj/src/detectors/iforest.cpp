#include "odstream/detectors/iforest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "odstream/serialize.hpp"

namespace odstream {

double iforest_c_factor(std::size_t m) {
    if (m <= 1) return 0.0;
    double harmonic = 0.0;
    for (std::size_t i = 1; i + 1 <= m; ++i) harmonic += 1.0 / static_cast<double>(i);
    const double dm = static_cast<double>(m);
    return 2.0 * harmonic - 2.0 * (dm - 1.0) / dm;
}

namespace {

// A feature is splittable only if some representable value lies strictly
// between its min and max, which keeps the threshold draw well defined.
bool splittable(double lo, double hi) {
    return lo < hi && std::nextafter(lo, hi) < hi;
}

struct TreeBuilder {
    const std::vector<std::vector<double>>& pts;
    int height_limit;
    std::mt19937_64& rng;
    IsolationTree& out;

    std::int32_t build(std::vector<std::size_t>& idx, std::size_t begin,
                       std::size_t end, int depth) {
        const auto my = static_cast<std::int32_t>(out.size());
        out.push_back(TreeNode{});
        const std::size_t m = end - begin;
        out[my].size = static_cast<std::uint32_t>(m);
        if (m <= 1 || depth >= height_limit) return my;

        const std::size_t dim = pts[idx[begin]].size();
        std::vector<std::size_t> candidates;
        std::vector<double> lows, highs;
        for (std::size_t f = 0; f < dim; ++f) {
            double lo = pts[idx[begin]][f];
            double hi = lo;
            for (std::size_t i = begin + 1; i < end; ++i) {
                lo = std::min(lo, pts[idx[i]][f]);
                hi = std::max(hi, pts[idx[i]][f]);
            }
            if (splittable(lo, hi)) {
                candidates.push_back(f);
                lows.push_back(lo);
                highs.push_back(hi);
            }
        }
        if (candidates.empty()) return my;  // all points identical, stay a leaf

        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        const std::size_t c = pick(rng);
        const std::size_t f = candidates[c];
        const double lo = lows[c];
        const double hi = highs[c];

        // Draw the threshold as a fraction of the range so equal seeds keep
        // the same splits under affine rescaling of the data.
        double threshold = 0.0;
        std::uniform_real_distribution<double> frac(0.0, 1.0);
        bool inside = false;
        for (int attempt = 0; attempt < 64 && !inside; ++attempt) {
            threshold = lo + frac(rng) * (hi - lo);
            inside = threshold > lo && threshold < hi;
        }
        if (!inside) threshold = std::nextafter(lo, hi);

        const auto split = std::partition(
            idx.begin() + static_cast<std::ptrdiff_t>(begin),
            idx.begin() + static_cast<std::ptrdiff_t>(end),
            [&](std::size_t i) { return pts[i][f] < threshold; });
        const auto mid = static_cast<std::size_t>(split - idx.begin());

        out[my].feature = static_cast<std::int32_t>(f);
        out[my].threshold = threshold;
        const auto left = build(idx, begin, mid, depth + 1);
        const auto right = build(idx, mid, end, depth + 1);
        out[my].left = left;
        out[my].right = right;
        return my;
    }
};

}  // namespace

IsolationTree build_isolation_tree(const std::vector<std::vector<double>>& sample,
                                   int height_limit, std::mt19937_64& rng) {
    if (sample.empty()) throw std::invalid_argument("iforest: empty tree sample");
    IsolationTree tree;
    std::vector<std::size_t> idx(sample.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    TreeBuilder builder{sample, height_limit, rng, tree};
    builder.build(idx, 0, sample.size(), 0);
    return tree;
}

double tree_path_length(const IsolationTree& tree, const std::vector<double>& x) {
    if (tree.empty()) throw std::logic_error("iforest: empty tree");
    std::int32_t node = 0;
    double depth = 0.0;
    while (tree[node].feature >= 0) {
        node = x[static_cast<std::size_t>(tree[node].feature)] < tree[node].threshold
                   ? tree[node].left
                   : tree[node].right;
        depth += 1.0;
    }
    return depth + iforest_c_factor(tree[node].size);
}

double iforest_score(const std::vector<IsolationTree>& forest, std::size_t psi,
                     const std::vector<double>& x) {
    if (forest.empty()) throw std::logic_error("iforest: no trees");
    double total = 0.0;
    for (const auto& tree : forest) total += tree_path_length(tree, x);
    const double mean = total / static_cast<double>(forest.size());
    const double denom = iforest_c_factor(psi);
    if (denom <= 0.0) return 0.5;
    return std::pow(2.0, -mean / denom);
}

IforestAsdDetector::IforestAsdDetector(const DetectorConfig& cfg, std::uint64_t seed)
    : Detector(seed),
      trees_(cfg.iforest_trees),
      psi_cap_(cfg.iforest_psi),
      threshold_u_(cfg.iforest_threshold_u) {
    if (trees_ < 1) throw std::invalid_argument("iforest.trees must be positive");
    if (psi_cap_ < 1) throw std::invalid_argument("iforest.psi must be positive");
    if (threshold_u_ <= 0.0 || threshold_u_ >= 1.0) {
        throw std::invalid_argument("iforest.threshold_u must lie in (0, 1)");
    }
}

void IforestAsdDetector::rebuild_forest(const std::vector<std::vector<double>>& data) {
    const std::size_t n = data.size();
    psi_used_ = std::min<std::size_t>(static_cast<std::size_t>(psi_cap_), n);
    const int height_limit =
        psi_used_ <= 1
            ? 0
            : static_cast<int>(std::ceil(std::log2(static_cast<double>(psi_used_))));

    std::vector<std::uint64_t> tree_seeds(static_cast<std::size_t>(trees_));
    for (std::size_t t = 0; t < tree_seeds.size(); ++t) {
        tree_seeds[t] = window_seed(static_cast<std::uint32_t>(builds_ + 1),
                                    1000 + static_cast<std::uint64_t>(t));
    }

    forest_.assign(static_cast<std::size_t>(trees_), IsolationTree{});
    const auto st = static_cast<std::ptrdiff_t>(trees_);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < st; ++t) {
        std::mt19937_64 rng(tree_seeds[static_cast<std::size_t>(t)]);
        // Subsample psi points without replacement (partial Fisher-Yates).
        std::vector<std::size_t> pool(n);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < psi_used_; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        std::vector<std::vector<double>> sample;
        sample.reserve(psi_used_);
        for (std::size_t i = 0; i < psi_used_; ++i) sample.push_back(data[pool[i]]);
        forest_[static_cast<std::size_t>(t)] =
            build_isolation_tree(sample, height_limit, rng);
    }
    builds_ += 1;
}

double IforestAsdDetector::anomaly_rate(
    const std::vector<std::vector<double>>& data) const {
    if (forest_.empty()) return 1.0;
    const auto n = static_cast<std::ptrdiff_t>(data.size());
    std::vector<int> flagged(data.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        flagged[static_cast<std::size_t>(i)] =
            iforest_score(forest_, psi_used_, data[static_cast<std::size_t>(i)]) > 0.5
                ? 1
                : 0;
    }
    const auto count = std::accumulate(flagged.begin(), flagged.end(), 0);
    return static_cast<double>(count) / static_cast<double>(data.size());
}

void IforestAsdDetector::do_fit_window(std::span<const Record> window) {
    std::vector<std::vector<double>> data;
    data.reserve(window.size());
    for (const auto& r : window) data.push_back(r.features);

    last_window_rate_ = anomaly_rate(data);
    if (last_window_rate_ > threshold_u_) rebuild_forest(data);

    ring_ = std::move(data);
    ring_limit_ = window.size();
    ewma_rate_ = last_window_rate_ > threshold_u_ ? 0.0 : last_window_rate_;
}

AnomalyScore IforestAsdDetector::do_score_one(const Record& record) const {
    return iforest_score(forest_, psi_used_, record.features);
}

void IforestAsdDetector::do_learn_one(const Record& record) {
    ring_.push_back(record.features);
    const std::size_t limit = ring_limit_ > 0 ? ring_limit_ : 256;
    while (ring_.size() > limit) ring_.erase(ring_.begin());

    const double flagged =
        forest_.empty()
            ? 1.0
            : (iforest_score(forest_, psi_used_, record.features) > 0.5 ? 1.0 : 0.0);
    const double lambda = 1.0 / static_cast<double>(limit);
    ewma_rate_ = (1.0 - lambda) * ewma_rate_ + lambda * flagged;
    if (ewma_rate_ > threshold_u_ && ring_.size() >= 2) {
        rebuild_forest(ring_);
        ewma_rate_ = 0.0;
    }
}

void IforestAsdDetector::save_payload(std::ostream& out) const {
    io::write_pod<std::uint64_t>(out, dim_);
    io::write_pod<std::int32_t>(out, trees_);
    io::write_pod<std::int32_t>(out, psi_cap_);
    io::write_pod<double>(out, threshold_u_);
    io::write_pod<std::uint64_t>(out, psi_used_);
    io::write_pod<double>(out, last_window_rate_);
    io::write_pod<std::uint64_t>(out, builds_);
    io::write_pod<double>(out, ewma_rate_);
    io::write_pod<std::uint64_t>(out, ring_limit_);
    io::write_pod<std::uint64_t>(out, ring_.size());
    for (const auto& p : ring_) io::write_vec(out, p);
    io::write_pod<std::uint64_t>(out, forest_.size());
    for (const auto& tree : forest_) {
        io::write_pod<std::uint64_t>(out, tree.size());
        for (const auto& node : tree) {
            io::write_pod<std::int32_t>(out, node.feature);
            io::write_pod<double>(out, node.threshold);
            io::write_pod<std::int32_t>(out, node.left);
            io::write_pod<std::int32_t>(out, node.right);
            io::write_pod<std::uint32_t>(out, node.size);
        }
    }
}

void IforestAsdDetector::load_payload(std::istream& in) {
    dim_ = io::read_pod<std::uint64_t>(in);
    trees_ = io::read_pod<std::int32_t>(in);
    psi_cap_ = io::read_pod<std::int32_t>(in);
    threshold_u_ = io::read_pod<double>(in);
    psi_used_ = io::read_pod<std::uint64_t>(in);
    last_window_rate_ = io::read_pod<double>(in);
    builds_ = io::read_pod<std::uint64_t>(in);
    ewma_rate_ = io::read_pod<double>(in);
    ring_limit_ = io::read_pod<std::uint64_t>(in);
    const auto ring_n = io::read_pod<std::uint64_t>(in);
    ring_.clear();
    ring_.reserve(ring_n);
    for (std::uint64_t i = 0; i < ring_n; ++i) ring_.push_back(io::read_vec(in));
    const auto forest_n = io::read_pod<std::uint64_t>(in);
    forest_.assign(forest_n, IsolationTree{});
    for (auto& tree : forest_) {
        const auto nodes = io::read_pod<std::uint64_t>(in);
        tree.resize(nodes);
        for (auto& node : tree) {
            node.feature = io::read_pod<std::int32_t>(in);
            node.threshold = io::read_pod<double>(in);
            node.left = io::read_pod<std::int32_t>(in);
            node.right = io::read_pod<std::int32_t>(in);
            node.size = io::read_pod<std::uint32_t>(in);
        }
    }
}

}  // namespace odstream
