#include "odstream/detectors/kitnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "odstream/serialize.hpp"

namespace odstream {

std::size_t kitnet_hidden_dim(std::size_t input_dim, double beta) {
    if (input_dim <= 1) return 1;
    const auto wanted = static_cast<std::size_t>(
        std::max(1.0, std::ceil(beta * static_cast<double>(input_dim))));
    return std::min(wanted, input_dim - 1);
}

Autoencoder Autoencoder::init(std::size_t input_dim, std::size_t hidden_dim,
                              double lr0, std::uint64_t seed) {
    if (input_dim == 0 || hidden_dim == 0) {
        throw std::invalid_argument("autoencoder: zero dimension");
    }
    Autoencoder ae;
    ae.input_dim = input_dim;
    ae.hidden_dim = hidden_dim;
    ae.lr0 = lr0;
    std::mt19937_64 rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(input_dim));
    std::uniform_real_distribution<double> dist(-bound, bound);
    ae.w1.resize(hidden_dim * input_dim);
    ae.w2.resize(input_dim * hidden_dim);
    for (double& w : ae.w1) w = dist(rng);
    for (double& w : ae.w2) w = dist(rng);
    ae.b1.assign(hidden_dim, 0.0);
    ae.b2.assign(input_dim, 0.0);
    return ae;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct ForwardPass {
    std::vector<double> hidden;
    std::vector<double> recon;
};

ForwardPass run_forward(const Autoencoder& ae, const std::vector<double>& x) {
    if (x.size() != ae.input_dim) {
        throw std::invalid_argument("autoencoder: dimension mismatch");
    }
    ForwardPass fp;
    fp.hidden.resize(ae.hidden_dim);
    for (std::size_t j = 0; j < ae.hidden_dim; ++j) {
        double z = ae.b1[j];
        const double* row = &ae.w1[j * ae.input_dim];
        for (std::size_t k = 0; k < ae.input_dim; ++k) z += row[k] * x[k];
        fp.hidden[j] = sigmoid(z);
    }
    fp.recon.resize(ae.input_dim);
    for (std::size_t i = 0; i < ae.input_dim; ++i) {
        double z = ae.b2[i];
        const double* row = &ae.w2[i * ae.hidden_dim];
        for (std::size_t j = 0; j < ae.hidden_dim; ++j) z += row[j] * fp.hidden[j];
        fp.recon[i] = sigmoid(z);
    }
    return fp;
}

double rmse_of(const std::vector<double>& recon, const std::vector<double>& x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = recon[i] - x[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(x.size()));
}

}  // namespace

std::pair<std::vector<double>, double> ae_forward(const Autoencoder& ae,
                                                  const std::vector<double>& x) {
    auto fp = run_forward(ae, x);
    const double rmse = rmse_of(fp.recon, x);
    return {std::move(fp.recon), rmse};
}

void ae_sgd_step(Autoencoder& ae, const std::vector<double>& x) {
    const auto fp = run_forward(ae, x);
    ae.steps += 1;
    const double lr = ae.lr0 / std::sqrt(static_cast<double>(ae.steps));
    const double inv_dim = 1.0 / static_cast<double>(ae.input_dim);

    // delta2 = dL/dz2 with L = sum((xhat - x)^2) / dim and sigmoid output.
    std::vector<double> delta2(ae.input_dim);
    for (std::size_t i = 0; i < ae.input_dim; ++i) {
        const double xhat = fp.recon[i];
        delta2[i] = 2.0 * inv_dim * (xhat - x[i]) * xhat * (1.0 - xhat);
    }
    std::vector<double> delta1(ae.hidden_dim);
    for (std::size_t j = 0; j < ae.hidden_dim; ++j) {
        double back = 0.0;
        for (std::size_t i = 0; i < ae.input_dim; ++i) {
            back += delta2[i] * ae.w2[i * ae.hidden_dim + j];
        }
        const double h = fp.hidden[j];
        delta1[j] = back * h * (1.0 - h);
    }
    for (std::size_t i = 0; i < ae.input_dim; ++i) {
        double* row = &ae.w2[i * ae.hidden_dim];
        for (std::size_t j = 0; j < ae.hidden_dim; ++j) {
            row[j] -= lr * delta2[i] * fp.hidden[j];
        }
        ae.b2[i] -= lr * delta2[i];
    }
    for (std::size_t j = 0; j < ae.hidden_dim; ++j) {
        double* row = &ae.w1[j * ae.input_dim];
        for (std::size_t k = 0; k < ae.input_dim; ++k) {
            row[k] -= lr * delta1[j] * x[k];
        }
        ae.b1[j] -= lr * delta1[j];
    }
}

void RunningMinMax::update(const std::vector<double>& x) {
    if (!seen) {
        lo = x;
        hi = x;
        seen = true;
        return;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        lo[i] = std::min(lo[i], x[i]);
        hi[i] = std::max(hi[i], x[i]);
    }
}

std::vector<double> RunningMinMax::apply(const std::vector<double>& x) const {
    if (!seen) return std::vector<double>(x.size(), 0.0);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double range = hi[i] - lo[i];
        out[i] = range > 0.0 ? (x[i] - lo[i]) / range : 0.0;
    }
    return out;
}

std::vector<std::vector<std::size_t>> learn_feature_map(
    const std::vector<std::vector<double>>& sample, int m_max) {
    if (m_max < 1) throw std::invalid_argument("kitnet.m_max must be positive");
    if (sample.size() < 2) {
        throw std::invalid_argument("kitnet: need at least 2 records to learn the feature map");
    }
    const std::size_t n = sample.size();
    const std::size_t d = sample[0].size();

    std::vector<double> mean(d, 0.0), var(d, 0.0);
    for (const auto& row : sample) {
        for (std::size_t f = 0; f < d; ++f) mean[f] += row[f];
    }
    for (std::size_t f = 0; f < d; ++f) mean[f] /= static_cast<double>(n);
    for (const auto& row : sample) {
        for (std::size_t f = 0; f < d; ++f) {
            const double c = row[f] - mean[f];
            var[f] += c * c;
        }
    }

    // dist[f][g] = 1 - |corr|; exactly 1 whenever either feature is constant,
    // which pins constant features into singleton groups below.
    std::vector<std::vector<double>> dist(d, std::vector<double>(d, 0.0));
    for (std::size_t f = 0; f < d; ++f) {
        for (std::size_t g = f + 1; g < d; ++g) {
            double value = 1.0;
            if (var[f] > 0.0 && var[g] > 0.0) {
                double cov = 0.0;
                for (const auto& row : sample) {
                    cov += (row[f] - mean[f]) * (row[g] - mean[g]);
                }
                const double corr = cov / std::sqrt(var[f] * var[g]);
                value = std::clamp(1.0 - std::abs(corr), 0.0, 1.0);
            }
            dist[f][g] = value;
            dist[g][f] = value;
        }
    }

    std::vector<std::vector<std::size_t>> clusters;
    clusters.reserve(d);
    for (std::size_t f = 0; f < d; ++f) clusters.push_back({f});

    const auto linkage = [&](const std::vector<std::size_t>& a,
                             const std::vector<std::size_t>& b) {
        double sum = 0.0;
        for (std::size_t f : a) {
            for (std::size_t g : b) sum += dist[f][g];
        }
        return sum / static_cast<double>(a.size() * b.size());
    };

    // Greedy average-linkage merges; a pair with distance >= 1 never merges.
    const double merge_cutoff = 1.0 - 1e-12;
    while (clusters.size() > 1) {
        double best = merge_cutoff;
        std::size_t bi = 0, bj = 0;
        bool found = false;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                if (clusters[i].size() + clusters[j].size() >
                    static_cast<std::size_t>(m_max)) {
                    continue;
                }
                const double link = linkage(clusters[i], clusters[j]);
                if (link < best) {
                    best = link;
                    bi = i;
                    bj = j;
                    found = true;
                }
            }
        }
        if (!found) break;
        auto merged = clusters[bi];
        merged.insert(merged.end(), clusters[bj].begin(), clusters[bj].end());
        std::sort(merged.begin(), merged.end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
        clusters[bi] = std::move(merged);
    }
    std::sort(clusters.begin(), clusters.end());
    return clusters;
}

KitnetDetector::KitnetDetector(const DetectorConfig& cfg, std::uint64_t seed)
    : Detector(seed), m_max_(cfg.kitnet_m_max), beta_(cfg.kitnet_beta), lr_(cfg.kitnet_lr) {
    if (m_max_ < 1) throw std::invalid_argument("kitnet.m_max must be positive");
    if (beta_ <= 0.0 || beta_ > 1.0) {
        throw std::invalid_argument("kitnet.beta must lie in (0, 1]");
    }
    if (lr_ < 0.0) throw std::invalid_argument("kitnet.lr must be non-negative");
}

std::vector<double> KitnetDetector::slice(const std::vector<double>& features,
                                          std::size_t group) const {
    std::vector<double> out;
    out.reserve(groups_[group].size());
    for (std::size_t f : groups_[group]) out.push_back(features[f]);
    return out;
}

void KitnetDetector::init_ensemble(std::span<const Record> window) {
    std::vector<std::vector<double>> sample;
    sample.reserve(window.size());
    for (const auto& r : window) sample.push_back(r.features);
    groups_ = learn_feature_map(sample, m_max_);
    grace_count_ = window.size();

    group_norms_.assign(groups_.size(), RunningMinMax{});
    ensemble_.clear();
    ensemble_.reserve(groups_.size());
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        const std::size_t in = groups_[g].size();
        ensemble_.push_back(Autoencoder::init(in, kitnet_hidden_dim(in, beta_), lr_,
                                              window_seed(version_ + 1, 2000 + g)));
    }
    output_norm_ = RunningMinMax{};
    const std::size_t out_in = groups_.size();
    output_ae_ = Autoencoder::init(out_in, kitnet_hidden_dim(out_in, beta_), lr_,
                                   window_seed(version_ + 1, 2999));
}

void KitnetDetector::train_record(const std::vector<double>& features) {
    std::vector<double> rmses(groups_.size());
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        const auto raw = slice(features, g);
        group_norms_[g].update(raw);
        const auto xn = group_norms_[g].apply(raw);
        rmses[g] = ae_forward(ensemble_[g], xn).second;  // pre-update error
        ae_sgd_step(ensemble_[g], xn);
    }
    output_norm_.update(rmses);
    const auto rn = output_norm_.apply(rmses);
    ae_sgd_step(output_ae_, rn);
}

void KitnetDetector::do_fit_window(std::span<const Record> window) {
    if (groups_.empty()) init_ensemble(window);
    for (const auto& r : window) train_record(r.features);
}

AnomalyScore KitnetDetector::do_score_one(const Record& record) const {
    if (groups_.empty()) {
        throw std::logic_error("kitnet: feature map not learned yet (grace phase)");
    }
    std::vector<double> rmses(groups_.size());
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        const auto xn = group_norms_[g].apply(slice(record.features, g));
        rmses[g] = ae_forward(ensemble_[g], xn).second;
    }
    const auto rn = output_norm_.apply(rmses);
    return ae_forward(output_ae_, rn).second;
}

void KitnetDetector::do_learn_one(const Record& record) {
    if (groups_.empty()) {
        throw std::logic_error("kitnet: feature map not learned yet, fit a window first");
    }
    train_record(record.features);
}

void KitnetDetector::save_payload(std::ostream& out) const {
    io::write_pod<std::uint64_t>(out, dim_);
    io::write_pod<std::int32_t>(out, m_max_);
    io::write_pod<double>(out, beta_);
    io::write_pod<double>(out, lr_);
    io::write_pod<std::uint64_t>(out, grace_count_);
    io::write_pod<std::uint64_t>(out, groups_.size());
    const auto write_norm = [&](const RunningMinMax& nm) {
        io::write_pod<std::uint8_t>(out, nm.seen ? 1 : 0);
        io::write_vec(out, nm.lo);
        io::write_vec(out, nm.hi);
    };
    const auto write_ae = [&](const Autoencoder& ae) {
        io::write_pod<std::uint64_t>(out, ae.input_dim);
        io::write_pod<std::uint64_t>(out, ae.hidden_dim);
        io::write_pod<double>(out, ae.lr0);
        io::write_pod<std::uint64_t>(out, ae.steps);
        io::write_vec(out, ae.w1);
        io::write_vec(out, ae.b1);
        io::write_vec(out, ae.w2);
        io::write_vec(out, ae.b2);
    };
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        io::write_u64_vec(out, groups_[g]);
        write_norm(group_norms_[g]);
        write_ae(ensemble_[g]);
    }
    write_norm(output_norm_);
    if (!groups_.empty()) write_ae(output_ae_);
}

void KitnetDetector::load_payload(std::istream& in) {
    dim_ = io::read_pod<std::uint64_t>(in);
    m_max_ = io::read_pod<std::int32_t>(in);
    beta_ = io::read_pod<double>(in);
    lr_ = io::read_pod<double>(in);
    grace_count_ = io::read_pod<std::uint64_t>(in);
    const auto n_groups = io::read_pod<std::uint64_t>(in);
    const auto read_norm = [&](RunningMinMax& nm) {
        nm.seen = io::read_pod<std::uint8_t>(in) != 0;
        nm.lo = io::read_vec(in);
        nm.hi = io::read_vec(in);
    };
    const auto read_ae = [&](Autoencoder& ae) {
        ae.input_dim = io::read_pod<std::uint64_t>(in);
        ae.hidden_dim = io::read_pod<std::uint64_t>(in);
        ae.lr0 = io::read_pod<double>(in);
        ae.steps = io::read_pod<std::uint64_t>(in);
        ae.w1 = io::read_vec(in);
        ae.b1 = io::read_vec(in);
        ae.w2 = io::read_vec(in);
        ae.b2 = io::read_vec(in);
    };
    groups_.assign(n_groups, {});
    group_norms_.assign(n_groups, RunningMinMax{});
    ensemble_.assign(n_groups, Autoencoder{});
    for (std::uint64_t g = 0; g < n_groups; ++g) {
        groups_[g] = io::read_u64_vec(in);
        read_norm(group_norms_[g]);
        read_ae(ensemble_[g]);
    }
    read_norm(output_norm_);
    if (n_groups > 0) read_ae(output_ae_);
}

}  // namespace odstream
