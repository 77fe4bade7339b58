#include "odstream/detectors/ocsvm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "odstream/serialize.hpp"

namespace odstream {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

void ocsvm_sgd_step(OcsvmModel& model, const std::vector<double>& x) {
    if (x.size() != model.w.size()) {
        throw std::invalid_argument("ocsvm: dimension mismatch");
    }
    model.steps += 1;
    const double lr = model.lr0 / std::sqrt(static_cast<double>(model.steps));
    const bool violation = dot(model.w, x) < model.rho;
    const double inv_nu = 1.0 / model.nu;
    if (violation) {
        for (std::size_t i = 0; i < model.w.size(); ++i) {
            model.w[i] -= lr * (model.w[i] - inv_nu * x[i]);
        }
        model.rho -= lr * (-1.0 + inv_nu);
    } else {
        for (double& wi : model.w) wi -= lr * wi;
        model.rho += lr;
    }
}

double ocsvm_score(const OcsvmModel& model, const std::vector<double>& x) {
    if (x.size() != model.w.size()) {
        throw std::invalid_argument("ocsvm: dimension mismatch");
    }
    return model.rho - dot(model.w, x);
}

OcsvmDetector::OcsvmDetector(const DetectorConfig& cfg, std::uint64_t seed)
    : Detector(seed), epochs_(cfg.ocsvm_epochs) {
    if (cfg.ocsvm_nu <= 0.0 || cfg.ocsvm_nu > 1.0) {
        throw std::invalid_argument("ocsvm.nu must lie in (0, 1]");
    }
    if (cfg.ocsvm_lr <= 0.0) {
        throw std::invalid_argument("ocsvm.lr must be positive");
    }
    if (epochs_ < 1) {
        throw std::invalid_argument("ocsvm.epochs must be positive");
    }
    model_.nu = cfg.ocsvm_nu;
    model_.lr0 = cfg.ocsvm_lr;
}

void OcsvmDetector::ensure_initialized() {
    if (model_.w.empty()) model_.w.assign(dim_, 0.0);
}

void OcsvmDetector::do_fit_window(std::span<const Record> window) {
    ensure_initialized();
    std::vector<std::size_t> order(window.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(window_seed(version_ + 1));
    for (int epoch = 0; epoch < epochs_; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            ocsvm_sgd_step(model_, window[idx].features);
        }
    }
}

AnomalyScore OcsvmDetector::do_score_one(const Record& record) const {
    return ocsvm_score(model_, record.features);
}

void OcsvmDetector::do_learn_one(const Record& record) {
    ensure_initialized();
    ocsvm_sgd_step(model_, record.features);
}

void OcsvmDetector::save_payload(std::ostream& out) const {
    io::write_pod<std::uint64_t>(out, dim_);
    io::write_pod<std::int32_t>(out, epochs_);
    io::write_pod<double>(out, model_.nu);
    io::write_pod<double>(out, model_.lr0);
    io::write_pod<double>(out, model_.rho);
    io::write_pod<std::uint64_t>(out, model_.steps);
    io::write_vec(out, model_.w);
}

void OcsvmDetector::load_payload(std::istream& in) {
    dim_ = io::read_pod<std::uint64_t>(in);
    epochs_ = io::read_pod<std::int32_t>(in);
    model_.nu = io::read_pod<double>(in);
    model_.lr0 = io::read_pod<double>(in);
    model_.rho = io::read_pod<double>(in);
    model_.steps = io::read_pod<std::uint64_t>(in);
    model_.w = io::read_vec(in);
}

}  // namespace odstream
