#include "odstream/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "odstream/csv.hpp"
#include "odstream/detector.hpp"

namespace odstream {

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("auc: scores and labels differ in length");
    }
    std::size_t positives = 0, negatives = 0;
    for (int label : labels) {
        if (label == 1) ++positives;
        else if (label == 0) ++negatives;
        else throw std::invalid_argument("auc: labels must be 0 or 1");
    }
    if (positives == 0 || negatives == 0) {
        throw std::invalid_argument("auc undefined: all labels are one class");
    }

    const std::size_t n = scores.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks over tie runs; ranks are 1-based.
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        const double avg_rank = static_cast<double>(i + 1 + j) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (labels[idx[k]] == 1) positive_rank_sum += avg_rank;
        }
        i = j;
    }
    const double p = static_cast<double>(positives);
    const double m = static_cast<double>(negatives);
    return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * m);
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

const char* split_mode_name(SplitMode mode) {
    switch (mode) {
        case SplitMode::stream_prefix: return "stream-prefix";
        case SplitMode::random: return "random";
        case SplitMode::stratified: return "stratified";
    }
    return "?";
}

std::string run_digest(const DetectorConfig& cfg, const ScenarioOptions& opts) {
    std::string text = cfg.canonical_text();
    text += "eval.train_fraction=" + fmt_double(opts.train_fraction) + "\n";
    text += std::string("eval.split=") + split_mode_name(opts.split_mode) + "\n";
    text += std::string("eval.update_on_test=") + (opts.update_on_test ? "1" : "0") + "\n";
    return digest_hex(fnv1a64(text));
}

}  // namespace

EvalRow run_scenario(ScenarioKind scenario, DetectorKind detector,
                     const Dataset& dataset, const DetectorConfig& detector_cfg,
                     const WindowConfig& window_cfg, std::uint64_t seed,
                     const ScenarioOptions& opts) {
    for (const auto& rec : dataset.records) {
        if (!rec.label) {
            throw std::invalid_argument("run_scenario: dataset must be fully labeled");
        }
    }

    auto [train, test] = [&] {
        switch (opts.split_mode) {
            case SplitMode::random:
                return split(dataset, opts.train_fraction, false, seed);
            case SplitMode::stratified:
                return split(dataset, opts.train_fraction, true, seed);
            case SplitMode::stream_prefix:
            default:
                return split_stream_prefix(dataset, opts.train_fraction);
        }
    }();
    const std::size_t n_train = train.records.size();
    const std::size_t n_test = test.records.size();

    // Scenario 1 is the degenerate window: one fit covering the training set.
    const WindowConfig effective =
        scenario == ScenarioKind::offline
            ? WindowConfig{std::max<std::size_t>(2, n_train),
                           std::max<std::size_t>(2, n_train)}
            : window_cfg;
    effective.validate();

    const auto start = std::chrono::steady_clock::now();
    auto model = make_detector(detector, detector_cfg, seed);
    RunningScaler scaler;
    WindowBuffer buffer(effective);
    TrainStats local_stats;
    TrainStats& st = opts.train_stats ? *opts.train_stats : local_stats;
    std::optional<std::uint64_t> folded_up_to;

    const auto fit_scaled = [&](std::span<const Record> raw) {
        // Fold only records the scaler has not seen; overlapping windows
        // must not double-count their shared span.
        for (const auto& rec : raw) {
            if (!folded_up_to || rec.seq > *folded_up_to) {
                scaler.update(rec);
                folded_up_to = rec.seq;
            }
        }
        std::vector<Record> scaled;
        scaled.reserve(raw.size());
        for (const auto& rec : raw) scaled.push_back(scaler.transform(rec));
        const auto t0 = std::chrono::steady_clock::now();
        model->fit_window(scaled);
        const std::chrono::duration<double, std::milli> ms =
            std::chrono::steady_clock::now() - t0;
        st.window_ms.push_back(ms.count());
        ++st.windows_fit;
        st.peak_buffered = std::max(
            st.peak_buffered, buffer.pending().size() + model->buffered_points());
    };

    for (const auto& rec : train.records) {
        if (auto window = buffer.push(rec)) fit_scaled(window->records);
    }
    if (buffer.emitted() == 0) {
        st.partial_fallback = true;
        fit_scaled(buffer.pending());
    }

    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(n_test);
    labels.reserve(n_test);
    for (const auto& rec : test.records) {
        const Record scaled = scaler.transform(rec);
        scores.push_back(model->score_one(scaled));
        labels.push_back(*rec.label);
        if (opts.update_on_test) {
            model->learn_one(scaled);
            st.peak_buffered = std::max(
                st.peak_buffered, buffer.pending().size() + model->buffered_points());
        }
    }
    const std::chrono::duration<double, std::milli> wall =
        std::chrono::steady_clock::now() - start;

    EvalRow row;
    row.dataset = dataset.name;
    row.detector = detector;
    row.scenario = scenario;
    row.seed = seed;
    const bool both_classes =
        std::find(labels.begin(), labels.end(), 1) != labels.end() &&
        std::find(labels.begin(), labels.end(), 0) != labels.end();
    if (both_classes) row.auc = auc(scores, labels);
    row.n_train = n_train;
    row.n_test = n_test;
    row.window = effective.length_w;
    row.stride = effective.stride_s;
    row.wall_ms = wall.count();
    row.config_digest = run_digest(detector_cfg, opts);
    return row;
}

void sort_report(EvalReport& report) {
    std::stable_sort(report.begin(), report.end(), [](const EvalRow& a, const EvalRow& b) {
        return std::tie(a.dataset, a.detector, a.scenario, a.seed) <
               std::tie(b.dataset, b.detector, b.scenario, b.seed);
    });
}

namespace {

constexpr const char* kReportHeader =
    "dataset,detector,scenario,seed,auc,n_train,n_test,window,stride,wall_ms,config_digest";

std::string auc_text(const std::optional<double>& auc_value) {
    if (!auc_value) return "undefined";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", *auc_value);
    return buf;
}

}  // namespace

void write_report_csv(const EvalReport& report, const std::string& path) {
    if (report.empty()) throw std::invalid_argument("write_report: empty report");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << kReportHeader << '\n';
    char buf[32];
    for (const auto& row : report) {
        std::snprintf(buf, sizeof(buf), "%.3f", row.wall_ms);
        out << csv::escape(row.dataset) << ',' << to_string(row.detector) << ','
            << static_cast<int>(row.scenario) << ',' << row.seed << ','
            << auc_text(row.auc) << ',' << row.n_train << ',' << row.n_test << ','
            << row.window << ',' << row.stride << ',' << buf << ','
            << row.config_digest << '\n';
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

EvalReport read_report_csv(const std::string& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) throw std::runtime_error("'" + path + "': empty report file");
    std::string header;
    for (std::size_t i = 0; i < rows.front().size(); ++i) {
        if (i) header += ',';
        header += rows.front()[i];
    }
    if (header != kReportHeader) {
        throw std::runtime_error("'" + path + "': unexpected report header");
    }
    EvalReport report;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        if (cells.size() != 11) {
            throw std::runtime_error("'" + path + "': malformed report row");
        }
        EvalRow row;
        row.dataset = cells[0];
        row.detector = detector_kind_from_string(cells[1]);
        const int scenario = std::stoi(cells[2]);
        if (scenario != 1 && scenario != 2) {
            throw std::runtime_error("'" + path + "': bad scenario value");
        }
        row.scenario = static_cast<ScenarioKind>(scenario);
        row.seed = std::stoull(cells[3]);
        if (cells[4] != "undefined") row.auc = std::stod(cells[4]);
        row.n_train = std::stoull(cells[5]);
        row.n_test = std::stoull(cells[6]);
        row.window = std::stoull(cells[7]);
        row.stride = std::stoull(cells[8]);
        row.wall_ms = std::stod(cells[9]);
        row.config_digest = cells[10];
        report.push_back(std::move(row));
    }
    return report;
}

void write_report_jsonl(const EvalReport& report, const std::string& path) {
    if (report.empty()) throw std::invalid_argument("write_report: empty report");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (const auto& row : report) {
        nlohmann::ordered_json j;
        j["dataset"] = row.dataset;
        j["detector"] = to_string(row.detector);
        j["scenario"] = static_cast<int>(row.scenario);
        j["seed"] = row.seed;
        if (row.auc) j["auc"] = *row.auc;
        else j["auc"] = nullptr;
        j["n_train"] = row.n_train;
        j["n_test"] = row.n_test;
        j["window"] = row.window;
        j["stride"] = row.stride;
        j["wall_ms"] = row.wall_ms;
        j["config_digest"] = row.config_digest;
        out << j.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace odstream
