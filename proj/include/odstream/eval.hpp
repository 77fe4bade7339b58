#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "odstream/config.hpp"
#include "odstream/ingest.hpp"
#include "odstream/record.hpp"
#include "odstream/windows.hpp"

namespace odstream {

enum class ScenarioKind : int {
    offline = 1,      // one fit over the whole training set, then test
    incremental = 2,  // sliding-window fits over the training stream, then test
};

/// Rank-based (Mann-Whitney) AUC with average ranks on ties:
/// (sum of positive ranks - P(P+1)/2) / (P*N). Equals the probability that a
/// random positive outscores a random negative, ties counting one half.
/// Throws std::invalid_argument on length mismatch, non-binary labels, or
/// single-class input (never silently returns 0.5).
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct EvalRow {
    std::string dataset;
    DetectorKind detector = DetectorKind::ocsvm;
    ScenarioKind scenario = ScenarioKind::offline;
    std::uint64_t seed = 0;
    std::optional<double> auc;  // nullopt = undefined (single-class test split)
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::size_t window = 0;  // effective values: scenario 1 reports n_train
    std::size_t stride = 0;
    double wall_ms = 0.0;
    std::string config_digest;
};

using EvalReport = std::vector<EvalRow>;

enum class SplitMode {
    stream_prefix,  // first train_fraction of the stream trains (default)
    random,
    stratified,
};

struct ScenarioOptions {
    double train_fraction = 0.7;
    SplitMode split_mode = SplitMode::stream_prefix;
    bool update_on_test = false;  // learn_one after scoring each test record
    TrainStats* train_stats = nullptr;  // optional instrumentation sink
};

/// Runs one grid cell. Both scenarios share one code path: scenario 1 is the
/// degenerate window length = stride = n_train, which makes the offline and
/// incremental runners provably identical at that point. The feature scaler
/// is fit on training data only, updated as windows arrive, and test records
/// are transformed with the final scaler.
EvalRow run_scenario(ScenarioKind scenario, DetectorKind detector,
                     const Dataset& dataset, const DetectorConfig& detector_cfg,
                     const WindowConfig& window_cfg, std::uint64_t seed,
                     const ScenarioOptions& opts = {});

/// Stable report order: dataset, detector (enum order), scenario, seed.
void sort_report(EvalReport& report);

/// CSV with the fixed header
/// dataset,detector,scenario,seed,auc,n_train,n_test,window,stride,wall_ms,config_digest.
/// AUC prints with 6 decimals, or the marker "undefined". Throws on an empty
/// report or unwritable path.
void write_report_csv(const EvalReport& report, const std::string& path);
EvalReport read_report_csv(const std::string& path);

/// JSON-lines mirror of the CSV columns; undefined AUC becomes null.
void write_report_jsonl(const EvalReport& report, const std::string& path);

}  // namespace odstream
