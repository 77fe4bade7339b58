#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "odstream/record.hpp"

namespace odstream {

struct DatasetMeta {
    std::size_t n_points = 0;
    std::size_t n_features = 0;
    // Percent shares of label 0 / label 1 records; they sum to 100 for a
    // labeled dataset ("95: 5" style imbalance descriptions).
    double neg_pct = 0.0;
    double pos_pct = 0.0;
    std::size_t dropped_rows = 0;  // rows skipped at load (bad cells, bad labels)
};

struct Dataset {
    std::string name;
    std::vector<Record> records;
    std::vector<std::string> feature_names;
    DatasetMeta meta;
};

struct LoadOptions {
    std::vector<std::string> drop_columns;
    // Explicit label text -> {0,1} mapping, e.g. {{"N",0},{"Y",1}}. Labels
    // not in the map and not literally "0"/"1" drop the row.
    std::vector<std::pair<std::string, int>> label_map;
};

/// Loads a labeled CSV (header row required). Numeric/categorical per column
/// is decided by the first non-empty cell; categoricals are integer-encoded
/// in first-appearance order. Rows with missing or unparseable cells, or
/// unmappable labels, are dropped and counted in meta.dropped_rows.
/// Throws on a missing label column, an empty file, or zero usable rows.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const LoadOptions& opts = {});

/// Welford single-pass standardizer. Fit by update(), then transform()
/// z-scores features; zero-variance features map to 0.
class RunningScaler {
public:
    void update(const Record& record);
    Record transform(const Record& record) const;  // needs count() >= 2

    std::size_t count() const { return count_; }
    const std::vector<double>& mean() const { return mean_; }
    double variance(std::size_t feature) const;  // sample variance m2/(n-1)
    double stddev(std::size_t feature) const;

private:
    std::size_t count_ = 0;
    std::vector<double> mean_, m2_;
};

/// Seeded random split into (train, test); both sides keep stream order.
/// Stratified mode preserves the class ratio within one record per class.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction,
                                  bool stratified, std::uint64_t seed);

/// Stream-ordered split: the first ~train_fraction of the stream trains,
/// the remainder tests. The natural protocol for drifting streams, where
/// test data is what arrives after training stops.
std::pair<Dataset, Dataset> split_stream_prefix(const Dataset& dataset,
                                                double train_fraction);

/// Labeled synthetic stream: inliers are standard Gaussian, outliers
/// (fraction = contamination, positions uniformly interleaved) sit in a
/// radial shell at distance [4,6]. With drift on, the population mean
/// slides linearly to a distance-3 offset by the final record.
Dataset gen_synthetic(std::size_t n, std::size_t d, double contamination,
                      bool drift, std::uint64_t seed);

/// Writes a dataset as CSV with columns f0..f{d-1},label.
void write_csv(const Dataset& dataset, const std::string& path);

}  // namespace odstream
