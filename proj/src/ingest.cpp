#include "odstream/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "odstream/csv.hpp"

namespace odstream {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& raw, double& out) {
    const std::string s = trim(raw);
    if (s.empty()) return false;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return false;
    if (!std::isfinite(v)) return false;
    out = v;
    return true;
}

void fill_label_stats(Dataset& ds) {
    ds.meta.n_points = ds.records.size();
    ds.meta.n_features = ds.records.empty() ? ds.feature_names.size()
                                            : ds.records.front().features.size();
    std::size_t pos = 0, labeled = 0;
    for (const auto& r : ds.records) {
        if (r.label) {
            ++labeled;
            if (*r.label == 1) ++pos;
        }
    }
    if (labeled > 0) {
        ds.meta.pos_pct = 100.0 * static_cast<double>(pos) / static_cast<double>(labeled);
        ds.meta.neg_pct = 100.0 - ds.meta.pos_pct;
    }
}

std::string stem_of(const std::string& path) {
    auto slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
    return base;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const LoadOptions& opts) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) throw std::runtime_error("'" + path + "': empty file");
    const auto& header = rows.front();

    std::size_t label_idx = header.size();
    std::vector<std::size_t> feature_cols;
    std::vector<std::string> feature_names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = trim(header[c]);
        if (name == label_column) {
            label_idx = c;
            continue;
        }
        if (std::find(opts.drop_columns.begin(), opts.drop_columns.end(), name) !=
            opts.drop_columns.end()) {
            continue;
        }
        feature_cols.push_back(c);
        feature_names.push_back(name);
    }
    if (label_idx == header.size()) {
        throw std::runtime_error("'" + path + "': label column '" + label_column +
                                 "' not found");
    }
    if (rows.size() == 1) throw std::runtime_error("'" + path + "': no data rows");

    // Column type by first non-empty cell: numeric if it parses as a finite
    // double, categorical otherwise. Categoricals get first-appearance ids.
    std::vector<bool> is_numeric(feature_cols.size(), true);
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (feature_cols[f] >= rows[r].size()) continue;
            const std::string cell = trim(rows[r][feature_cols[f]]);
            if (cell.empty()) continue;
            double unused;
            is_numeric[f] = parse_double(cell, unused);
            break;
        }
    }
    std::vector<std::map<std::string, double>> encodings(feature_cols.size());

    Dataset ds;
    ds.name = stem_of(path);
    ds.feature_names = std::move(feature_names);
    std::size_t dropped = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            ++dropped;
            continue;
        }
        Record rec;
        rec.features.reserve(feature_cols.size());
        bool ok = true;
        for (std::size_t f = 0; f < feature_cols.size() && ok; ++f) {
            const std::string cell = trim(row[feature_cols[f]]);
            if (cell.empty()) {
                ok = false;
                break;
            }
            if (is_numeric[f]) {
                double v;
                ok = parse_double(cell, v);
                if (ok) rec.features.push_back(v);
            } else {
                auto& enc = encodings[f];
                auto it = enc.find(cell);
                if (it == enc.end()) {
                    it = enc.emplace(cell, static_cast<double>(enc.size())).first;
                }
                rec.features.push_back(it->second);
            }
        }
        if (ok) {
            const std::string raw_label = trim(row[label_idx]);
            int label = -1;
            for (const auto& [text, value] : opts.label_map) {
                if (raw_label == text) {
                    label = value;
                    break;
                }
            }
            if (label < 0) {
                if (raw_label == "0") label = 0;
                else if (raw_label == "1") label = 1;
            }
            if (label == 0 || label == 1) {
                rec.label = label;
            } else {
                ok = false;
            }
        }
        if (!ok) {
            ++dropped;
            continue;
        }
        rec.seq = ds.records.size();
        ds.records.push_back(std::move(rec));
    }
    if (ds.records.empty()) {
        throw std::runtime_error("'" + path + "': zero usable rows");
    }
    ds.meta.dropped_rows = dropped;
    fill_label_stats(ds);
    return ds;
}

void RunningScaler::update(const Record& record) {
    if (count_ == 0) {
        mean_.assign(record.features.size(), 0.0);
        m2_.assign(record.features.size(), 0.0);
    }
    check_dimension(mean_.size(), record.features.size());
    ++count_;
    for (std::size_t i = 0; i < mean_.size(); ++i) {
        const double x = record.features[i];
        const double delta = x - mean_[i];
        mean_[i] += delta / static_cast<double>(count_);
        m2_[i] += delta * (x - mean_[i]);
    }
}

double RunningScaler::variance(std::size_t feature) const {
    if (count_ < 2) throw std::logic_error("scaler: need at least 2 records");
    return m2_.at(feature) / static_cast<double>(count_ - 1);
}

double RunningScaler::stddev(std::size_t feature) const {
    return std::sqrt(variance(feature));
}

Record RunningScaler::transform(const Record& record) const {
    if (count_ < 2) throw std::logic_error("scaler: need at least 2 records");
    check_dimension(mean_.size(), record.features.size());
    Record out = record;
    for (std::size_t i = 0; i < mean_.size(); ++i) {
        const double sd = stddev(i);
        out.features[i] = sd > 0.0 ? (record.features[i] - mean_[i]) / sd : 0.0;
    }
    return out;
}

namespace {

std::size_t train_count_for(std::size_t n, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("train fraction must lie in (0, 1)");
    }
    if (n < 2) throw std::invalid_argument("need at least 2 records to split");
    const auto raw = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(n)));
    return std::clamp<std::size_t>(raw, 1, n - 1);
}

std::pair<Dataset, Dataset> partition(const Dataset& ds,
                                      const std::vector<char>& in_train) {
    Dataset train, test;
    train.name = ds.name;
    test.name = ds.name;
    train.feature_names = ds.feature_names;
    test.feature_names = ds.feature_names;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        (in_train[i] ? train : test).records.push_back(ds.records[i]);
    }
    fill_label_stats(train);
    fill_label_stats(test);
    return {std::move(train), std::move(test)};
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction,
                                  bool stratified, std::uint64_t seed) {
    const std::size_t n = dataset.records.size();
    std::vector<char> in_train(n, 0);
    std::mt19937_64 rng(seed);

    if (!stratified) {
        const std::size_t n_train = train_count_for(n, train_fraction);
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i = 0; i < n_train; ++i) in_train[idx[i]] = 1;
    } else {
        std::vector<std::size_t> by_class[2];
        for (std::size_t i = 0; i < n; ++i) {
            const auto& label = dataset.records[i].label;
            if (!label || (*label != 0 && *label != 1)) {
                throw std::invalid_argument("stratified split needs 0/1 labels");
            }
            by_class[*label].push_back(i);
        }
        if (by_class[0].empty() || by_class[1].empty()) {
            throw std::invalid_argument("stratified split needs both classes");
        }
        for (auto& members : by_class) {
            std::shuffle(members.begin(), members.end(), rng);
            const auto take = std::clamp<std::size_t>(
                static_cast<std::size_t>(std::llround(
                    train_fraction * static_cast<double>(members.size()))),
                members.size() > 1 ? 1 : 0, members.size());
            for (std::size_t i = 0; i < take; ++i) in_train[members[i]] = 1;
        }
    }
    return partition(dataset, in_train);
}

std::pair<Dataset, Dataset> split_stream_prefix(const Dataset& dataset,
                                                double train_fraction) {
    const std::size_t n = dataset.records.size();
    const std::size_t n_train = train_count_for(n, train_fraction);
    std::vector<char> in_train(n, 0);
    for (std::size_t i = 0; i < n_train; ++i) in_train[i] = 1;
    return partition(dataset, in_train);
}

Dataset gen_synthetic(std::size_t n, std::size_t d, double contamination,
                      bool drift, std::uint64_t seed) {
    if (!(contamination > 0.0 && contamination < 0.5)) {
        throw std::invalid_argument("contamination must lie in (0, 0.5)");
    }
    if (n == 0 || d == 0) throw std::invalid_argument("n and d must be positive");
    const auto n_out = static_cast<std::size_t>(
        std::llround(contamination * static_cast<double>(n)));
    if (n_out < 1) throw std::invalid_argument("n * contamination must be >= 1");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> shell_radius(4.0, 6.0);

    // Outlier positions: sample without replacement, uniformly over the stream.
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < n_out; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    std::vector<char> is_outlier(n, 0);
    for (std::size_t i = 0; i < n_out; ++i) is_outlier[pool[i]] = 1;

    const auto unit_vector = [&] {
        std::vector<double> v(d);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (auto& x : v) {
                x = normal(rng);
                norm += x * x;
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (auto& x : v) x /= norm;
        return v;
    };
    const std::vector<double> drift_dir = unit_vector();

    Dataset ds;
    ds.name = "synthetic";
    ds.feature_names.reserve(d);
    for (std::size_t f = 0; f < d; ++f) ds.feature_names.push_back("f" + std::to_string(f));
    ds.records.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double shift =
            drift && n > 1 ? 3.0 * static_cast<double>(t) / static_cast<double>(n - 1)
                           : 0.0;
        Record rec;
        rec.seq = t;
        rec.features.resize(d);
        if (is_outlier[t]) {
            const double r = shell_radius(rng);
            const auto dir = unit_vector();
            for (std::size_t f = 0; f < d; ++f) rec.features[f] = r * dir[f];
            rec.label = 1;
        } else {
            for (std::size_t f = 0; f < d; ++f) rec.features[f] = normal(rng);
            rec.label = 0;
        }
        for (std::size_t f = 0; f < d; ++f) rec.features[f] += shift * drift_dir[f];
        ds.records.push_back(std::move(rec));
    }
    fill_label_stats(ds);
    return ds;
}

void write_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    const std::size_t d = dataset.records.empty() ? dataset.feature_names.size()
                                                  : dataset.records.front().features.size();
    for (std::size_t f = 0; f < d; ++f) out << 'f' << f << ',';
    out << "label\n";
    char buf[40];
    for (const auto& rec : dataset.records) {
        for (double v : rec.features) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << buf << ',';
        }
        out << (rec.label ? *rec.label : 0) << '\n';
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace odstream
