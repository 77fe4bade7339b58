#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace odstream {

/// One stream element. `seq` is the arrival ordinal and strictly increases
/// along a stream; `features` has a fixed length per stream and holds only
/// finite values after ingestion. `label` is 0 (normal) / 1 (outlier) when
/// the stream is labeled.
struct Record {
    std::uint64_t seq = 0;
    std::vector<double> features;
    std::optional<int> label;
};

/// Anomaly scores follow one convention everywhere: larger means more
/// anomalous. Detectors whose native polarity differs flip it internally.
using AnomalyScore = double;

enum class DetectorKind {
    ocsvm,
    iforest_asd,
    lof,
    abod,
    exact_storm,
    kitnet,
    knn_cad,
};

inline constexpr DetectorKind kAllDetectorKinds[] = {
    DetectorKind::ocsvm,     DetectorKind::iforest_asd, DetectorKind::lof,
    DetectorKind::abod,      DetectorKind::exact_storm, DetectorKind::kitnet,
    DetectorKind::knn_cad,
};

std::string to_string(DetectorKind kind);

/// Parses a detector name. Accepts the canonical names plus the historical
/// alias "knn-asd" for knn-cad. Throws std::invalid_argument otherwise.
DetectorKind detector_kind_from_string(const std::string& name);

inline void check_dimension(std::size_t expected, std::size_t got) {
    if (expected != got) {
        throw std::invalid_argument("feature dimension mismatch: expected " +
                                    std::to_string(expected) + ", got " +
                                    std::to_string(got));
    }
}

}  // namespace odstream
