#pragma once

#include <cstdint>
#include <string>

namespace odstream {

/// Flat bag of per-detector hyperparameters. Field names mirror the config
/// keys exposed on the CLI (storm.radius, lof.k, ...). A value of 0 for
/// storm_radius or storm_window means "auto-calibrate on the first fit".
struct DetectorConfig {
    // exact-storm
    double storm_radius = 0.0;   // 0 = 5th-percentile pairwise distance of first window
    int storm_k = 5;
    int storm_window = 0;        // 0 = first fit window length

    // lof
    int lof_k = 10;

    // knn-cad
    int cad_k = 5;

    // iforest-asd
    int iforest_trees = 100;
    int iforest_psi = 256;       // effective subsample = min(psi, window length)
    double iforest_threshold_u = 0.05;  // assumed background anomaly rate; a
                                        // window flagging above it forces a
                                        // forest rebuild

    // ocsvm
    double ocsvm_nu = 0.1;
    double ocsvm_lr = 0.01;
    int ocsvm_epochs = 3;

    // kitnet
    int kitnet_m_max = 10;
    double kitnet_beta = 0.75;
    double kitnet_lr = 0.1;

    /// Canonical key=value rendering, one key per line, fixed order. Used
    /// for config digests and for echoing resolved settings.
    std::string canonical_text() const;
};

/// Parses the canonical_text rendering back into a config.
/// Throws std::invalid_argument on unknown keys or malformed lines.
DetectorConfig parse_canonical_config(const std::string& text);

/// FNV-1a 64-bit over a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

std::string digest_hex(std::uint64_t digest);

}  // namespace odstream
