#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>

#include "odstream/config.hpp"
#include "odstream/record.hpp"

namespace odstream {

/// Online-detector contract shared by all seven algorithms.
///
/// Lifecycle: a freshly constructed detector is untrained (version 0).
/// Each fit_window() call increments the version by exactly one and
/// warm-starts from the current state. score_one() is read-only and valid
/// once version >= 1. learn_one() folds in a single record without
/// touching the version (versions count window fits only).
///
/// Concurrency: single writer. Concurrent score_one() calls on one
/// detector are safe; fit_window()/learn_one() must not race with anything.
///
/// Determinism: equal (kind, config, seed, training input) produces
/// byte-equal serialized states and equal score sequences. All internal
/// randomness derives from the seed and the version counter.
class Detector {
public:
    virtual ~Detector() = default;

    virtual DetectorKind kind() const = 0;
    std::uint32_t version() const { return version_; }
    std::uint64_t seed() const { return seed_; }

    /// Fits one window, warm-starting from the current state.
    /// Throws std::invalid_argument on an empty window or dimension mismatch.
    void fit_window(std::span<const Record> window);

    /// Scores one record; higher = more anomalous. Read-only.
    /// Throws std::logic_error while untrained.
    AnomalyScore score_one(const Record& record) const;

    /// Single-record update (test-time-update path). Version unchanged.
    void learn_one(const Record& record);

    /// Number of feature vectors currently buffered inside the model
    /// (reference sets, ISB nodes, ...). Used by the harness to assert
    /// window-bounded memory; parameter-only models report 0.
    virtual std::size_t buffered_points() const { return 0; }

    /// Serializes the model-specific payload (header excluded).
    virtual void save_payload(std::ostream& out) const = 0;
    virtual void load_payload(std::istream& in) = 0;

protected:
    Detector(std::uint64_t seed) : seed_(seed) {}

    virtual void do_fit_window(std::span<const Record> window) = 0;
    virtual AnomalyScore do_score_one(const Record& record) const = 0;
    virtual void do_learn_one(const Record& record) = 0;

    /// Deterministic per-window RNG seed derived from (seed, version).
    std::uint64_t window_seed(std::uint32_t version, std::uint64_t salt = 0) const;

    std::uint32_t version_ = 0;
    std::uint64_t seed_ = 0;
    std::size_t dim_ = 0;  // fixed after the first fit/learn

    friend void save_state(const Detector& det, const DetectorConfig& cfg,
                           const std::string& path);
    friend std::unique_ptr<Detector> load_state(const std::string& path);
};

std::unique_ptr<Detector> make_detector(DetectorKind kind,
                                        const DetectorConfig& cfg,
                                        std::uint64_t seed);

/// Checkpoint file: magic "ODS1", kind tag (u8), version (u32), seed (u64),
/// config digest (u64), then the detector payload.
void save_state(const Detector& det, const DetectorConfig& cfg,
                const std::string& path);
std::unique_ptr<Detector> load_state(const std::string& path);

}  // namespace odstream
