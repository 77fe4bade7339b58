#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "odstream/detector.hpp"
#include "odstream/record.hpp"

namespace odstream {

struct WindowConfig {
    std::size_t length_w = 256;
    std::size_t stride_s = 128;

    // stride <= length keeps windows overlapping or tumbling, never gapped.
    void validate() const;
};

struct Window {
    std::size_t index = 0;  // 1-based: window i covers [(i-1)*S, (i-1)*S + W)
    std::vector<Record> records;
};

/// Count-based sliding window. push() buffers at most length_w records and
/// emits a full window exactly when a window boundary is crossed, i.e. after
/// record counts W, W+S, W+2S, ...
class WindowBuffer {
public:
    explicit WindowBuffer(WindowConfig cfg);

    std::optional<Window> push(const Record& record);

    std::size_t pushed() const { return pushed_; }
    std::size_t emitted() const { return emitted_; }
    /// Records currently buffered (the tail of the stream, at most length_w).
    std::span<const Record> pending() const;

private:
    WindowConfig cfg_;
    std::vector<Record> buf_;  // kept contiguous so pending() can be a span
    std::size_t pushed_ = 0;
    std::size_t emitted_ = 0;
};

struct TrainStats {
    std::size_t windows_fit = 0;   // fit_window calls, including the fallback
    bool partial_fallback = false;  // stream never filled one window
    std::vector<double> window_ms;  // wall time of each fit
    std::size_t peak_buffered = 0;  // max records held in buffer + detector
};

/// Chains window fits m1 -> m2 -> ... over the stream and returns the final
/// state. Streams shorter than one window get a single partial fit; trailing
/// records after the last emitted window are dropped.
std::unique_ptr<Detector> train_incremental(DetectorKind kind,
                                            const DetectorConfig& detector_cfg,
                                            const WindowConfig& window_cfg,
                                            std::span<const Record> train_stream,
                                            std::uint64_t seed,
                                            TrainStats* stats = nullptr);

}  // namespace odstream
