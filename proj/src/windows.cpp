#include "odstream/windows.hpp"

#include <chrono>
#include <stdexcept>

namespace odstream {

void WindowConfig::validate() const {
    if (length_w < 2) throw std::invalid_argument("window length must be >= 2");
    if (stride_s < 1) throw std::invalid_argument("window stride must be >= 1");
    if (stride_s > length_w) {
        throw std::invalid_argument("window stride must not exceed the length");
    }
}

WindowBuffer::WindowBuffer(WindowConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::optional<Window> WindowBuffer::push(const Record& record) {
    buf_.push_back(record);
    if (buf_.size() > cfg_.length_w) buf_.erase(buf_.begin());
    ++pushed_;
    if (pushed_ < cfg_.length_w) return std::nullopt;
    if ((pushed_ - cfg_.length_w) % cfg_.stride_s != 0) return std::nullopt;
    ++emitted_;
    return Window{emitted_, buf_};
}

std::span<const Record> WindowBuffer::pending() const {
    return {buf_.data(), buf_.size()};
}

std::unique_ptr<Detector> train_incremental(DetectorKind kind,
                                            const DetectorConfig& detector_cfg,
                                            const WindowConfig& window_cfg,
                                            std::span<const Record> train_stream,
                                            std::uint64_t seed,
                                            TrainStats* stats) {
    if (train_stream.empty()) {
        throw std::invalid_argument("train_incremental: empty stream");
    }
    auto detector = make_detector(kind, detector_cfg, seed);
    WindowBuffer buffer(window_cfg);
    TrainStats local;
    TrainStats& st = stats ? *stats : local;

    const auto fit = [&](std::span<const Record> records) {
        const auto start = std::chrono::steady_clock::now();
        detector->fit_window(records);
        const std::chrono::duration<double, std::milli> ms =
            std::chrono::steady_clock::now() - start;
        st.window_ms.push_back(ms.count());
        ++st.windows_fit;
        st.peak_buffered = std::max(
            st.peak_buffered, buffer.pending().size() + detector->buffered_points());
    };

    for (const auto& record : train_stream) {
        if (auto window = buffer.push(record)) fit(window->records);
    }
    if (buffer.emitted() == 0) {
        st.partial_fallback = true;
        fit(buffer.pending());
    }
    return detector;
}

}  // namespace odstream
