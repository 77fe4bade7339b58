#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "odstream/detector.hpp"
#include "odstream/ingest.hpp"
#include "odstream/windows.hpp"

using namespace odstream;

namespace {

std::vector<Record> counting_stream(std::size_t n, std::size_t d = 2) {
    std::mt19937_64 rng(404);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<Record> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].seq = i;
        out[i].features.resize(d);
        for (auto& v : out[i].features) v = dist(rng);
    }
    return out;
}

std::vector<Window> collect_windows(std::span<const Record> stream,
                                    WindowConfig cfg) {
    WindowBuffer buf(cfg);
    std::vector<Window> out;
    for (const auto& r : stream) {
        if (auto w = buf.push(r)) out.push_back(std::move(*w));
    }
    return out;
}

std::string detector_bytes(const Detector& det) {
    const DetectorConfig cfg;
    static int counter = 0;
    const auto path = (std::filesystem::temp_directory_path() /
                       ("odstream_win_state_" + std::to_string(++counter) + ".bin"))
                          .string();
    save_state(det, cfg, path);
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    std::remove(path.c_str());
    return s.str();
}

}  // namespace

TEST_CASE("window config validation") {
    const auto validate = [](std::size_t w, std::size_t s) {
        WindowConfig{w, s}.validate();
    };
    CHECK_NOTHROW(validate(256, 128));
    CHECK_NOTHROW(validate(16, 16));
    CHECK_THROWS_AS(validate(16, 17), std::invalid_argument);  // gapped stream
    CHECK_THROWS_AS(validate(1, 1), std::invalid_argument);    // W < 2
    CHECK_THROWS_AS(validate(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(validate(16, 0), std::invalid_argument);
}

TEST_CASE("defaults are a 256-record window with stride 128") {
    WindowConfig cfg;
    CHECK(cfg.length_w == 256);
    CHECK(cfg.stride_s == 128);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("W=3 S=1 emits one window per record once full") {
    const auto stream = counting_stream(6);
    const auto windows = collect_windows(stream, WindowConfig{3, 1});
    REQUIRE(windows.size() == 4);
    for (std::size_t i = 0; i < windows.size(); ++i) {
        CHECK(windows[i].index == i + 1);
        REQUIRE(windows[i].records.size() == 3);
        // window i covers seq [(i) .. (i+2)]
        CHECK(windows[i].records.front().seq == i);
        CHECK(windows[i].records.back().seq == i + 2);
    }
}

TEST_CASE("W=10 S=2 halves emission cadence") {
    const auto stream = counting_stream(20);
    const auto windows = collect_windows(stream, WindowConfig{10, 2});
    // boundaries after 10, 12, 14, 16, 18, 20 records
    REQUIRE(windows.size() == 6);
    for (std::size_t i = 0; i < windows.size(); ++i) {
        CHECK(windows[i].records.size() == 10);
        CHECK(windows[i].records.front().seq == 2 * i);
        CHECK(windows[i].records.back().seq == 2 * i + 9);
    }
}

TEST_CASE("window count follows floor((n - W) / S) + 1") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t w = 2 + rng() % 30;
        const std::size_t s = 1 + rng() % w;
        const std::size_t n = rng() % 200;
        const auto windows = collect_windows(counting_stream(n), WindowConfig{w, s});
        const std::size_t expect = n >= w ? (n - w) / s + 1 : 0;
        CAPTURE(w);
        CAPTURE(s);
        CAPTURE(n);
        CHECK(windows.size() == expect);
    }
}

TEST_CASE("consecutive windows share exactly W - S records") {
    const std::size_t w = 12, s = 5;
    const auto windows = collect_windows(counting_stream(60), WindowConfig{w, s});
    REQUIRE(windows.size() >= 2);
    for (std::size_t i = 1; i < windows.size(); ++i) {
        std::vector<std::uint64_t> prev, cur, shared;
        for (const auto& r : windows[i - 1].records) prev.push_back(r.seq);
        for (const auto& r : windows[i].records) cur.push_back(r.seq);
        std::set_intersection(prev.begin(), prev.end(), cur.begin(), cur.end(),
                              std::back_inserter(shared));
        CHECK(shared.size() == w - s);
    }
}

TEST_CASE("buffer never holds more than one window of records") {
    WindowBuffer buf(WindowConfig{8, 3});
    const auto stream = counting_stream(40);
    for (const auto& r : stream) {
        buf.push(r);
        CHECK(buf.pending().size() <= 8);
    }
    CHECK(buf.pushed() == 40);
}

TEST_CASE("a 100-record stream with W=20 S=10 trains 9 windows") {
    const auto stream = counting_stream(100);
    TrainStats stats;
    auto det = train_incremental(DetectorKind::abod, DetectorConfig{},
                                 WindowConfig{20, 10}, stream, 1, &stats);
    CHECK(det->version() == 9);
    CHECK(stats.windows_fit == 9);
    CHECK_FALSE(stats.partial_fallback);
    CHECK(stats.window_ms.size() == 9);
    CHECK(stats.peak_buffered >= 20);
}

TEST_CASE("a stream of exactly one window trains once") {
    const auto stream = counting_stream(20);
    TrainStats stats;
    auto det = train_incremental(DetectorKind::lof, DetectorConfig{},
                                 WindowConfig{20, 5}, stream, 1, &stats);
    CHECK(det->version() == 1);
    CHECK_FALSE(stats.partial_fallback);
}

TEST_CASE("streams shorter than one window fall back to a single partial fit") {
    const auto stream = counting_stream(7);
    TrainStats stats;
    auto det = train_incremental(DetectorKind::abod, DetectorConfig{},
                                 WindowConfig{10, 5}, stream, 1, &stats);
    CHECK(det->version() == 1);
    CHECK(stats.partial_fallback);
    CHECK(stats.windows_fit == 1);
    CHECK(det->buffered_points() == 7);
}

TEST_CASE("an empty training stream is an error") {
    CHECK_THROWS_AS(train_incremental(DetectorKind::abod, DetectorConfig{},
                                      WindowConfig{10, 5}, {}, 1, nullptr),
                    std::invalid_argument);
}

TEST_CASE("trailing records after the last window boundary are dropped") {
    // 25 records, W=10, S=10: windows end at 10 and 20; records 20..24 unused.
    const auto stream = counting_stream(25);
    TrainStats stats;
    auto det = train_incremental(DetectorKind::abod, DetectorConfig{},
                                 WindowConfig{10, 10}, stream, 1, &stats);
    CHECK(det->version() == 2);
    // abod keeps the last fitted window verbatim: seq 10..19
    CHECK(det->buffered_points() == 10);
    const auto reference = detector_bytes(*det);
    auto direct = make_detector(DetectorKind::abod, DetectorConfig{}, 1);
    direct->fit_window(std::span<const Record>(stream).subspan(0, 10));
    direct->fit_window(std::span<const Record>(stream).subspan(10, 10));
    CHECK(detector_bytes(*direct) == reference);
}

TEST_CASE("degenerate window W=S=n equals one direct fit for every detector") {
    const auto stream = counting_stream(64, 3);
    DetectorConfig cfg;
    cfg.lof_k = 5;
    cfg.cad_k = 3;
    cfg.storm_k = 4;
    cfg.iforest_trees = 20;
    cfg.kitnet_m_max = 3;
    for (DetectorKind kind : kAllDetectorKinds) {
        CAPTURE(to_string(kind));
        TrainStats stats;
        auto windowed = train_incremental(kind, cfg,
                                          WindowConfig{stream.size(), stream.size()},
                                          stream, 9, &stats);
        auto direct = make_detector(kind, cfg, 9);
        direct->fit_window(stream);
        CHECK(windowed->version() == 1);
        CHECK(stats.windows_fit == 1);
        CHECK(detector_bytes(*windowed) == detector_bytes(*direct));
    }
}

TEST_CASE("incremental training is deterministic") {
    const auto stream = counting_stream(300, 4);
    DetectorConfig cfg;
    cfg.iforest_trees = 15;
    for (DetectorKind kind : {DetectorKind::iforest_asd, DetectorKind::ocsvm,
                              DetectorKind::kitnet}) {
        CAPTURE(to_string(kind));
        auto a = train_incremental(kind, cfg, WindowConfig{64, 32}, stream, 17, nullptr);
        auto b = train_incremental(kind, cfg, WindowConfig{64, 32}, stream, 17, nullptr);
        CHECK(detector_bytes(*a) == detector_bytes(*b));
    }
}

TEST_CASE("train stats track buffer plus model footprint") {
    const auto stream = counting_stream(200);
    TrainStats stats;
    train_incremental(DetectorKind::exact_storm, DetectorConfig{},
                      WindowConfig{50, 25}, stream, 1, &stats);
    CHECK(stats.windows_fit == 7);
    CHECK(stats.window_ms.size() == stats.windows_fit);
    for (double ms : stats.window_ms) CHECK(ms >= 0.0);
    // buffer holds <= 50 and the ISB holds <= 50 live nodes
    CHECK(stats.peak_buffered <= 100);
    CHECK(stats.peak_buffered >= 50);
}
