#include "odstream/detector.hpp"

#include <fstream>
#include <iterator>
#include <stdexcept>

#include "odstream/detectors/abod.hpp"
#include "odstream/detectors/iforest.hpp"
#include "odstream/detectors/kitnet.hpp"
#include "odstream/detectors/knn_cad.hpp"
#include "odstream/detectors/lof.hpp"
#include "odstream/detectors/ocsvm.hpp"
#include "odstream/detectors/storm.hpp"
#include "odstream/serialize.hpp"

namespace odstream {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr char kMagic[4] = {'O', 'D', 'S', '1'};

}  // namespace

void Detector::fit_window(std::span<const Record> window) {
    if (window.empty()) throw std::invalid_argument("fit_window: empty window");
    if (window.front().features.empty()) {
        throw std::invalid_argument("fit_window: records have no features");
    }
    if (dim_ == 0) dim_ = window.front().features.size();
    for (const auto& r : window) check_dimension(dim_, r.features.size());
    do_fit_window(window);
    ++version_;
}

AnomalyScore Detector::score_one(const Record& record) const {
    if (version_ == 0) {
        throw std::logic_error("untrained detector: fit a window before scoring");
    }
    check_dimension(dim_, record.features.size());
    return do_score_one(record);
}

void Detector::learn_one(const Record& record) {
    if (record.features.empty()) {
        throw std::invalid_argument("learn_one: record has no features");
    }
    if (dim_ == 0) dim_ = record.features.size();
    check_dimension(dim_, record.features.size());
    do_learn_one(record);
}

std::uint64_t Detector::window_seed(std::uint32_t version, std::uint64_t salt) const {
    std::uint64_t h = splitmix64(seed_ ^ 0x5bf03635f0935ad1ull);
    h = splitmix64(h ^ version);
    h = splitmix64(h ^ salt);
    return h;
}

std::unique_ptr<Detector> make_detector(DetectorKind kind,
                                        const DetectorConfig& cfg,
                                        std::uint64_t seed) {
    switch (kind) {
        case DetectorKind::ocsvm:
            return std::make_unique<OcsvmDetector>(cfg, seed);
        case DetectorKind::iforest_asd:
            return std::make_unique<IforestAsdDetector>(cfg, seed);
        case DetectorKind::lof:
            return std::make_unique<LofDetector>(cfg, seed);
        case DetectorKind::abod:
            return std::make_unique<AbodDetector>(cfg, seed);
        case DetectorKind::exact_storm:
            return std::make_unique<StormDetector>(cfg, seed);
        case DetectorKind::kitnet:
            return std::make_unique<KitnetDetector>(cfg, seed);
        case DetectorKind::knn_cad:
            return std::make_unique<KnnCadDetector>(cfg, seed);
    }
    throw std::invalid_argument("unknown detector kind");
}

void save_state(const Detector& det, const DetectorConfig& cfg,
                const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
    out.write(kMagic, sizeof(kMagic));
    io::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(det.kind()));
    io::write_pod<std::uint32_t>(out, det.version_);
    io::write_pod<std::uint64_t>(out, det.seed_);
    const std::string cfg_text = cfg.canonical_text();
    io::write_pod<std::uint64_t>(out, fnv1a64(cfg_text));
    io::write_pod<std::uint64_t>(out, cfg_text.size());
    out.write(cfg_text.data(), static_cast<std::streamsize>(cfg_text.size()));
    det.save_payload(out);
    if (!out) throw std::runtime_error("checkpoint: write to '" + path + "' failed");
}

std::unique_ptr<Detector> load_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
    char magic[4] = {};
    in.read(magic, sizeof(magic));
    if (!in || std::string(magic, 4) != std::string(kMagic, 4)) {
        throw std::runtime_error("checkpoint: bad magic in '" + path + "'");
    }
    const auto kind_tag = io::read_pod<std::uint8_t>(in);
    if (kind_tag >= std::size(kAllDetectorKinds)) {
        throw std::runtime_error("checkpoint: unknown detector tag");
    }
    const auto kind = static_cast<DetectorKind>(kind_tag);
    const auto version = io::read_pod<std::uint32_t>(in);
    const auto seed = io::read_pod<std::uint64_t>(in);
    const auto digest = io::read_pod<std::uint64_t>(in);
    const auto cfg_len = io::read_pod<std::uint64_t>(in);
    std::string cfg_text(cfg_len, '\0');
    in.read(cfg_text.data(), static_cast<std::streamsize>(cfg_len));
    if (!in) throw std::runtime_error("checkpoint: truncated config text");
    if (fnv1a64(cfg_text) != digest) {
        throw std::runtime_error("checkpoint: config digest mismatch");
    }
    const DetectorConfig cfg = parse_canonical_config(cfg_text);
    auto det = make_detector(kind, cfg, seed);
    det->load_payload(in);
    det->version_ = version;
    return det;
}

}  // namespace odstream
