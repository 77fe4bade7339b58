#include "odstream/record.hpp"

namespace odstream {

std::string to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::ocsvm: return "ocsvm";
        case DetectorKind::iforest_asd: return "iforest-asd";
        case DetectorKind::lof: return "lof";
        case DetectorKind::abod: return "abod";
        case DetectorKind::exact_storm: return "exact-storm";
        case DetectorKind::kitnet: return "kitnet";
        case DetectorKind::knn_cad: return "knn-cad";
    }
    throw std::logic_error("unknown detector kind");
}

DetectorKind detector_kind_from_string(const std::string& name) {
    for (DetectorKind kind : kAllDetectorKinds) {
        if (name == to_string(kind)) return kind;
    }
    if (name == "knn-asd") return DetectorKind::knn_cad;
    std::string valid;
    for (DetectorKind kind : kAllDetectorKinds) {
        if (!valid.empty()) valid += ", ";
        valid += to_string(kind);
    }
    throw std::invalid_argument("unknown detector '" + name +
                                "' (valid: " + valid + ")");
}

}  // namespace odstream
