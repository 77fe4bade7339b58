#include "odstream/config.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

namespace odstream {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string DetectorConfig::canonical_text() const {
    std::ostringstream out;
    out << "storm.radius=" << fmt_double(storm_radius) << '\n'
        << "storm.k=" << storm_k << '\n'
        << "storm.window=" << storm_window << '\n'
        << "lof.k=" << lof_k << '\n'
        << "cad.k=" << cad_k << '\n'
        << "iforest.trees=" << iforest_trees << '\n'
        << "iforest.psi=" << iforest_psi << '\n'
        << "iforest.threshold_u=" << fmt_double(iforest_threshold_u) << '\n'
        << "ocsvm.nu=" << fmt_double(ocsvm_nu) << '\n'
        << "ocsvm.lr=" << fmt_double(ocsvm_lr) << '\n'
        << "ocsvm.epochs=" << ocsvm_epochs << '\n'
        << "kitnet.m_max=" << kitnet_m_max << '\n'
        << "kitnet.beta=" << fmt_double(kitnet_beta) << '\n'
        << "kitnet.lr=" << fmt_double(kitnet_lr) << '\n';
    return out.str();
}

DetectorConfig parse_canonical_config(const std::string& text) {
    DetectorConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: malformed line '" + line + "'");
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        try {
            if (key == "storm.radius") cfg.storm_radius = std::stod(value);
            else if (key == "storm.k") cfg.storm_k = std::stoi(value);
            else if (key == "storm.window") cfg.storm_window = std::stoi(value);
            else if (key == "lof.k") cfg.lof_k = std::stoi(value);
            else if (key == "cad.k") cfg.cad_k = std::stoi(value);
            else if (key == "iforest.trees") cfg.iforest_trees = std::stoi(value);
            else if (key == "iforest.psi") cfg.iforest_psi = std::stoi(value);
            else if (key == "iforest.threshold_u") cfg.iforest_threshold_u = std::stod(value);
            else if (key == "ocsvm.nu") cfg.ocsvm_nu = std::stod(value);
            else if (key == "ocsvm.lr") cfg.ocsvm_lr = std::stod(value);
            else if (key == "ocsvm.epochs") cfg.ocsvm_epochs = std::stoi(value);
            else if (key == "kitnet.m_max") cfg.kitnet_m_max = std::stoi(value);
            else if (key == "kitnet.beta") cfg.kitnet_beta = std::stod(value);
            else if (key == "kitnet.lr") cfg.kitnet_lr = std::stod(value);
            else throw std::invalid_argument("config: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad value for '" + key + "'");
        }
    }
    return cfg;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string digest_hex(std::uint64_t digest) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(digest));
    return buf;
}

}  // namespace odstream
