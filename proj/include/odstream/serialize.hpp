#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace odstream::io {

// Little-endian binary primitives for state checkpoints. Host is assumed
// little-endian (x86-64 / aarch64-le); a static_assert guards the layout.
static_assert(sizeof(double) == 8);

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    static_assert(std::is_trivially_copyable_v<T>);
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw std::runtime_error("checkpoint: truncated stream");
    return value;
}

inline void write_vec(std::ostream& out, const std::vector<double>& v) {
    write_pod<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

inline std::vector<double> read_vec(std::istream& in) {
    const auto n = read_pod<std::uint64_t>(in);
    std::vector<double> v(n);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated vector");
    return v;
}

inline void write_u64_vec(std::ostream& out, const std::vector<std::uint64_t>& v) {
    write_pod<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(std::uint64_t)));
}

inline std::vector<std::uint64_t> read_u64_vec(std::istream& in) {
    const auto n = read_pod<std::uint64_t>(in);
    std::vector<std::uint64_t> v(n);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(std::uint64_t)));
    if (!in) throw std::runtime_error("checkpoint: truncated vector");
    return v;
}

}  // namespace odstream::io
