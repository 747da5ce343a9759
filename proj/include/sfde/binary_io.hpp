#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "sfde/error.hpp"

// Little-endian scalar I/O shared by the ensemble and trajectory dumps.
namespace sfde::binary {

inline void write_u64(std::ostream& os, std::uint64_t v) {
    std::array<char, 8> buf{};
    for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xffu);
    os.write(buf.data(), buf.size());
}

inline void write_f64(std::ostream& os, double v) {
    write_u64(os, std::bit_cast<std::uint64_t>(v));
}

inline std::uint64_t read_u64(std::istream& is) {
    std::array<unsigned char, 8> buf{};
    if (!is.read(reinterpret_cast<char*>(buf.data()), buf.size()))
        throw Error("io", "unexpected end of binary stream");
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
    return v;
}

inline double read_f64(std::istream& is) { return std::bit_cast<double>(read_u64(is)); }

inline void write_magic(std::ostream& os, const char (&magic)[9]) { os.write(magic, 8); }

inline void expect_magic(std::istream& is, const char (&magic)[9]) {
    char buf[8]{};
    if (!is.read(buf, 8) || std::memcmp(buf, magic, 8) != 0)
        throw Error("io", std::string("bad magic, expected ") + magic);
}

} // namespace sfde::binary
