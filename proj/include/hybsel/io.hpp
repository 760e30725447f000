#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hybsel {

//! Thrown when a serialized stream is rejected: bad magic, unsupported
//! version, truncation, or counts that contradict the declared length.
class format_error : public std::runtime_error {
  public:
    explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

// All on-disk integers are little-endian, written byte by byte so the format
// does not depend on host endianness.
namespace io {

inline void write_bytes(std::ostream& os, const void* p, size_t len) {
    if (len == 0) return;
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(len));
    if (!os) throw format_error("write failed");
}

inline void read_bytes(std::istream& is, void* p, size_t len) {
    if (len == 0) return;
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(len));
    if (static_cast<size_t>(is.gcount()) != len) throw format_error("truncated stream");
}

inline void write_u8(std::ostream& os, uint8_t v) { write_bytes(os, &v, 1); }

inline uint8_t read_u8(std::istream& is) {
    uint8_t v;
    read_bytes(is, &v, 1);
    return v;
}

inline void write_u16(std::ostream& os, uint16_t v) {
    uint8_t b[2] = {uint8_t(v), uint8_t(v >> 8)};
    write_bytes(os, b, 2);
}

inline uint16_t read_u16(std::istream& is) {
    uint8_t b[2];
    read_bytes(is, b, 2);
    return uint16_t(b[0] | (uint16_t(b[1]) << 8));
}

inline void write_u32(std::ostream& os, uint32_t v) {
    uint8_t b[4];
    for (int k = 0; k < 4; ++k) b[k] = uint8_t(v >> (8 * k));
    write_bytes(os, b, 4);
}

inline uint32_t read_u32(std::istream& is) {
    uint8_t b[4];
    read_bytes(is, b, 4);
    uint32_t v = 0;
    for (int k = 3; k >= 0; --k) v = (v << 8) | b[k];
    return v;
}

inline void write_u64(std::ostream& os, uint64_t v) {
    uint8_t b[8];
    for (int k = 0; k < 8; ++k) b[k] = uint8_t(v >> (8 * k));
    write_bytes(os, b, 8);
}

inline uint64_t read_u64(std::istream& is) {
    uint8_t b[8];
    read_bytes(is, b, 8);
    uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | b[k];
    return v;
}

inline uint64_t load_u64_le(const uint8_t* p) {
    uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | p[k];
    return v;
}

inline void store_u64_le(uint8_t* p, uint64_t v) {
    for (int k = 0; k < 8; ++k) p[k] = uint8_t(v >> (8 * k));
}

inline void write_magic(std::ostream& os, const char (&magic)[9]) { write_bytes(os, magic, 8); }

inline void expect_magic(std::istream& is, const char (&magic)[9]) {
    char got[8];
    read_bytes(is, got, 8);
    if (std::memcmp(got, magic, 8) != 0) throw format_error(std::string("bad magic, expected ") + magic);
}

inline void write_u64_vec(std::ostream& os, const std::vector<uint64_t>& v) {
    write_u64(os, v.size());
    for (uint64_t x : v) write_u64(os, x);
}

//! Reads a length-prefixed u64 array; the count must not exceed max_count.
inline std::vector<uint64_t> read_u64_vec(std::istream& is, uint64_t max_count) {
    uint64_t count = read_u64(is);
    if (count > max_count) throw format_error("array count out of bounds");
    std::vector<uint64_t> v(count);
    for (auto& x : v) x = read_u64(is);
    return v;
}

}  // namespace io
}  // namespace hybsel
