#include "stmforge/common/binary_io.hpp"

#include <array>
#include <bit>
#include <cstring>

namespace stmforge {

namespace {

template <std::size_t N>
void put(std::ostream& os, std::uint64_t v) {
    std::array<char, N> buf{};
    for (std::size_t i = 0; i < N; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(buf.data(), N);
    if (!os) throw IoError("write failed");
}

template <std::size_t N>
std::uint64_t get(std::istream& is) {
    std::array<unsigned char, N> buf{};
    is.read(reinterpret_cast<char*>(buf.data()), N);
    if (is.gcount() != static_cast<std::streamsize>(N)) throw IoError("unexpected end of file");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < N; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

}  // namespace

void write_u8(std::ostream& os, std::uint8_t v) { put<1>(os, v); }
void write_u16(std::ostream& os, std::uint16_t v) { put<2>(os, v); }
void write_u32(std::ostream& os, std::uint32_t v) { put<4>(os, v); }
void write_f32(std::ostream& os, float v) { put<4>(os, std::bit_cast<std::uint32_t>(v)); }

void write_magic(std::ostream& os, std::string_view magic) {
    os.write(magic.data(), static_cast<std::streamsize>(magic.size()));
    if (!os) throw IoError("write failed");
}

std::uint8_t read_u8(std::istream& is) { return static_cast<std::uint8_t>(get<1>(is)); }
std::uint16_t read_u16(std::istream& is) { return static_cast<std::uint16_t>(get<2>(is)); }
std::uint32_t read_u32(std::istream& is) { return static_cast<std::uint32_t>(get<4>(is)); }
float read_f32(std::istream& is) { return std::bit_cast<float>(static_cast<std::uint32_t>(get<4>(is))); }

std::string read_bytes(std::istream& is, std::size_t n) {
    std::string s(n, '\0');
    is.read(s.data(), static_cast<std::streamsize>(n));
    if (is.gcount() != static_cast<std::streamsize>(n)) throw IoError("unexpected end of file");
    return s;
}

void expect_magic(std::istream& is, std::string_view magic) {
    const std::string got = read_bytes(is, magic.size());
    if (got != magic) throw IoError("bad magic: expected " + std::string(magic));
}

}  // namespace stmforge
