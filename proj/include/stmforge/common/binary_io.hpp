#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stmforge {

/// Raised for unreadable, truncated or malformed files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Little-endian primitives shared by the STMI/STME/STMW formats.
void write_u8(std::ostream& os, std::uint8_t v);
void write_u16(std::ostream& os, std::uint16_t v);
void write_u32(std::ostream& os, std::uint32_t v);
void write_f32(std::ostream& os, float v);
void write_magic(std::ostream& os, std::string_view magic);

std::uint8_t read_u8(std::istream& is);
std::uint16_t read_u16(std::istream& is);
std::uint32_t read_u32(std::istream& is);
float read_f32(std::istream& is);
/// Reads magic.size() bytes and throws IoError when they differ.
void expect_magic(std::istream& is, std::string_view magic);
std::string read_bytes(std::istream& is, std::size_t n);

}  // namespace stmforge
