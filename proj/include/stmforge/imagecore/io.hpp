#pragma once

#include <filesystem>
#include <istream>
#include <ostream>

#include "stmforge/common/binary_io.hpp"
#include "stmforge/imagecore/image.hpp"

namespace stmforge::imagecore {

// STMI block: "STMI", version u8 = 1, height u32, width u32, norm_state u8,
// then height * width binary32 values, all little-endian, row-major.
inline constexpr std::uint8_t kStmiVersion = 1;

void write_stmi(std::ostream& os, const Image& img);
/// Reads one STMI block. Values are widened from binary32.
Image read_stmi(std::istream& is);

void save_stmi(const std::filesystem::path& path, const Image& img);
Image load_stmi(const std::filesystem::path& path);

/// Binary PGM (P5). Images are mapped to [0, 1] (see to_unit_range) and
/// quantized to maxval 65535, written big-endian as the format requires.
void save_pgm16(const std::filesystem::path& path, const Image& img);
/// Reads P5 with any maxval up to 65535; the result is unit-normalized by maxval.
Image load_pgm(const std::filesystem::path& path);

/// Loads .stmi or .pgm by extension.
Image load_image(const std::filesystem::path& path);

}  // namespace stmforge::imagecore
