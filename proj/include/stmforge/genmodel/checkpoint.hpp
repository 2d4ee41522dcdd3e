#pragma once

#include <filesystem>
#include <iosfwd>

#include "stmforge/genmodel/tiny_denoiser.hpp"

namespace stmforge::genmodel {

inline constexpr std::uint8_t kCheckpointVersion = 1;

/// "STMW", u8 version, u32 parameter count, then per parameter: u16 name
/// length, name bytes, u8 rank, u32 dims, binary32 values in row-major order
/// of the logical shape. All integers little-endian.
void write_checkpoint(std::ostream& os, const TinyDenoiser& model);
/// Rebuilds the architecture from the parameter shapes. Throws IoError on
/// malformed or inconsistent data.
TinyDenoiser read_checkpoint(std::istream& is);

void save_checkpoint(const std::filesystem::path& path, const TinyDenoiser& model);
TinyDenoiser load_checkpoint(const std::filesystem::path& path);

}  // namespace stmforge::genmodel
