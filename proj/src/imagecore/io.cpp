#include "stmforge/imagecore/io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "stmforge/imagecore/transforms.hpp"

namespace stmforge::imagecore {

void write_stmi(std::ostream& os, const Image& img) {
    write_magic(os, "STMI");
    write_u8(os, kStmiVersion);
    write_u32(os, static_cast<std::uint32_t>(img.height()));
    write_u32(os, static_cast<std::uint32_t>(img.width()));
    write_u8(os, static_cast<std::uint8_t>(img.norm_state()));
    for (double v : img.pixels()) write_f32(os, static_cast<float>(v));
}

Image read_stmi(std::istream& is) {
    expect_magic(is, "STMI");
    const auto version = read_u8(is);
    if (version != kStmiVersion) throw IoError("unsupported STMI version " + std::to_string(version));
    const auto h = read_u32(is);
    const auto w = read_u32(is);
    const auto state = read_u8(is);
    if (state > 2) throw IoError("invalid STMI norm state");
    if (h > (1U << 16) || w > (1U << 16)) throw IoError("STMI dimensions out of range");
    std::vector<double> px(static_cast<std::size_t>(h) * w);
    for (double& v : px) v = read_f32(is);
    try {
        return Image(static_cast<int>(h), static_cast<int>(w), std::move(px), static_cast<NormState>(state));
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("invalid STMI payload: ") + e.what());
    }
}

void save_stmi(const std::filesystem::path& path, const Image& img) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    write_stmi(os, img);
}

Image load_stmi(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    return read_stmi(is);
}

void save_pgm16(const std::filesystem::path& path, const Image& img) {
    const Image unit = to_unit_range(img);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "P5\n" << unit.width() << ' ' << unit.height() << "\n65535\n";
    for (double v : unit.pixels()) {
        const auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
        const char bytes[2] = {static_cast<char>(q >> 8), static_cast<char>(q & 0xFF)};
        os.write(bytes, 2);
    }
    if (!os) throw IoError("write failed for " + path.string());
}

namespace {

long read_header_int(std::istream& is) {
    // Skips whitespace and '#' comments between header fields.
    while (true) {
        const int ch = is.peek();
        if (ch == '#') {
            is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
        } else if (std::isspace(ch)) {
            is.get();
        } else {
            break;
        }
    }
    long v = -1;
    if (!(is >> v)) throw IoError("malformed PGM header");
    return v;
}

}  // namespace

Image load_pgm(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    if (read_bytes(is, 2) != "P5") throw IoError("only binary PGM (P5) is supported");
    const long w = read_header_int(is);
    const long h = read_header_int(is);
    const long maxval = read_header_int(is);
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) throw IoError("invalid PGM header values");
    is.get();  // single whitespace before the raster
    const bool wide = maxval > 255;
    std::vector<double> px(static_cast<std::size_t>(w) * h);
    for (double& v : px) {
        unsigned value = read_u8(is);
        if (wide) value = (value << 8) | read_u8(is);
        v = std::min(1.0, static_cast<double>(value) / static_cast<double>(maxval));
    }
    return Image(static_cast<int>(h), static_cast<int>(w), std::move(px), NormState::unit);
}

Image load_image(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".pgm") return load_pgm(path);
    return load_stmi(path);
}

}  // namespace stmforge::imagecore
