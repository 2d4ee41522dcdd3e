#pragma once

#include <filesystem>
#include <string>

#include "stmforge/app/config.hpp"

namespace stmforge::app {

std::string sha256_hex(const std::string& data);

std::string version();

struct Stamp {
    std::string command;
    std::string version;
    std::string config_hash;
    RunConfig config;
};

/// `[stamp]` header (version, command, seed, config hash) followed by the
/// effective config, so the file can be passed back as --config or replayed.
std::string stamp_text(const std::string& command, const RunConfig& cfg);
void write_stamp(const std::filesystem::path& path, const std::string& command, const RunConfig& cfg);
/// Throws IoError if the recorded hash does not match the recorded config.
Stamp read_stamp(const std::filesystem::path& path);

}  // namespace stmforge::app
