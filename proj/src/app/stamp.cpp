#include "stmforge/app/stamp.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "stmforge/common/binary_io.hpp"

#ifndef STMFORGE_VERSION
#define STMFORGE_VERSION "dev"
#endif

namespace stmforge::app {

std::string version() { return STMFORGE_VERSION; }

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string stamp_text(const std::string& command, const RunConfig& cfg) {
    std::ostringstream os;
    os << "# stmforge reproducibility stamp; replay with: stmforge replay <this file>\n"
       << "[stamp]\n"
       << "version = " << version() << '\n'
       << "command = " << command << '\n'
       << "seed = " << cfg.text("run.seed") << '\n'
       << "config_sha256 = " << cfg.hash() << "\n\n"
       << cfg.canonical_text();
    return os.str();
}

void write_stamp(const std::filesystem::path& path, const std::string& command, const RunConfig& cfg) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write stamp " + path.string());
    os << stamp_text(command, cfg);
    if (!os) throw IoError("write failed: " + path.string());
}

Stamp read_stamp(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read stamp " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    const std::string text = ss.str();

    Stamp s;
    std::istringstream lines(text);
    std::string line;
    bool in_stamp = false;
    while (std::getline(lines, line)) {
        if (!line.empty() && line[0] == '[') in_stamp = line.rfind("[stamp]", 0) == 0;
        if (!in_stamp) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto key = line.substr(0, eq), value = line.substr(eq + 1);
        key.erase(key.find_last_not_of(' ') + 1);
        value.erase(0, value.find_first_not_of(' '));
        if (key == "command") s.command = value;
        if (key == "version") s.version = value;
        if (key == "config_sha256") s.config_hash = value;
    }
    if (s.command.empty()) throw IoError("stamp has no command: " + path.string());
    s.config.merge_text(text);
    if (s.config.hash() != s.config_hash) throw IoError("stamp config hash mismatch: " + path.string());
    return s;
}

}  // namespace stmforge::app
