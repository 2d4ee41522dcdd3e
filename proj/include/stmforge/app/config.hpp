#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stmforge::app {

/// Unknown key or unparsable value; maps to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ValueKind { text, integer, unsigned_integer, real, int_list, real_list };

struct ConfigKey {
    std::string_view name;  // "section.key"
    ValueKind kind;
    std::string_view default_value;
    std::string_view help;
    bool stamped = true;  // false for execution-only settings such as worker count
};

/// Every key a config file may contain.
const std::vector<ConfigKey>& config_schema();

/// Flat "section.key" -> value map over the fixed schema. Files use
/// `[section]` headers and `key = value` lines; `#` and `;` start comments.
class RunConfig {
public:
    /// All keys at their defaults.
    RunConfig();

    /// Applies a file on top of the current values. A [stamp] section is ignored.
    void merge_file(const std::filesystem::path& path);
    void merge_text(const std::string& text);
    /// Throws ConfigError for unknown keys or values of the wrong kind.
    void set(const std::string& key, std::string value);

    const std::string& text(const std::string& key) const;
    long long integer(const std::string& key) const;
    std::uint64_t unsigned_integer(const std::string& key) const;
    double real(const std::string& key) const;
    std::vector<long long> int_list(const std::string& key) const;
    std::vector<double> real_list(const std::string& key) const;

    /// Sections in name order, keys in name order, stamped keys only.
    std::string canonical_text() const;
    /// Hex SHA-256 of canonical_text().
    std::string hash() const;

    bool operator==(const RunConfig&) const = default;

private:
    std::map<std::string, std::string> values_;
};

std::vector<long long> parse_int_list(std::string_view s);
std::vector<double> parse_real_list(std::string_view s);

}  // namespace stmforge::app
