#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "stmforge/app/config.hpp"

namespace stmforge::app {

/// Subcommands that run from a config (everything except `replay` and `config`).
const std::vector<std::string>& command_names();

/// Runs one subcommand with an effective config and writes its stamp.
/// Throws ConfigError, std::invalid_argument or IoError.
void execute(const std::string& command, const RunConfig& cfg, std::ostream& out);

/// Full command line entry point. Exit codes: 0 success, 2 bad flags or
/// config, 1 I/O or other runtime failure. Errors go to `err` as one JSON line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// R^2 of the least-squares line through (x, y).
double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace stmforge::app
