#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "delspec/config.hpp"

namespace delspec {

struct RunOptions {
    std::string out_dir = ".";
    std::uint64_t seed = 20260808ull;  // used by the check command's random probes
    std::ostream* log = nullptr;       // defaults to std::cout
};

/// Dispatch one CLI command (eig | converge | compare | oracle | check) and
/// write its artifacts. Returns the process exit code: 0 success, 2
/// config/parse error, 3 numerical failure, 4 tolerance failure in check.
int run_command(const std::string& command, const RunSpec& spec, const RunOptions& opts);

/// Deterministic 17-significant-digit float formatting used by all CSV output.
std::string format_float(double v);

}  // namespace delspec
