#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "delspec/discretize.hpp"
#include "delspec/oracles.hpp"

namespace delspec {

/// How the reference value of a convergence run is obtained.
struct ReferenceSpec {
    enum class Kind { Value, CharRoots, Bruteforce };
    Kind kind = Kind::Value;
    std::complex<double> value{};  // Kind::Value: the multiplier itself
    RootSearchRegion region{};     // Kind::CharRoots
    int steps = 4096;              // Kind::Bruteforce
    int bruteforce_M = -1;         // Kind::Bruteforce; -1: use disc.M
};

struct RunPayload {
    std::vector<int> n_list;
    std::optional<ReferenceSpec> reference;
    std::string out;  // output file name; empty: per-command default
};

/// Parsed CLI configuration binding a problem, a method, and discretization
/// indices.
struct RunSpec {
    ProblemSpec problem;
    DiscConfig disc;
    RunPayload run;
    std::vector<std::string> warnings;  // collected by validate
};

/// Parse a JSON document against the strict schema (unknown keys rejected,
/// missing required keys reported with their key path). The problem is
/// validated on the way in.
RunSpec parse_config(const std::string& json_text);

/// Canonical JSON rendering; serialize(parse_config(doc)) re-parses to a
/// structurally equal RunSpec.
std::string serialize(const RunSpec& spec);

}  // namespace delspec
