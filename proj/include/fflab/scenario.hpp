#pragma once

#include <string>

#include "fflab/simnet.hpp"

namespace fflab {

// Strict line-oriented `key = value` format; blank lines and '#' comments
// allowed, unknown keys rejected. Throws Errc::parse_error with the line
// number, or Errc::constraint_error for out-of-range parameter combinations.
SimConfig parse_scenario(const std::string& text);

// Canonical text round-tripping through parse_scenario; derived fields are
// echoed as comments.
std::string serialize_scenario(const SimConfig& cfg);

SimConfig load_scenario_file(const std::string& path);

}  // namespace fflab
