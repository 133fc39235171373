// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fpm/scenario_config.hpp"

namespace fpm {

struct ConfigParseResult {
    ScenarioConfig config;
    // Optional keys that were absent and fell back to their defaults,
    // e.g. "numerics.dt". Surfaced in the run log.
    std::vector<std::string> defaulted_keys;
};

// Parses the sectioned key = value text format (see README for the
// grammar). Collects every problem -- unknown keys, bad numbers, failed
// validation -- into a single ConfigError instead of stopping at the first.
ConfigParseResult parse_config(const std::string& text);

// Resolves `source` as a builtin scenario name or as a path to a config
// file and parses it.
ConfigParseResult load_config(const std::string& source);

// Canonical emission; parse_config(emit_config(c)).config reproduces c
// exactly (doubles are printed with round-trip precision).
std::string emit_config(const ScenarioConfig& c);

}  // namespace fpm
