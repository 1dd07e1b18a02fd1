#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pfrac/driver.hpp"

namespace pfrac {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines; `#` starts a comment.
KeyValues parse_key_values(std::string_view text);

/// Preset for the selected benchmark, then file entries, then overrides (which win).
RunConfig parse_config(std::string_view file_text, const KeyValues& overrides = {});

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Every key in parseable form, notes as comments.
std::string echo_config(const RunConfig& cfg);

BenchmarkId parse_benchmark(std::string_view s);

}  // namespace pfrac
