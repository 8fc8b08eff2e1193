#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "strbf/experiment.hpp"

namespace strbf {

struct CliConfig {
    ExperimentConfig experiment;
    std::filesystem::path out_dir = "out";
    bool plot = false;
};

struct ConfigKey {
    std::string name;
    std::string help;
};

/// Every accepted key, in the order config_to_text prints them.
const std::vector<ConfigKey>& config_keys();

/// Sets one key. Unknown keys and unparsable values throw ContractViolation.
void apply_setting(CliConfig& cfg, std::string_view key, std::string_view value);

/// Flat `key = value` lines; '#' starts a comment, blank lines are skipped.
void apply_config_text(CliConfig& cfg, std::string_view text);

/// Fully resolved configuration in the same format, one key per line.
std::string config_to_text(const CliConfig& cfg);

std::string get_setting(const CliConfig& cfg, std::string_view key);

}  // namespace strbf
