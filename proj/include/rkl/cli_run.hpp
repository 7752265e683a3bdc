// Command orchestration behind the CLI binary: per-command default configs,
// schema validation with unknown-key rejection, dotted overrides, and run
// summaries with a config hash.
#pragma once

#include <string>

#include "json.hpp"

namespace rkl {

// Full default configuration of one command; unknown commands are rejected.
nlohmann::json default_config(const std::string& command);

// Rejects keys absent from the defaults (recursively) and type mismatches.
void validate_config(const nlohmann::json& user, const nlohmann::json& defaults,
                     const std::string& prefix = "");

// Deep merge of user values over the defaults (arrays replace wholesale).
nlohmann::json merge_config(nlohmann::json defaults, const nlohmann::json& user);

// Applies one `--set key=value` override with a dotted path; the key must
// already exist. Values parse as JSON scalars with a string fallback.
void apply_override(nlohmann::json& config, const std::string& assignment);

// FNV-1a over the canonical dump, as a fixed-width hex string.
std::string config_hash(const nlohmann::json& config);

// Runs one command to completion, writes its artifacts plus summary.json
// under config["out"], and returns the summary.
nlohmann::json run_command(const std::string& command, const nlohmann::json& config);

}  // namespace rkl
