#ifndef LPMBRW_COMMANDS_HPP
#define LPMBRW_COMMANDS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "stats.hpp"

namespace lpmbrw {

const char* version() noexcept;

struct ConstantsOutput {
  std::string table;
  nlohmann::json json;
};

/// Cumulants, tail report, k and the regime centering. Throws
/// ErrorKind::Model ("theta0 infinite ...") when no regime exists.
ConstantsOutput cmd_constants(const LoadedConfig& cfg);

struct CommandOutput {
  std::string summary;
  std::vector<std::filesystem::path> files;  // as listed in the manifest
};

/// Writes genstats.csv, centered.csv, limit.csv and manifest.json into `out`.
CommandOutput cmd_simulate(const LoadedConfig& cfg, const std::filesystem::path& out);

struct VerifyOutput : CommandOutput {
  bool passed = false;
  std::string report_json;
};

/// Runs the experiment and writes report.json and manifest.json into `out`.
VerifyOutput cmd_verify(const LoadedConfig& cfg, const std::filesystem::path& out);

/// Report serialisation; contains nothing that depends on time or threads.
nlohmann::json report_to_json(const VerificationReport& rep, const LoadedConfig& cfg);

}  // namespace lpmbrw

#endif  // LPMBRW_COMMANDS_HPP
