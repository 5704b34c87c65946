#ifndef LPMBRW_CONFIG_HPP
#define LPMBRW_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "stats.hpp"

namespace lpmbrw {

/// A parsed experiment file. `doc` keeps the parsed JSON (with overrides
/// folded in) so the run can be identified by a hash of its content.
struct LoadedConfig {
  ExperimentConfig experiment;
  nlohmann::json doc;
  bool theta_is_boundary = false;
};

/// Throws ErrorKind::Parse with the JSON path of the offending field, or
/// ErrorKind::Model when theta = "boundary" cannot be resolved.
LoadedConfig parse_config(const nlohmann::json& doc);
LoadedConfig parse_config_text(const std::string& text);
LoadedConfig load_config_file(const std::filesystem::path& path);

void override_seed(LoadedConfig& c, std::uint64_t seed);
void override_replicas(LoadedConfig& c, std::size_t replicas);
/// Thread count is not part of the document: it never changes results.
void override_threads(LoadedConfig& c, unsigned threads);

/// FNV-1a over the key-sorted compact dump; independent of key order in
/// the source file.
std::string config_hash(const nlohmann::json& doc);

}  // namespace lpmbrw

#endif  // LPMBRW_CONFIG_HPP
