#ifndef RELAYNET_TOOLS_MANIFEST_HPP
#define RELAYNET_TOOLS_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "relaynet/json_io.hpp"

namespace relaynet::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  std::string subcommand;
  std::vector<std::string> arguments;    // argv as given
  Json options = Json::object();         // resolved values, defaults included
  std::vector<std::filesystem::path> inputs;
  std::vector<std::uint64_t> seeds;
  double wall_time_s = 0.0;

  Json to_json() const;
};

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace relaynet::cli

#endif  // RELAYNET_TOOLS_MANIFEST_HPP
