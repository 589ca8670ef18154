#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "circgossip/config.hpp"

namespace circgossip {

inline constexpr int kOutputSchemaVersion = 1;

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

struct ManifestEntry {
  std::string path;  ///< relative to the output directory
  std::string sha256;
  std::uint64_t bytes = 0;
};

/// Hashes every file (paths relative to `output_dir`) and writes
/// manifest.json next to them: schema version, tool version, scenario, seed,
/// the full config, the file list with hashes and the wall time.
std::vector<ManifestEntry> write_manifest(const std::filesystem::path& output_dir,
                                          const ExperimentConfig& config,
                                          const std::vector<std::string>& files,
                                          double wall_seconds);

}  // namespace circgossip
