#include "circgossip/manifest.hpp"

#include <array>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "circgossip/csv.hpp"

namespace circgossip {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex += fmt::format("{:02x}", digest[i]);
  }
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
  return sha256_hex(read_text_file(path));
}

std::vector<ManifestEntry> write_manifest(const std::filesystem::path& output_dir,
                                          const ExperimentConfig& config,
                                          const std::vector<std::string>& files,
                                          double wall_seconds) {
  using nlohmann::json;
  std::vector<ManifestEntry> entries;
  json list = json::array();
  for (const std::string& rel : files) {
    const std::string contents = read_text_file(output_dir / rel);
    ManifestEntry e{rel, sha256_hex(contents), contents.size()};
    list.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    entries.push_back(std::move(e));
  }
  json doc;
  doc["schema_version"] = kOutputSchemaVersion;
  doc["tool"] = "circgossip";
  doc["version"] = CIRCGOSSIP_VERSION;
  doc["scenario"] = std::string(scenario_name(config.scenario));
  doc["seed"] = config.seed;
  doc["config"] = json::parse(config_to_json(config));
  doc["files"] = std::move(list);
  doc["wall_time_seconds"] = wall_seconds;
  write_text_file(output_dir / "manifest.json", doc.dump(2) + "\n");
  return entries;
}

}  // namespace circgossip
