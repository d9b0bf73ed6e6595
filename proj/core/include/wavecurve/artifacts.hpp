#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace wavecurve {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

struct StageRecord {
  std::string scope;  // wave id, or "all" for cross-wave stages
  std::string stage;
  std::string status;  // "ok" or "skipped"
  std::string notice;
};

/// In-memory set of output files plus the bookkeeping that goes into the
/// manifest. Nothing touches the disk until write().
class ArtifactSet {
 public:
  /// Throws InputError when the name is already taken.
  void add(const std::string& name, std::string content);
  void stage(std::string scope, std::string stage, std::string status = "ok", std::string notice = {});
  void warning(std::string message);

  const std::map<std::string, std::string>& files() const noexcept { return files_; }
  const std::vector<StageRecord>& stages() const noexcept { return stages_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Deterministic manifest: config hash, seed, per-file checksums, stage
  /// statuses and warnings. No timestamps or host details.
  std::string manifest_json(const std::string& config_hash, std::uint64_t seed) const;

  /// Writes every file, then manifest.json last via a temporary file and a
  /// rename. Returns the manifest text.
  std::string write(const std::filesystem::path& dir, const std::string& config_hash, std::uint64_t seed) const;

 private:
  std::map<std::string, std::string> files_;
  std::vector<StageRecord> stages_;
  std::vector<std::string> warnings_;
};

}  // namespace wavecurve
