#include "wavecurve/artifacts.hpp"

#include <array>
#include <fstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "wavecurve/error.hpp"

namespace wavecurve {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

void ArtifactSet::add(const std::string& name, std::string content) {
  if (name.empty() || name == "manifest.json") throw InputError("artifact name '" + name + "' is reserved");
  if (!files_.emplace(name, std::move(content)).second) throw InputError("duplicate artifact '" + name + "'");
}

void ArtifactSet::stage(std::string scope, std::string stage, std::string status, std::string notice) {
  stages_.push_back({std::move(scope), std::move(stage), std::move(status), std::move(notice)});
}

void ArtifactSet::warning(std::string message) { warnings_.push_back(std::move(message)); }

std::string ArtifactSet::manifest_json(const std::string& config_hash, std::uint64_t seed) const {
  using nlohmann::ordered_json;
  ordered_json m;
  m["tool"] = "wavecurve";
  m["config_sha256"] = config_hash;
  m["seed"] = seed;
  ordered_json files = ordered_json::array();
  for (const auto& [name, content] : files_) {
    files.push_back({{"file", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
  }
  m["artifacts"] = files;
  ordered_json stages = ordered_json::array();
  for (const auto& s : stages_) {
    ordered_json o{{"scope", s.scope}, {"stage", s.stage}, {"status", s.status}};
    if (!s.notice.empty()) o["notice"] = s.notice;
    stages.push_back(o);
  }
  m["stages"] = stages;
  m["warnings"] = warnings_;
  return m.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

std::string ArtifactSet::write(const std::filesystem::path& dir, const std::string& config_hash,
                               std::uint64_t seed) const {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : files_) write_file(dir / name, content);
  const std::string manifest = manifest_json(config_hash, seed);
  const auto tmp = dir / "manifest.json.tmp";
  write_file(tmp, manifest);
  std::filesystem::rename(tmp, dir / "manifest.json");
  return manifest;
}

}  // namespace wavecurve
