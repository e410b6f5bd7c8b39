#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "mfvl/config.hpp"

namespace mfvl {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Record of one run: config and per-section digests, versions, seed,
/// thread count, stage wall times, output digests and named results.
class RunManifest {
 public:
  using Value = std::variant<double, bool, std::string>;

  RunManifest(const ExperimentConfig& config, std::string command);

  const std::string& config_digest() const { return config_digest_; }
  const std::map<std::string, std::string>& section_digests() const { return section_digests_; }

  void add_stage(const std::string& name, double seconds);
  /// The digest is taken when the manifest is written.
  void add_output(const std::filesystem::path& path);
  void set(const std::string& key, Value value);

  /// JSON text of the manifest.
  std::string dump() const;

  /// Writes `dir`/manifest.json. Throws ValidationError if a manifest for a
  /// different command, config or seed already exists there.
  std::filesystem::path write(const std::filesystem::path& dir) const;

 private:
  std::string command_;
  std::string config_digest_;
  std::map<std::string, std::string> section_digests_;
  std::uint64_t seed_;
  int threads_;
  std::vector<std::pair<std::string, double>> stages_;
  std::vector<std::filesystem::path> outputs_;
  std::map<std::string, Value> results_;
};

/// Version strings of the library and its numerical dependencies.
std::map<std::string, std::string> library_versions();

}  // namespace mfvl
