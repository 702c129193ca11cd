#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace attn {

struct ManifestInput {
  std::string path;
  std::string sha256;
};

struct ManifestEntry {
  std::string stage;
  std::vector<ManifestInput> inputs;
  nlohmann::json params = nlohmann::json::object();
  std::string version;
  std::vector<std::string> outputs;
};

// Record of which stage produced which file from which inputs. One entry
// per stage; every output path appears in exactly one entry.
class PipelineManifest {
 public:
  // Missing file yields an empty manifest; unreadable or malformed JSON
  // throws DataError naming the file.
  static PipelineManifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  // Warnings for inputs whose current digest differs from the one recorded
  // by the previous run of the same stage.
  std::vector<std::string> stale_inputs(const std::string& stage, const std::vector<ManifestInput>& inputs) const;

  // Replaces the stage's entry and removes its outputs from other entries.
  void record(ManifestEntry entry);

  const std::vector<ManifestEntry>& entries() const { return entries_; }
  const ManifestEntry* find(const std::string& stage) const;

 private:
  std::vector<ManifestEntry> entries_;
};

// Digests each path (which must exist); throws IoError otherwise.
std::vector<ManifestInput> digest_inputs(const std::vector<std::filesystem::path>& paths);

}  // namespace attn
