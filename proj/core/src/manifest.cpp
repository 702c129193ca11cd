#include "attn/manifest.hpp"

#include <algorithm>

#include "attn/errors.hpp"
#include "attn/io.hpp"

namespace attn {

using nlohmann::json;

PipelineManifest PipelineManifest::load(const std::filesystem::path& path) {
  PipelineManifest manifest;
  if (!std::filesystem::exists(path)) return manifest;
  json j;
  try {
    j = json::parse(read_file(path));
    for (const auto& e : j.at("entries")) {
      ManifestEntry entry;
      entry.stage = e.at("stage").get<std::string>();
      for (const auto& in : e.at("inputs")) entry.inputs.push_back({in.at("path").get<std::string>(), in.at("sha256").get<std::string>()});
      entry.params = e.value("params", json::object());
      entry.version = e.value("version", "");
      entry.outputs = e.at("outputs").get<std::vector<std::string>>();
      manifest.entries_.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": malformed manifest: " + e.what());
  }
  return manifest;
}

void PipelineManifest::save(const std::filesystem::path& path) const {
  json entries = json::array();
  for (const auto& e : entries_) {
    json inputs = json::array();
    for (const auto& in : e.inputs) inputs.push_back({{"path", in.path}, {"sha256", in.sha256}});
    entries.push_back({{"stage", e.stage}, {"inputs", inputs}, {"params", e.params}, {"version", e.version}, {"outputs", e.outputs}});
  }
  auto out = open_output(path);
  out << json{{"entries", entries}}.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<std::string> PipelineManifest::stale_inputs(const std::string& stage,
                                                        const std::vector<ManifestInput>& inputs) const {
  std::vector<std::string> warnings;
  const auto* previous = find(stage);
  if (previous == nullptr) return warnings;
  for (const auto& in : inputs) {
    const auto it = std::find_if(previous->inputs.begin(), previous->inputs.end(),
                                 [&](const ManifestInput& p) { return p.path == in.path; });
    if (it != previous->inputs.end() && it->sha256 != in.sha256) {
      warnings.push_back("stale manifest: input '" + in.path + "' of stage " + stage + " changed since the recorded run");
    }
  }
  return warnings;
}

void PipelineManifest::record(ManifestEntry entry) {
  entries_.erase(std::remove_if(entries_.begin(), entries_.end(), [&](const ManifestEntry& e) { return e.stage == entry.stage; }),
                 entries_.end());
  for (auto& e : entries_) {
    std::erase_if(e.outputs, [&](const std::string& p) {
      return std::find(entry.outputs.begin(), entry.outputs.end(), p) != entry.outputs.end();
    });
  }
  entries_.push_back(std::move(entry));
}

const ManifestEntry* PipelineManifest::find(const std::string& stage) const {
  for (const auto& e : entries_) {
    if (e.stage == stage) return &e;
  }
  return nullptr;
}

std::vector<ManifestInput> digest_inputs(const std::vector<std::filesystem::path>& paths) {
  std::vector<ManifestInput> inputs;
  for (const auto& p : paths) inputs.push_back({p.string(), file_digest(p)});
  return inputs;
}

}  // namespace attn
