#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "attn/cascade.hpp"
#include "attn/ingest.hpp"
#include "attn/io.hpp"
#include "attn/time.hpp"

namespace attn::test {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(ATTN_FIXTURES_DIR) / name; }

inline Message msg(std::string group, std::string id, std::string user, const std::string& time,
                   std::optional<std::string> reply_to = std::nullopt, std::int64_t seq = 0) {
  Message m;
  m.group_id = std::move(group);
  m.message_id = std::move(id);
  m.user_id = std::move(user);
  m.timestamp = parse_timestamp(time, false);
  m.seq = seq;
  m.reply_to = std::move(reply_to);
  return m;
}

inline std::vector<Message> load_sample_chat() {
  auto in = open_input(fixture("sample_chat.jsonl"));
  return parse_log(in, LogFormat::jsonl).messages;
}

// Cascade with the given parent array; nodes one minute apart, users u<i>.
inline Cascade tree_cascade(const std::vector<int>& parent, std::vector<std::string> users = {}) {
  Cascade c;
  c.group_id = "g";
  const auto t0 = parse_timestamp("2020-01-01T00:00:00Z", false);
  for (std::size_t i = 0; i < parent.size(); ++i) {
    CascadeNode n;
    n.message_id = "m" + std::to_string(i);
    n.user_id = users.empty() ? "u" + std::to_string(i) : users[i];
    n.timestamp = t0 + std::chrono::minutes{static_cast<int>(i)};
    n.seq = static_cast<std::int64_t>(i);
    n.parent = parent[i];
    n.depth = parent[i] < 0 ? 0 : c.nodes[static_cast<std::size_t>(parent[i])].depth + 1;
    c.nodes.push_back(n);
  }
  c.cascade_id = make_cascade_id(c.group_id, c.nodes.front().message_id);
  return c;
}

// Random recursive tree: parent[i] uniform in [0, i).
inline std::vector<int> random_tree(std::mt19937_64& rng, int n) {
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  for (int i = 1; i < n; ++i) parent[static_cast<std::size_t>(i)] = static_cast<int>(rng() % static_cast<unsigned>(i));
  return parent;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("attn-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  auto out = open_output(path);
  out << content;
}

}  // namespace attn::test
