#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attn/time.hpp"

namespace attn {

enum class MessageKind { text, media };

std::string_view to_string(MessageKind kind);

// One chat event. seq is the export order within the group and breaks
// timestamp ties; (timestamp, seq) is a strict total order per group.
struct Message {
  std::string group_id;
  std::string message_id;
  std::string user_id;
  Timestamp timestamp{};
  std::int64_t seq = 0;
  MessageKind kind = MessageKind::text;
  std::string text;
  std::vector<std::string> urls;
  std::optional<std::string> reply_to;
  // Original reply target when it could not be resolved to an earlier
  // message of the same group. reply_to is cleared in that case.
  std::optional<std::string> dangling_reply;

  bool operator==(const Message&) const = default;
};

// (timestamp, seq) ordering used everywhere a "posted before" test is needed.
inline bool posted_before(const Message& a, const Message& b) {
  return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.seq < b.seq;
}

enum class GroupCategory { political, non_political };

std::string_view to_string(GroupCategory category);
std::optional<GroupCategory> parse_group_category(std::string_view text);

struct GroupLabel {
  std::string group_id;
  GroupCategory category = GroupCategory::non_political;
};

using LabelMap = std::map<std::string, GroupCategory, std::less<>>;

struct IngestWarning {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  std::vector<Message> messages;
  std::vector<IngestWarning> warnings;
};

enum class LogFormat { jsonl, csv };

// Throws ConfigError for anything other than "jsonl" or "csv".
LogFormat parse_log_format(std::string_view tag);

struct IngestOptions {
  // Timestamps without a zone designator are read as UTC instead of rejected.
  bool assume_utc = false;
  // Required when records carry user_key (raw phone numbers) instead of an
  // already-anonymised user_id.
  std::optional<std::string> salt;
};

// Parses an exported log. Malformed records become warnings carrying their
// source line; they never abort the parse. Replies whose target is absent or
// not strictly earlier are kept as messages with the edge dropped.
// Throws IoError if the stream goes bad, ConfigError when user_key records
// arrive without a salt, DataError on a CSV header that does not match the
// schema.
ParseResult parse_log(std::istream& in, LogFormat format, const IngestOptions& options = {});

// Keyed one-way hash (HMAC-SHA256, 96-bit hex prefix) of a raw user key.
// Throws ConfigError on an empty salt.
std::string anonymize(std::string_view raw_user_key, std::string_view salt);

// http(s):// and www. links, trailing sentence punctuation trimmed.
std::vector<std::string> extract_urls(std::string_view text);

// Canonical JSONL record for a message, the same schema parse_log reads.
std::string to_jsonl(const Message& message);
void write_messages(std::ostream& out, std::span<const Message> messages);

// group_id,category. Throws DataError on unknown categories or conflicting
// duplicates, naming the line.
std::vector<GroupLabel> read_group_labels(std::istream& in, std::string_view source = "labels");
LabelMap to_label_map(std::span<const GroupLabel> labels);

struct GroupSummary {
  std::size_t messages = 0;
  std::size_t replies = 0;
  std::size_t dangling_replies = 0;
  std::optional<Timestamp> first;
  std::optional<Timestamp> last;
};

struct CorpusSummary {
  std::map<std::string, GroupSummary> groups;
  std::size_t total_messages = 0;
  std::size_t total_replies = 0;
  std::size_t dangling_replies = 0;
  std::optional<Timestamp> first;
  std::optional<Timestamp> last;
  std::size_t labeled_groups = 0;
  // Labels naming groups that have no messages.
  std::vector<std::string> unused_labels;
};

// Throws ValidationError naming the first duplicate (group_id:message_id)
// and UnlabeledGroupsError listing every group without a label.
CorpusSummary validate_corpus(std::span<const Message> messages, std::span<const GroupLabel> labels);

}  // namespace attn
