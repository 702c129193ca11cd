#include "attn/ingest.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "attn/csv.hpp"
#include "attn/errors.hpp"

namespace attn {
namespace {

using nlohmann::json;

// Fields of one input record before validation.
struct RawRecord {
  std::optional<std::string> group_id;
  std::optional<std::string> message_id;
  std::optional<std::string> user_key;
  std::optional<std::string> user_id;
  std::optional<std::string> timestamp;
  std::optional<std::string> kind;
  std::optional<std::string> text;
  std::optional<std::string> reply_to;
  std::optional<std::string> dangling_reply;
};

class LogParser {
 public:
  explicit LogParser(const IngestOptions& options) : options_(options) {}

  void add(const RawRecord& raw, std::size_t line);
  ParseResult finish();

  void warn(std::size_t line, std::string message) {
    result_.warnings.push_back({line, std::move(message)});
  }

 private:
  void resolve_replies();

  const IngestOptions& options_;
  ParseResult result_;
  std::vector<std::size_t> lines_;
  std::unordered_map<std::string, std::int64_t> next_seq_;
};

void LogParser::add(const RawRecord& raw, std::size_t line) {
  auto missing = [&](const char* field) { warn(line, std::string("missing or empty field '") + field + "'"); };
  if (!raw.group_id || raw.group_id->empty()) return missing("group_id");
  if (!raw.message_id || raw.message_id->empty()) return missing("message_id");
  if (!raw.timestamp || raw.timestamp->empty()) return missing("timestamp");

  Message m;
  m.group_id = *raw.group_id;
  m.message_id = *raw.message_id;

  if (raw.user_id && !raw.user_id->empty()) {
    m.user_id = *raw.user_id;
  } else if (raw.user_key && !raw.user_key->empty()) {
    if (!options_.salt) {
      throw ConfigError("line " + std::to_string(line) +
                        ": record carries user_key but no salt was configured (--salt-file)");
    }
    m.user_id = anonymize(*raw.user_key, *options_.salt);
  } else {
    return missing("user_id/user_key");
  }

  try {
    m.timestamp = parse_timestamp(*raw.timestamp, options_.assume_utc);
  } catch (const DataError& e) {
    return warn(line, e.what());
  }

  const std::string kind = raw.kind.value_or("text");
  if (kind == "text") {
    m.kind = MessageKind::text;
    m.text = raw.text.value_or("");
  } else if (kind == "media") {
    m.kind = MessageKind::media;
    if (raw.text && !raw.text->empty()) warn(line, "media message text discarded");
  } else {
    return warn(line, "unknown kind '" + kind + "'");
  }
  m.urls = extract_urls(m.text);
  if (raw.reply_to && !raw.reply_to->empty()) m.reply_to = *raw.reply_to;
  if (raw.dangling_reply && !raw.dangling_reply->empty()) m.dangling_reply = *raw.dangling_reply;

  m.seq = next_seq_[m.group_id]++;
  result_.messages.push_back(std::move(m));
  lines_.push_back(line);
}

void LogParser::resolve_replies() {
  // First occurrence wins for lookups; duplicates are reported by validate_corpus.
  std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>> index;
  for (std::size_t i = 0; i < result_.messages.size(); ++i) {
    const auto& m = result_.messages[i];
    index[m.group_id].try_emplace(m.message_id, i);
  }
  for (std::size_t i = 0; i < result_.messages.size(); ++i) {
    auto& m = result_.messages[i];
    if (!m.reply_to) continue;
    const auto& group = index[m.group_id];
    const auto it = group.find(*m.reply_to);
    std::string problem;
    if (it == group.end()) {
      problem = "is not in the log";
    } else if (!posted_before(result_.messages[it->second], m)) {
      problem = "was not posted before the reply";
    }
    if (!problem.empty()) {
      warn(lines_[i], "dangling reply: message '" + m.message_id + "' replies to '" + *m.reply_to +
                          "' which " + problem + "; edge dropped");
      m.dangling_reply = std::move(m.reply_to);
      m.reply_to.reset();
    }
  }
}

ParseResult LogParser::finish() {
  resolve_replies();
  std::stable_sort(result_.warnings.begin(), result_.warnings.end(),
                   [](const IngestWarning& a, const IngestWarning& b) { return a.line < b.line; });
  return std::move(result_);
}

std::optional<std::string> string_field(const json& obj, const char* key, std::size_t line,
                                        LogParser& parser, bool& ok) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  parser.warn(line, std::string("field '") + key + "' has the wrong type");
  ok = false;
  return std::nullopt;
}

void parse_jsonl(std::istream& in, LogParser& parser) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      parser.warn(line_no, std::string("malformed JSON: ") + e.what());
      continue;
    }
    if (!obj.is_object()) {
      parser.warn(line_no, "record is not a JSON object");
      continue;
    }
    bool ok = true;
    RawRecord raw;
    raw.group_id = string_field(obj, "group_id", line_no, parser, ok);
    raw.message_id = string_field(obj, "message_id", line_no, parser, ok);
    raw.user_key = string_field(obj, "user_key", line_no, parser, ok);
    raw.user_id = string_field(obj, "user_id", line_no, parser, ok);
    raw.timestamp = string_field(obj, "timestamp", line_no, parser, ok);
    raw.kind = string_field(obj, "kind", line_no, parser, ok);
    raw.text = string_field(obj, "text", line_no, parser, ok);
    raw.reply_to = string_field(obj, "reply_to", line_no, parser, ok);
    raw.dangling_reply = string_field(obj, "dangling_reply_to", line_no, parser, ok);
    if (ok) parser.add(raw, line_no);
  }
  if (in.bad()) throw IoError("read error in message log after line " + std::to_string(line_no));
}

void parse_csv(std::istream& in, LogParser& parser) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) return;
  const CsvHeader header(fields);
  const std::size_t group = header.require("group_id", "message CSV header");
  const std::size_t message = header.require("message_id", "message CSV header");
  const std::size_t timestamp = header.require("timestamp", "message CSV header");
  const auto user_key = header.find("user_key");
  const auto user_id = header.find("user_id");
  if (!user_key && !user_id) throw DataError("message CSV header: needs a 'user_key' or 'user_id' column");
  const auto kind = header.find("kind");
  const auto text = header.find("text");
  const auto reply = header.find("reply_to");
  const auto dangling = header.find("dangling_reply_to");

  while (true) {
    bool more = false;
    try {
      more = reader.next(fields);
    } catch (const DataError& e) {
      parser.warn(reader.line(), e.what());
      break;
    }
    if (!more) break;
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != header.size()) {
      parser.warn(reader.line(), "expected " + std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
      continue;
    }
    auto opt = [&](std::optional<std::size_t> idx) -> std::optional<std::string> {
      if (!idx || fields[*idx].empty()) return std::nullopt;
      return fields[*idx];
    };
    RawRecord raw;
    raw.group_id = fields[group];
    raw.message_id = fields[message];
    raw.timestamp = fields[timestamp];
    raw.user_key = opt(user_key);
    raw.user_id = opt(user_id);
    raw.kind = opt(kind);
    raw.text = opt(text);
    raw.reply_to = opt(reply);
    raw.dangling_reply = opt(dangling);
    parser.add(raw, reader.line());
  }
  if (in.bad()) throw IoError("read error in message CSV");
}

bool url_char(unsigned char c) {
  if (std::isalnum(c) || c >= 0x80) return true;
  static constexpr std::string_view kAllowed = "-._~:/?#[]@!$&'()*+,;=%";
  return kAllowed.find(static_cast<char>(c)) != std::string_view::npos;
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(MessageKind kind) { return kind == MessageKind::text ? "text" : "media"; }

std::string_view to_string(GroupCategory category) {
  return category == GroupCategory::political ? "political" : "non_political";
}

std::optional<GroupCategory> parse_group_category(std::string_view text) {
  if (text == "political") return GroupCategory::political;
  if (text == "non_political") return GroupCategory::non_political;
  return std::nullopt;
}

LogFormat parse_log_format(std::string_view tag) {
  if (tag == "jsonl") return LogFormat::jsonl;
  if (tag == "csv") return LogFormat::csv;
  throw ConfigError("unknown log format '" + std::string(tag) + "' (expected jsonl or csv)");
}

ParseResult parse_log(std::istream& in, LogFormat format, const IngestOptions& options) {
  if (!in.good() && !in.eof()) throw IoError("message log stream is not readable");
  LogParser parser(options);
  if (format == LogFormat::jsonl) {
    parse_jsonl(in, parser);
  } else {
    parse_csv(in, parser);
  }
  return parser.finish();
}

std::string anonymize(std::string_view raw_user_key, std::string_view salt) {
  if (salt.empty()) throw ConfigError("anonymisation salt must not be empty");
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!HMAC(EVP_sha256(), salt.data(), static_cast<int>(salt.size()),
            reinterpret_cast<const unsigned char*>(raw_user_key.data()), raw_user_key.size(), md.data(),
            &len)) {
    throw Error("HMAC-SHA256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id = "u";
  for (unsigned int i = 0; i < 12 && i < len; ++i) {
    id += kHex[md[i] >> 4];
    id += kHex[md[i] & 0xF];
  }
  return id;
}

std::vector<std::string> extract_urls(std::string_view text) {
  std::vector<std::string> urls;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto rest = text.substr(i);
    const bool at_word_start = i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
    std::size_t scheme = 0;
    if (at_word_start) {
      if (istarts_with(rest, "https://")) scheme = 8;
      else if (istarts_with(rest, "http://")) scheme = 7;
      else if (istarts_with(rest, "www.")) scheme = 4;
    }
    if (scheme == 0) {
      ++i;
      continue;
    }
    std::size_t end = i + scheme;
    while (end < text.size() && url_char(static_cast<unsigned char>(text[end]))) ++end;
    std::string_view url = text.substr(i, end - i);
    // Trailing punctuation belongs to the sentence, unbalanced closers too.
    while (!url.empty()) {
      const char last = url.back();
      if (std::string_view(".,;:!?'\"").find(last) != std::string_view::npos) {
        url.remove_suffix(1);
        continue;
      }
      if (last == ')' || last == ']') {
        const char open = last == ')' ? '(' : '[';
        if (std::count(url.begin(), url.end(), open) < std::count(url.begin(), url.end(), last)) {
          url.remove_suffix(1);
          continue;
        }
      }
      break;
    }
    if (url.size() > scheme) urls.emplace_back(url);
    i = end;
  }
  return urls;
}

std::string to_jsonl(const Message& m) {
  json obj = json::object();
  obj["group_id"] = m.group_id;
  obj["message_id"] = m.message_id;
  obj["user_id"] = m.user_id;
  obj["timestamp"] = format_timestamp(m.timestamp);
  obj["seq"] = m.seq;
  obj["kind"] = to_string(m.kind);
  obj["text"] = m.text;
  obj["urls"] = m.urls;
  obj["reply_to"] = m.reply_to ? json(*m.reply_to) : json(nullptr);
  if (m.dangling_reply) obj["dangling_reply_to"] = *m.dangling_reply;
  return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

void write_messages(std::ostream& out, std::span<const Message> messages) {
  for (const auto& m : messages) out << to_jsonl(m) << '\n';
}

std::vector<GroupLabel> read_group_labels(std::istream& in, std::string_view source) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  std::vector<GroupLabel> labels;
  if (!reader.next(fields)) return labels;
  const CsvHeader header(fields);
  const auto group = header.require("group_id", source);
  const auto category = header.require("category", source);
  LabelMap seen;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(reader.line());
    if (fields.size() != header.size()) throw DataError(where + ": wrong number of fields");
    const auto parsed = parse_group_category(fields[category]);
    if (!parsed) {
      throw DataError(where + ": unknown category '" + fields[category] +
                      "' (expected political or non_political)");
    }
    const auto [it, inserted] = seen.emplace(fields[group], *parsed);
    if (!inserted) {
      if (it->second != *parsed) throw DataError(where + ": conflicting label for group '" + fields[group] + "'");
      continue;
    }
    labels.push_back({fields[group], *parsed});
  }
  return labels;
}

LabelMap to_label_map(std::span<const GroupLabel> labels) {
  LabelMap map;
  for (const auto& l : labels) map.emplace(l.group_id, l.category);
  return map;
}

CorpusSummary validate_corpus(std::span<const Message> messages, std::span<const GroupLabel> labels) {
  CorpusSummary summary;
  std::unordered_map<std::string, std::unordered_map<std::string, const Message*>> ids;
  for (const auto& m : messages) {
    auto& group_ids = ids[m.group_id];
    if (!group_ids.emplace(m.message_id, &m).second) {
      throw ValidationError("duplicate message_id '" + m.message_id + "' in group '" + m.group_id + "'");
    }
  }
  for (const auto& m : messages) {
    auto& g = summary.groups[m.group_id];
    ++g.messages;
    if (!g.first || m.timestamp < *g.first) g.first = m.timestamp;
    if (!g.last || m.timestamp > *g.last) g.last = m.timestamp;
    bool dangling = m.dangling_reply.has_value();
    if (m.reply_to) {
      const auto& group_ids = ids[m.group_id];
      const auto it = group_ids.find(*m.reply_to);
      if (it == group_ids.end() || !posted_before(*it->second, m)) {
        dangling = true;
      } else {
        ++g.replies;
      }
    }
    if (dangling) ++g.dangling_replies;
  }
  for (const auto& [id, g] : summary.groups) {
    summary.total_messages += g.messages;
    summary.total_replies += g.replies;
    summary.dangling_replies += g.dangling_replies;
    if (!summary.first || *g.first < *summary.first) summary.first = g.first;
    if (!summary.last || *g.last > *summary.last) summary.last = g.last;
  }

  const LabelMap label_map = to_label_map(labels);
  std::vector<std::string> unlabeled;
  for (const auto& [id, g] : summary.groups) {
    if (label_map.contains(id)) {
      ++summary.labeled_groups;
    } else {
      unlabeled.push_back(id);
    }
  }
  for (const auto& [id, category] : label_map) {
    if (!summary.groups.contains(id)) summary.unused_labels.push_back(id);
  }
  if (!unlabeled.empty()) throw UnlabeledGroupsError(std::move(unlabeled));
  return summary;
}

}  // namespace attn
