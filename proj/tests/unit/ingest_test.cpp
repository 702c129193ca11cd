#include <gtest/gtest.h>

#include <sstream>

#include "attn/errors.hpp"
#include "attn/ingest.hpp"
#include "support.hpp"

namespace attn {
namespace {

ParseResult parse_jsonl(const std::string& text, IngestOptions options = {}) {
  std::istringstream in(text);
  return parse_log(in, LogFormat::jsonl, options);
}

TEST(IngestTest, SampleChatFixtureParsesCleanly) {
  auto in = open_input(test::fixture("sample_chat.jsonl"));
  const auto result = parse_log(in, LogFormat::jsonl);
  EXPECT_TRUE(result.warnings.empty());
  ASSERT_EQ(result.messages.size(), 7u);
  for (std::size_t i = 0; i < result.messages.size(); ++i) EXPECT_EQ(result.messages[i].seq, static_cast<std::int64_t>(i));
  EXPECT_EQ(result.messages[2].reply_to, "M2");
  EXPECT_EQ(result.messages[4].reply_to, "M3");
  EXPECT_EQ(result.messages[6].reply_to, "M2");
  EXPECT_FALSE(result.messages[0].reply_to);
}

TEST(IngestTest, SampleChatSummaryWithOneLabel) {
  const auto messages = test::load_sample_chat();
  const auto summary = validate_corpus(messages, std::vector<GroupLabel>{{"g1", GroupCategory::political}});
  EXPECT_EQ(summary.groups.size(), 1u);
  EXPECT_EQ(summary.total_messages, 7u);
  EXPECT_EQ(summary.total_replies, 3u);
  EXPECT_EQ(summary.dangling_replies, 0u);
  EXPECT_EQ(summary.labeled_groups, 1u);
}

TEST(IngestTest, MalformedLinesBecomeWarnings) {
  const auto r = parse_jsonl(
      "{\"group_id\":\"g\",\"message_id\":\"a\",\"user_id\":\"u\",\"timestamp\":\"2020-01-01T00:00:00Z\"}\n"
      "not json\n"
      "{\"group_id\":\"g\",\"message_id\":\"b\",\"user_id\":\"u\"}\n"
      "\n"
      "{\"group_id\":\"g\",\"message_id\":\"c\",\"user_id\":\"u\",\"timestamp\":\"2020-01-01T00:00:01Z\",\"kind\":\"sticker\"}\n"
      "{\"group_id\":\"g\",\"message_id\":\"d\",\"user_id\":\"u\",\"timestamp\":\"2020-01-01T00:00:02Z\"}\n");
  ASSERT_EQ(r.messages.size(), 2u);
  EXPECT_EQ(r.messages[1].message_id, "d");
  EXPECT_EQ(r.messages[1].seq, 1);
  ASSERT_EQ(r.warnings.size(), 3u);
  EXPECT_EQ(r.warnings[0].line, 2u);
  EXPECT_EQ(r.warnings[1].line, 3u);
  EXPECT_EQ(r.warnings[2].line, 5u);
}

TEST(IngestTest, DanglingRepliesKeepMessageDropEdge) {
  const auto r = parse_jsonl(
      "{\"group_id\":\"g\",\"message_id\":\"a\",\"user_id\":\"u\",\"timestamp\":\"2020-01-01T00:00:00Z\","
      "\"reply_to\":\"ghost\"}\n"
      "{\"group_id\":\"g\",\"message_id\":\"b\",\"user_id\":\"u\",\"timestamp\":\"2020-01-01T00:00:01Z\","
      "\"reply_to\":\"c\"}\n"
      "{\"group_id\":\"g\",\"message_id\":\"c\",\"user_id\":\"u\",\"timestamp\":\"2020-01-01T00:00:02Z\"}\n"
      "{\"group_id\":\"h\",\"message_id\":\"d\",\"user_id\":\"u\",\"timestamp\":\"2020-01-01T00:00:03Z\","
      "\"reply_to\":\"c\"}\n");
  ASSERT_EQ(r.messages.size(), 4u);
  ASSERT_EQ(r.warnings.size(), 3u);
  for (std::size_t i : {0u, 1u, 3u}) {
    EXPECT_FALSE(r.messages[i].reply_to) << i;
    EXPECT_TRUE(r.messages[i].dangling_reply) << i;
  }
  EXPECT_EQ(r.messages[0].dangling_reply, "ghost");
}

TEST(IngestTest, UserKeyIsAnonymised) {
  const std::string line =
      "{\"group_id\":\"g\",\"message_id\":\"a\",\"user_key\":\"+55 11 99999-0000\",\"timestamp\":\"2020-01-01T00:00:00Z\"}\n";
  EXPECT_THROW(parse_jsonl(line), ConfigError);
  IngestOptions options;
  options.salt = "pepper";
  const auto r = parse_jsonl(line, options);
  ASSERT_EQ(r.messages.size(), 1u);
  // HMAC-SHA256("pepper", key), first 96 bits, computed with Python's hmac module.
  EXPECT_EQ(r.messages[0].user_id, "u362917173eb52db6b95b28b0");
}

TEST(IngestTest, AnonymiseIsKeyedAndDeterministic) {
  EXPECT_EQ(anonymize("alice", "s1"), anonymize("alice", "s1"));
  EXPECT_NE(anonymize("alice", "s1"), anonymize("alice", "s2"));
  EXPECT_NE(anonymize("alice", "s1"), anonymize("bob", "s1"));
  EXPECT_EQ(anonymize("alice", "s1").size(), 25u);
  EXPECT_THROW(anonymize("alice", ""), ConfigError);
}

TEST(IngestTest, MediaTextDiscarded) {
  const auto r = parse_jsonl(
      "{\"group_id\":\"g\",\"message_id\":\"a\",\"user_id\":\"u\",\"timestamp\":\"2020-01-01T00:00:00Z\","
      "\"kind\":\"media\",\"text\":\"caption http://x.org\"}\n");
  ASSERT_EQ(r.messages.size(), 1u);
  EXPECT_EQ(r.messages[0].kind, MessageKind::media);
  EXPECT_TRUE(r.messages[0].text.empty());
  EXPECT_TRUE(r.messages[0].urls.empty());
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(IngestTest, CsvMirrorMatchesJsonl) {
  std::istringstream csv(
      "group_id,message_id,user_id,timestamp,kind,text,reply_to\n"
      "g1,M1,U4,2018-10-07T15:31:00Z,text,\"MESSAGE 1\",\n"
      "g1,M2,U1,2018-10-07T15:35:00Z,text,\"MESSAGE 2\",\n"
      "g1,M3,U2,2018-10-07T15:38:00Z,text,\"MESSAGE 3\",M2\n");
  const auto r = parse_log(csv, LogFormat::csv);
  EXPECT_TRUE(r.warnings.empty());
  const auto sample = test::load_sample_chat();
  ASSERT_EQ(r.messages.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.messages[i], sample[i]);
}

TEST(IngestTest, CsvHeaderMustMatchSchema) {
  std::istringstream csv("group_id,message_id,timestamp\ng,a,2020-01-01T00:00:00Z\n");
  EXPECT_THROW(parse_log(csv, LogFormat::csv), DataError);
}

TEST(IngestTest, UnknownFormatTag) { EXPECT_THROW(parse_log_format("xml"), ConfigError); }

TEST(IngestTest, CanonicalJsonlRoundTrips) {
  auto messages = test::load_sample_chat();
  messages[1].text = "see https://example.org/a?b=1, ok";
  messages[1].urls = extract_urls(messages[1].text);
  messages[3].dangling_reply = "M0";
  std::ostringstream out;
  write_messages(out, messages);
  const auto back = parse_jsonl(out.str());
  EXPECT_TRUE(back.warnings.empty());
  EXPECT_EQ(back.messages, messages);
}

TEST(IngestTest, ExtractUrls) {
  EXPECT_EQ(extract_urls("veja https://g1.globo.com/fato-ou-fake/x.ghtml. e www.boatos.org!"),
            (std::vector<std::string>{"https://g1.globo.com/fato-ou-fake/x.ghtml", "www.boatos.org"}));
  EXPECT_EQ(extract_urls("(link: http://a.b/c_(d))"), (std::vector<std::string>{"http://a.b/c_(d)"}));
  EXPECT_TRUE(extract_urls("no links, nowww.here http://").empty());
}

TEST(IngestTest, ValidateCorpusErrors) {
  std::vector<Message> dup{test::msg("g", "a", "u", "2020-01-01T00:00:00Z"),
                           test::msg("g", "a", "u", "2020-01-01T00:00:01Z")};
  EXPECT_THROW(validate_corpus(dup, std::vector<GroupLabel>{{"g", GroupCategory::political}}), ValidationError);

  std::vector<Message> two{test::msg("g", "a", "u", "2020-01-01T00:00:00Z"),
                           test::msg("h", "a", "u", "2020-01-01T00:00:01Z")};
  try {
    validate_corpus(two, std::vector<GroupLabel>{{"g", GroupCategory::political}, {"z", GroupCategory::political}});
    FAIL() << "expected UnlabeledGroupsError";
  } catch (const UnlabeledGroupsError& e) {
    EXPECT_EQ(e.groups(), std::vector<std::string>{"h"});
    EXPECT_NE(std::string(e.what()).find("h"), std::string::npos);
  }
}

TEST(IngestTest, GroupLabels) {
  std::istringstream good("group_id,category\ng1,political\ng2,non_political\ng1,political\n");
  const auto labels = read_group_labels(good);
  const auto map = to_label_map(labels);
  EXPECT_EQ(map.at("g1"), GroupCategory::political);
  EXPECT_EQ(map.at("g2"), GroupCategory::non_political);

  std::istringstream unknown("group_id,category\ng1,sports\n");
  EXPECT_THROW(read_group_labels(unknown, "labels.csv"), DataError);
  std::istringstream conflict("group_id,category\ng1,political\ng1,non_political\n");
  EXPECT_THROW(read_group_labels(conflict), DataError);
}

}  // namespace
}  // namespace attn
