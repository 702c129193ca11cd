#include <gtest/gtest.h>

#include "attn/errors.hpp"
#include "attn/time.hpp"

namespace attn {
namespace {

using std::chrono::microseconds;

TEST(TimestampTest, ParsesUtcAndOffsets) {
  const auto utc = parse_timestamp("2018-10-07T15:35:00Z", false);
  EXPECT_EQ(parse_timestamp("2018-10-07T12:35:00-03:00", false), utc);
  EXPECT_EQ(parse_timestamp("2018-10-07 15:35:00+00:00", false), utc);
  EXPECT_EQ(parse_timestamp("2018-10-07t15:35:00z", false), utc);
  EXPECT_EQ(parse_timestamp("2018-10-07T15:35:00.25Z", false) - utc, microseconds{250000});
}

TEST(TimestampTest, MissingZoneNeedsAssumeUtc) {
  EXPECT_THROW(parse_timestamp("2018-10-07T15:35:00", false), DataError);
  EXPECT_EQ(parse_timestamp("2018-10-07T15:35:00", true), parse_timestamp("2018-10-07T15:35:00Z", false));
}

TEST(TimestampTest, RejectsMalformedInput) {
  for (const char* bad : {"", "2018-13-01T00:00:00Z", "2018-02-30T00:00:00Z", "2018-10-07T25:00:00Z",
                          "2018-10-07T15:35Z", "2018-10-07T15:35:00+3", "yesterday", "2018-10-07T15:35:00Zjunk"}) {
    EXPECT_THROW(parse_timestamp(bad, true), DataError) << bad;
  }
}

TEST(TimestampTest, CanonicalFormatRoundTrips) {
  EXPECT_EQ(format_timestamp(parse_timestamp("2018-10-07T12:35:00-03:00", false)), "2018-10-07T15:35:00Z");
  EXPECT_EQ(format_timestamp(parse_timestamp("2018-10-07T15:35:00.000042Z", false)), "2018-10-07T15:35:00.000042Z");
  EXPECT_EQ(format_timestamp(parse_timestamp("1969-12-31T23:59:59.5Z", false)), "1969-12-31T23:59:59.500000Z");
}

TEST(TimestampTest, MinutesBetween) {
  EXPECT_DOUBLE_EQ(minutes_between(parse_timestamp("2018-10-07T15:35:00Z", false),
                                   parse_timestamp("2018-10-07T15:50:00Z", false)),
                   15.0);
}

TEST(TimestampTest, FormatDate) {
  EXPECT_EQ(format_date(std::chrono::floor<std::chrono::days>(parse_timestamp("2018-10-07T23:59:59Z", false))),
            "2018-10-07");
}

}  // namespace
}  // namespace attn
