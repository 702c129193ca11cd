#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace attn {

// All instants are UTC with microsecond resolution.
using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;

// Parses RFC-3339 ("2018-10-07T15:35:00Z", "...T15:35:00.25-03:00") and
// the common export variant with a space separator. A timestamp without a
// zone designator is accepted only when assume_utc is set.
// Throws attn::DataError describing the problem.
Timestamp parse_timestamp(std::string_view text, bool assume_utc);

// Canonical UTC form: "YYYY-MM-DDTHH:MM:SSZ", with a six-digit fraction
// only when the sub-second part is non-zero.
std::string format_timestamp(Timestamp t);

// "YYYY-MM-DD" of the UTC calendar day containing t.
std::string format_date(std::chrono::sys_days day);

inline double minutes_between(Timestamp from, Timestamp to) {
  return std::chrono::duration<double, std::ratio<60>>(to - from).count();
}

}  // namespace attn
