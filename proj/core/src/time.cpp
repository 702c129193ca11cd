#include "attn/time.hpp"

#include <cctype>
#include <cstdio>

#include "attn/errors.hpp"

namespace attn {
namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }

  int digits(int count) {
    int value = 0;
    for (int i = 0; i < count; ++i) {
      if (done() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("expected digit");
      value = value * 10 + (s_[pos_++] - '0');
    }
    return value;
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("bad timestamp '" + std::string(s_) + "': " + what + " at offset " +
                    std::to_string(pos_));
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Timestamp parse_timestamp(std::string_view text, bool assume_utc) {
  using namespace std::chrono;
  Cursor in(text);
  const int y = in.digits(4);
  in.expect('-');
  const int mo = in.digits(2);
  in.expect('-');
  const int d = in.digits(2);
  if (!in.accept('T') && !in.accept('t') && !in.accept(' ')) in.fail("expected date/time separator");
  const int hh = in.digits(2);
  in.expect(':');
  const int mm = in.digits(2);
  in.expect(':');
  const int ss = in.digits(2);

  std::int64_t micros = 0;
  if (in.accept('.')) {
    int n = 0;
    while (std::isdigit(static_cast<unsigned char>(in.peek()))) {
      const int digit = in.digits(1);
      if (n < 6) micros = micros * 10 + digit;
      ++n;
    }
    if (n == 0) in.fail("empty fraction");
    for (int i = n; i < 6; ++i) micros *= 10;
  }

  minutes offset{0};
  if (in.accept('Z') || in.accept('z')) {
  } else if (in.peek() == '+' || in.peek() == '-') {
    const bool negative = in.peek() == '-';
    in.accept(in.peek());
    const int oh = in.digits(2);
    in.expect(':');
    const int om = in.digits(2);
    if (oh > 23 || om > 59) in.fail("offset out of range");
    offset = hours(oh) + minutes(om);
    if (negative) offset = -offset;
  } else if (in.done()) {
    if (!assume_utc) in.fail("missing timezone (pass --assume-utc to treat as UTC)");
  } else {
    in.fail("unexpected character");
  }
  if (!in.done()) in.fail("trailing characters");

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) in.fail("invalid calendar date");
  if (hh > 23 || mm > 59 || ss > 60) in.fail("time of day out of range");

  const auto local = sys_days{ymd} + hours(hh) + minutes(mm) + seconds(ss) + microseconds(micros);
  return Timestamp{local - offset};
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss tod{t - day};
  char buf[48];
  const auto frac = tod.subseconds().count();
  if (frac == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%06lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(tod.hours().count()),
                  static_cast<int>(tod.minutes().count()), static_cast<int>(tod.seconds().count()),
                  static_cast<long long>(frac));
  }
  return buf;
}

std::string format_date(std::chrono::sys_days day) {
  const std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace attn
