#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "rulefoil/errors.hpp"

namespace rulefoil {

namespace detail {

// Howard Hinnant's civil-date algorithms; proleptic Gregorian calendar.
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m,
                            unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

inline unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr unsigned lengths[] = {31, 28, 31, 30, 31, 30,
                                         31, 31, 30, 31, 30, 31};
  if (m == 2) {
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return leap ? 29 : 28;
  }
  return lengths[m - 1];
}

}  // namespace detail

// UTC instant with millisecond precision. Parsed from and rendered to
// RFC 3339; rendering always uses the Z suffix and exactly three
// fractional digits so a re-serialized timestamp is byte-stable.
struct Instant {
  std::int64_t unix_ms{0};

  auto operator<=>(const Instant&) const = default;

  Instant operator+(std::chrono::milliseconds d) const {
    return Instant{unix_ms + d.count()};
  }
  Instant operator-(std::chrono::milliseconds d) const {
    return Instant{unix_ms - d.count()};
  }
  std::chrono::milliseconds operator-(Instant other) const {
    return std::chrono::milliseconds(unix_ms - other.unix_ms);
  }

  static Instant parse(std::string_view text);
  std::string to_string() const;

  static Instant now() {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::system_clock::now().time_since_epoch());
    return Instant{ms.count()};
  }
};

inline Instant Instant::parse(std::string_view text) {
  const auto fail = [&]() -> Instant {
    throw ValidationError("invalid RFC 3339 timestamp: '" + std::string(text) +
                          "'");
  };
  std::size_t pos = 0;
  const auto read_digits = [&](std::size_t count) -> std::int64_t {
    if (pos + count > text.size()) fail();
    std::int64_t value = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const char c = text[pos + i];
      if (c < '0' || c > '9') fail();
      value = value * 10 + (c - '0');
    }
    pos += count;
    return value;
  };
  const auto expect = [&](char c) {
    if (pos >= text.size() || text[pos] != c) fail();
    ++pos;
  };

  const std::int64_t year = read_digits(4);
  expect('-');
  const std::int64_t month = read_digits(2);
  expect('-');
  const std::int64_t day = read_digits(2);
  if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't' &&
                             text[pos] != ' ')) {
    fail();
  }
  ++pos;
  const std::int64_t hour = read_digits(2);
  expect(':');
  const std::int64_t minute = read_digits(2);
  expect(':');
  const std::int64_t second = read_digits(2);

  std::int64_t millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    std::int64_t frac = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) frac = frac * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) fail();
    while (digits < 3) {
      frac *= 10;
      ++digits;
    }
    millis = frac;
  }

  std::int64_t offset_minutes = 0;
  if (pos >= text.size()) fail();
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    const bool negative = text[pos] == '-';
    ++pos;
    const std::int64_t oh = read_digits(2);
    expect(':');
    const std::int64_t om = read_digits(2);
    if (oh > 23 || om > 59) fail();
    offset_minutes = (negative ? -1 : 1) * (oh * 60 + om);
  } else {
    fail();
  }
  if (pos != text.size()) fail();

  if (month < 1 || month > 12) fail();
  if (day < 1 ||
      day > detail::days_in_month(year, static_cast<unsigned>(month))) {
    fail();
  }
  if (hour > 23 || minute > 59 || second > 59) fail();

  const std::int64_t days = detail::days_from_civil(
      year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  std::int64_t ms = days * 86'400'000 + hour * 3'600'000 + minute * 60'000 +
                    second * 1'000 + millis;
  ms -= offset_minutes * 60'000;
  return Instant{ms};
}

inline std::string Instant::to_string() const {
  std::int64_t days = unix_ms / 86'400'000;
  std::int64_t rem = unix_ms % 86'400'000;
  if (rem < 0) {
    rem += 86'400'000;
    --days;
  }
  std::int64_t year = 0;
  unsigned month = 0;
  unsigned day = 0;
  detail::civil_from_days(days, year, month, day);
  const auto hour = static_cast<unsigned>(rem / 3'600'000);
  const auto minute = static_cast<unsigned>(rem / 60'000 % 60);
  const auto second = static_cast<unsigned>(rem / 1'000 % 60);
  const auto millis = static_cast<unsigned>(rem % 1'000);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02u:%02u:%02u.%03uZ",
                static_cast<long long>(year), month, day, hour, minute, second,
                millis);
  return buf;
}

}  // namespace rulefoil
