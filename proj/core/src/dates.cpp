#include "wavecurve/dates.hpp"

#include <charconv>
#include <cstdio>

#include "wavecurve/error.hpp"

namespace wavecurve {

namespace {

int parse_field(std::string_view s, std::string_view whole) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("invalid ISO-8601 date '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Date parse_date(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
    throw InputError("invalid ISO-8601 date '" + std::string(iso) + "'");
  }
  using namespace std::chrono;
  const year_month_day ymd{year{parse_field(iso.substr(0, 4), iso)},
                           month{static_cast<unsigned>(parse_field(iso.substr(5, 2), iso))},
                           day{static_cast<unsigned>(parse_field(iso.substr(8, 2), iso))}};
  if (!ymd.ok()) throw InputError("invalid calendar date '" + std::string(iso) + "'");
  return sys_days{ymd};
}

std::string format_date(Date d) {
  using namespace std::chrono;
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

int day_of_year(Date d) {
  using namespace std::chrono;
  const year_month_day ymd{d};
  const sys_days jan1{ymd.year() / January / 1};
  return static_cast<int>((d - jan1).count()) + 1;
}

}  // namespace wavecurve
