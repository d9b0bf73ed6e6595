#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace wavecurve {

using Date = std::chrono::sys_days;

/// Parses YYYY-MM-DD. Throws InputError on malformed or invalid dates.
Date parse_date(std::string_view iso);
std::string format_date(Date d);
/// 1-based day of the year (1..366).
int day_of_year(Date d);
inline int days_between(Date from, Date to) { return static_cast<int>((to - from).count()); }

}  // namespace wavecurve
