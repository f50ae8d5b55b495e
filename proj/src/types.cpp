#include "excessd/types.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace excessd {

namespace {

constexpr std::array<const char*, 12> kMonthNames = {
    "jan", "feb", "mar", "apr", "may", "jun",
    "jul", "aug", "sep", "oct", "nov", "dec"};

int parse_int(std::string_view s, const char* what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError(std::string("invalid ") + what + ": '" + std::string(s) + "'");
    return value;
}

} // namespace

std::string YearMonth::str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
    return buf;
}

const char* month_name(int month) {
    require_month(month);
    return kMonthNames[static_cast<std::size_t>(month - 1)];
}

YearMonth parse_year_month(const std::string& s) {
    auto dash = s.find('-');
    if (dash == std::string::npos)
        throw ParseError("expected YYYY-MM, got '" + s + "'");
    YearMonth ym;
    ym.year = parse_int(std::string_view(s).substr(0, dash), "year");
    ym.month = parse_int(std::string_view(s).substr(dash + 1), "month");
    if (ym.month < 1 || ym.month > 12)
        throw ParseError("month out of range in '" + s + "'");
    return ym;
}

std::vector<YearMonth> parse_month_window(const std::string& s) {
    auto colon = s.find(':');
    YearMonth first, last;
    if (colon == std::string::npos) {
        first = last = parse_year_month(s);
    } else {
        first = parse_year_month(s.substr(0, colon));
        last = parse_year_month(s.substr(colon + 1));
    }
    if (last < first)
        throw ParseError("window end precedes start in '" + s + "'");
    std::vector<YearMonth> months;
    for (YearMonth m = first; m <= last; m = m.next()) months.push_back(m);
    return months;
}

std::vector<int> parse_year_range(const std::string& s) {
    auto colon = s.find(':');
    int first, last;
    if (colon == std::string::npos) {
        first = last = parse_int(s, "year");
    } else {
        first = parse_int(std::string_view(s).substr(0, colon), "year");
        last = parse_int(std::string_view(s).substr(colon + 1), "year");
    }
    if (last < first)
        throw ParseError("year range end precedes start in '" + s + "'");
    std::vector<int> years;
    for (int y = first; y <= last; ++y) years.push_back(y);
    return years;
}

} // namespace excessd
