#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "excessd/errors.hpp"

namespace excessd {

/// A calendar month. `month` is 1-based (1 = January).
struct YearMonth {
    int year = 0;
    int month = 1;

    auto operator<=>(const YearMonth&) const = default;

    /// Linear month index, suitable for gap arithmetic.
    long index() const { return static_cast<long>(year) * 12 + (month - 1); }

    YearMonth next() const {
        return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
    }
    YearMonth prev() const {
        return month == 1 ? YearMonth{year - 1, 12} : YearMonth{year, month - 1};
    }

    std::string str() const;
};

/// Number of months from a to b (b.index() - a.index()).
inline long months_between(const YearMonth& a, const YearMonth& b) {
    return b.index() - a.index();
}

/// Three-letter lowercase month name, 1-based ("jan".."dec").
const char* month_name(int month);

/// Parses "YYYY-MM" into a YearMonth. Throws ParseError.
YearMonth parse_year_month(const std::string& s);

/// Inclusive month range "YYYY-MM:YYYY-MM" expanded to the full list.
std::vector<YearMonth> parse_month_window(const std::string& s);

/// Inclusive year range "YYYY:YYYY" (or single "YYYY") expanded to a list.
std::vector<int> parse_year_range(const std::string& s);

inline void require_month(int month) {
    if (month < 1 || month > 12)
        throw DataError("month out of range 1..12: " + std::to_string(month));
}

} // namespace excessd
