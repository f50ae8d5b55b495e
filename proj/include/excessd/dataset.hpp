#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "excessd/types.hpp"

namespace excessd {

/// Contiguous monthly count series. Immutable after construction;
/// construction validates ordering, contiguity and count range.
class MonthlySeries {
public:
    struct Entry {
        YearMonth ym;
        long count = 0;
    };

    MonthlySeries() = default;
    MonthlySeries(std::vector<Entry> entries, std::string label);

    const std::vector<Entry>& entries() const { return entries_; }
    const std::string& label() const { return label_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    YearMonth first() const { return entries_.front().ym; }
    YearMonth last() const { return entries_.back().ym; }

    bool contains(const YearMonth& ym) const;
    /// Count at a month; throws DataError when absent.
    long at(const YearMonth& ym) const;

    /// Distinct years fully covered (all 12 months present).
    std::vector<int> complete_years() const;

private:
    std::vector<Entry> entries_;
    std::string label_;
};

/// Per-calendar-month mean and sample standard deviation over a year set.
struct MonthlyBaseline {
    struct Cell {
        double mu = 0.0;
        double sigma = 0.0;
        int n_years = 0;
    };
    std::array<Cell, 12> months{}; // index 0 = January

    const Cell& cell(int month) const {
        require_month(month);
        return months[static_cast<std::size_t>(month - 1)];
    }
};

/// (x - mu_m) / sigma_m anomalies aligned with the source series.
struct StandardizedSeries {
    struct Entry {
        YearMonth ym;
        double z = 0.0;
    };
    std::vector<Entry> entries;
};

/// Reads a `year,month,deaths` CSV (header required, LF rows).
MonthlySeries load_csv(const std::string& path);
MonthlySeries read_csv(std::istream& in, const std::string& label);

/// Writes the identical format; load_csv(write_csv(s)) == s.
void write_csv(const MonthlySeries& series, const std::string& path);
std::string to_csv(const MonthlySeries& series);

/// Per-month sample mean and SD (n-1 denominator) over exactly `years`.
/// Throws DataError if any requested (year, month) is missing.
MonthlyBaseline monthly_baseline(const MonthlySeries& series, const std::set<int>& years);

/// Throws DataError when sigma_m == 0 for any month present in the series.
StandardizedSeries standardize(const MonthlySeries& series, const MonthlyBaseline& baseline);

/// Generates one value per (year, month) whose per-month sample mean and SD
/// reproduce the baseline exactly before integer rounding; rounding uses a
/// largest-remainder adjustment so the rounded per-month sum (hence mean)
/// is preserved and no cell moves by more than one count.
///
/// The pre-rescaling draws follow a stationary AR(1) process over calendar
/// time with coefficient `serial_rho`, so the output carries realistic
/// month-to-month error correlation in addition to the matched moments.
MonthlySeries synthesize_moment_matched(const MonthlyBaseline& baseline,
                                        const std::set<int>& years,
                                        std::uint64_t seed,
                                        double serial_rho = 0.5);

/// Concatenates two series; b must start the month after a ends.
MonthlySeries concat(const MonthlySeries& a, const MonthlySeries& b);

/// Copy of the series with one month's count replaced.
MonthlySeries with_count(const MonthlySeries& series, const YearMonth& ym, long count);

/// Bundled demonstration data: seven-year reference moments for a monthly
/// death-count series and the observed tallies for the following year.
const MonthlyBaseline& demo_baseline();
const MonthlySeries& demo_observed_2017();

/// Moment-matched synthesis of the demo reference years (2010-16),
/// optionally extended with the bundled 2017 observations.
MonthlySeries demo_series(std::uint64_t seed, bool with_2017, double serial_rho = 0.5);

} // namespace excessd
