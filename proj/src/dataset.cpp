#include "excessd/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "excessd/rng.hpp"

namespace excessd {

MonthlySeries::MonthlySeries(std::vector<Entry> entries, std::string label)
    : entries_(std::move(entries)), label_(std::move(label)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const Entry& e = entries_[i];
        require_month(e.ym.month);
        if (e.count < 0)
            throw DataError("negative count at " + e.ym.str());
        if (i > 0) {
            long step = months_between(entries_[i - 1].ym, e.ym);
            if (step == 0)
                throw DataError("duplicate month " + e.ym.str());
            if (step < 0)
                throw DataError("entries not ordered at " + e.ym.str());
            if (step > 1)
                throw DataError("gap before " + e.ym.str() + " (missing " +
                                entries_[i - 1].ym.next().str() + ")");
        }
    }
}

bool MonthlySeries::contains(const YearMonth& ym) const {
    if (entries_.empty()) return false;
    long off = months_between(entries_.front().ym, ym);
    return off >= 0 && off < static_cast<long>(entries_.size());
}

long MonthlySeries::at(const YearMonth& ym) const {
    if (!contains(ym))
        throw DataError("month " + ym.str() + " not in series '" + label_ + "'");
    long off = months_between(entries_.front().ym, ym);
    return entries_[static_cast<std::size_t>(off)].count;
}

std::vector<int> MonthlySeries::complete_years() const {
    std::vector<int> out;
    if (entries_.empty()) return out;
    for (int y = entries_.front().ym.year; y <= entries_.back().ym.year; ++y) {
        if (contains({y, 1}) && contains({y, 12})) out.push_back(y);
    }
    return out;
}

namespace {

constexpr const char* kCsvHeader = "year,month,deaths";

long parse_csv_long(const std::string& field, std::size_t line_no, const char* what) {
    if (field.empty())
        throw ParseError("line " + std::to_string(line_no) + ": empty " + what + " field");
    std::size_t pos = 0;
    long value = 0;
    try {
        value = std::stol(field, &pos);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" + field + "'");
    }
    if (pos != field.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" + field + "'");
    return value;
}

} // namespace

MonthlySeries read_csv(std::istream& in, const std::string& label) {
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("empty csv input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw ParseError("expected header '" + std::string(kCsvHeader) + "', got '" + line + "'");

    std::vector<MonthlySeries::Entry> entries;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto c1 = line.find(',');
        auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected year,month,deaths");
        long year = parse_csv_long(line.substr(0, c1), line_no, "year");
        long month = parse_csv_long(line.substr(c1 + 1, c2 - c1 - 1), line_no, "month");
        long deaths = parse_csv_long(line.substr(c2 + 1), line_no, "deaths");
        if (month < 1 || month > 12)
            throw DataError("line " + std::to_string(line_no) + ": month out of range 1..12");
        if (deaths < 0)
            throw DataError("line " + std::to_string(line_no) + ": negative deaths");
        entries.push_back({{static_cast<int>(year), static_cast<int>(month)}, deaths});
    }
    if (entries.empty())
        throw ParseError("csv has a header but no rows");
    return MonthlySeries(std::move(entries), label);
}

MonthlySeries load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open csv file: " + path);
    return read_csv(in, path);
}

std::string to_csv(const MonthlySeries& series) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const auto& e : series.entries())
        out << e.ym.year << ',' << e.ym.month << ',' << e.count << '\n';
    return out.str();
}

void write_csv(const MonthlySeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot open file for writing: " + path);
    out << to_csv(series);
}

MonthlyBaseline monthly_baseline(const MonthlySeries& series, const std::set<int>& years) {
    if (years.empty())
        throw DataError("baseline year set is empty");
    MonthlyBaseline baseline;
    for (int m = 1; m <= 12; ++m) {
        std::vector<double> values;
        values.reserve(years.size());
        for (int y : years) {
            if (!series.contains({y, m}))
                throw DataError("baseline year " + std::to_string(y) + " missing month " +
                                YearMonth{y, m}.str());
            values.push_back(static_cast<double>(series.at({y, m})));
        }
        double n = static_cast<double>(values.size());
        double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        baseline.months[static_cast<std::size_t>(m - 1)] = {mean, sd, static_cast<int>(values.size())};
    }
    return baseline;
}

StandardizedSeries standardize(const MonthlySeries& series, const MonthlyBaseline& baseline) {
    StandardizedSeries out;
    out.entries.reserve(series.size());
    for (const auto& e : series.entries()) {
        const auto& cell = baseline.cell(e.ym.month);
        if (cell.sigma <= 0.0)
            throw DataError("zero baseline sigma for month " + std::string(month_name(e.ym.month)));
        out.entries.push_back({e.ym, (static_cast<double>(e.count) - cell.mu) / cell.sigma});
    }
    return out;
}

namespace {

/// Rounds values to integers so that the sum equals llround(sum(values))
/// and every cell moves by less than one (largest-remainder method).
std::vector<long> round_preserving_sum(const std::vector<double>& values) {
    const std::size_t n = values.size();
    long target = std::llround(std::accumulate(values.begin(), values.end(), 0.0));
    std::vector<long> floors(n);
    std::vector<std::pair<double, std::size_t>> remainders(n);
    long floor_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = std::floor(values[i]);
        floors[i] = static_cast<long>(f);
        floor_sum += floors[i];
        remainders[i] = {values[i] - f, i};
    }
    long need = target - floor_sum;
    if (need < 0) need = 0;
    if (need > static_cast<long>(n)) need = static_cast<long>(n);
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (long k = 0; k < need; ++k) floors[remainders[static_cast<std::size_t>(k)].second] += 1;
    return floors;
}

} // namespace

MonthlySeries synthesize_moment_matched(const MonthlyBaseline& baseline,
                                        const std::set<int>& years,
                                        std::uint64_t seed,
                                        double serial_rho) {
    if (years.size() < 2)
        throw DataError("synthesis needs at least two years");
    if (!(serial_rho > -1.0 && serial_rho < 1.0))
        throw DataError("serial correlation must lie in (-1, 1)");
    std::vector<int> year_list(years.begin(), years.end());
    for (std::size_t i = 1; i < year_list.size(); ++i)
        if (year_list[i] != year_list[i - 1] + 1)
            throw DataError("synthesis years must be consecutive");

    const std::size_t n_years = year_list.size();
    const std::size_t n_total = n_years * 12;

    // Stationary AR(1) base draws in calendar order.
    Rng rng(derive_seed(seed, 0x53594e54ull)); // "SYNT"
    std::vector<double> base(n_total);
    double innov_sd = std::sqrt(1.0 - serial_rho * serial_rho);
    base[0] = rng.normal();
    for (std::size_t t = 1; t < n_total; ++t)
        base[t] = serial_rho * base[t - 1] + innov_sd * rng.normal();

    std::vector<MonthlySeries::Entry> entries(n_total);
    for (int m = 1; m <= 12; ++m) {
        const auto& cell = baseline.cell(m);
        std::vector<double> cell_draws(n_years);
        for (std::size_t j = 0; j < n_years; ++j)
            cell_draws[j] = base[j * 12 + static_cast<std::size_t>(m - 1)];

        double n = static_cast<double>(n_years);
        double mean = std::accumulate(cell_draws.begin(), cell_draws.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : cell_draws) ss += (v - mean) * (v - mean);
        double sd = std::sqrt(ss / (n - 1.0));
        if (!(sd > 0.0))
            throw DataError("degenerate draws in synthesis (zero spread)");

        std::vector<double> values(n_years);
        for (std::size_t j = 0; j < n_years; ++j)
            values[j] = cell.mu + cell.sigma * (cell_draws[j] - mean) / sd;
        std::vector<long> rounded = round_preserving_sum(values);
        for (std::size_t j = 0; j < n_years; ++j) {
            long v = rounded[j] < 0 ? 0 : rounded[j];
            entries[j * 12 + static_cast<std::size_t>(m - 1)] = {{year_list[j], m}, v};
        }
    }
    return MonthlySeries(std::move(entries), "synthetic-" + std::to_string(seed));
}

MonthlySeries concat(const MonthlySeries& a, const MonthlySeries& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    std::vector<MonthlySeries::Entry> entries = a.entries();
    entries.insert(entries.end(), b.entries().begin(), b.entries().end());
    return MonthlySeries(std::move(entries), a.label());
}

MonthlySeries with_count(const MonthlySeries& series, const YearMonth& ym, long count) {
    if (!series.contains(ym))
        throw DataError("month " + ym.str() + " not in series");
    std::vector<MonthlySeries::Entry> entries = series.entries();
    for (auto& e : entries)
        if (e.ym == ym) e.count = count;
    return MonthlySeries(std::move(entries), series.label());
}

const MonthlyBaseline& demo_baseline() {
    static const MonthlyBaseline baseline = [] {
        MonthlyBaseline b;
        const double mu[12] = {2592, 2358, 2539, 2336, 2388, 2362,
                               2431, 2448, 2373, 2477, 2414, 2664};
        const double sigma[12] = {132, 127, 138, 97, 69, 137, 39, 101, 94, 179, 139, 152};
        for (int m = 0; m < 12; ++m)
            b.months[static_cast<std::size_t>(m)] = {mu[m], sigma[m], 7};
        return b;
    }();
    return baseline;
}

const MonthlySeries& demo_observed_2017() {
    static const MonthlySeries series = [] {
        const long counts[12] = {2894, 2315, 2494, 2392, 2390, 2369,
                                 2367, 2321, 2928, 3040, 2671, 2820};
        std::vector<MonthlySeries::Entry> entries;
        for (int m = 1; m <= 12; ++m)
            entries.push_back({{2017, m}, counts[m - 1]});
        return MonthlySeries(std::move(entries), "demo-2017");
    }();
    return series;
}

MonthlySeries demo_series(std::uint64_t seed, bool with_2017, double serial_rho) {
    std::set<int> years;
    for (int y = 2010; y <= 2016; ++y) years.insert(y);
    MonthlySeries base = synthesize_moment_matched(demo_baseline(), years, seed, serial_rho);
    if (!with_2017) return base;
    return concat(base, demo_observed_2017());
}

} // namespace excessd
