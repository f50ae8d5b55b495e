#include "excessd/figures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "excessd/svg.hpp"

namespace excessd {

namespace {

using svg::Canvas;
using svg::Frame;
using svg::Point;

const char* kPalette[] = {"#1b6ca8", "#b02e2e", "#2e8b57", "#8858c8", "#c87f1b",
                          "#3aa6a6", "#77216f", "#5e2750", "#2c4870", "#aa3939",
                          "#226666"};

struct Kde {
    std::vector<double> x, density;
};

Kde kde(const std::vector<double>& sample, int grid_points = 121) {
    Kde out;
    if (sample.empty()) return out;
    std::vector<double> sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    double n = static_cast<double>(sorted.size());
    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / std::max(n - 1.0, 1.0));
    double q25 = sorted[static_cast<std::size_t>(0.25 * (n - 1))];
    double q75 = sorted[static_cast<std::size_t>(0.75 * (n - 1))];
    double spread = std::min(sd, (q75 - q25) / 1.34);
    if (spread <= 0.0) spread = sd > 0.0 ? sd : 1.0;
    double bw = 0.9 * spread * std::pow(n, -0.2);
    if (bw <= 0.0) bw = 1.0;

    double lo = sorted.front() - 3.0 * bw;
    double hi = sorted.back() + 3.0 * bw;
    out.x.resize(static_cast<std::size_t>(grid_points));
    out.density.resize(static_cast<std::size_t>(grid_points));
    for (int g = 0; g < grid_points; ++g) {
        double xv = lo + (hi - lo) * g / (grid_points - 1);
        double acc = 0.0;
        for (double v : sorted) {
            double u = (xv - v) / bw;
            acc += std::exp(-0.5 * u * u);
        }
        out.x[static_cast<std::size_t>(g)] = xv;
        out.density[static_cast<std::size_t>(g)] =
            acc / (n * bw * std::sqrt(2.0 * 3.14159265358979323846));
    }
    return out;
}

std::vector<std::pair<double, std::string>> year_labels(const std::vector<YearMonth>& months) {
    std::vector<std::pair<double, std::string>> labels;
    for (std::size_t i = 0; i < months.size(); ++i)
        if (months[i].month == 1)
            labels.push_back({static_cast<double>(i), std::to_string(months[i].year)});
    return labels;
}

std::vector<std::pair<double, std::string>> month_axis_labels() {
    std::vector<std::pair<double, std::string>> labels;
    for (int m = 1; m <= 12; m += 2)
        labels.push_back({static_cast<double>(m), month_name(m)});
    return labels;
}

void pad_range(double& lo, double& hi, double frac = 0.06) {
    if (!(hi > lo)) {
        lo -= 1.0;
        hi += 1.0;
        return;
    }
    double pad = (hi - lo) * frac;
    lo -= pad;
    hi += pad;
}

} // namespace

std::string figure_raw_series(const MonthlySeries& series, const std::set<int>& baseline_years,
                              int target_year) {
    std::vector<double> baseline_values;
    for (const auto& e : series.entries())
        if (baseline_years.count(e.ym.year) > 0)
            baseline_values.push_back(static_cast<double>(e.count));
    if (baseline_values.empty())
        throw DataError("no baseline-year observations to plot");
    double n = static_cast<double>(baseline_values.size());
    double mean = 0.0;
    for (double v : baseline_values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : baseline_values) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / std::max(n - 1.0, 1.0));
    double guide = mean + 2.0 * sd;

    double ylo = 1e300, yhi = -1e300;
    for (const auto& e : series.entries()) {
        ylo = std::min(ylo, static_cast<double>(e.count));
        yhi = std::max(yhi, static_cast<double>(e.count));
    }
    yhi = std::max(yhi, guide);
    pad_range(ylo, yhi);

    Canvas canvas(920, 400);
    std::vector<YearMonth> months;
    for (const auto& e : series.entries()) months.push_back(e.ym);

    Frame a(canvas, 70, 45, 440, 290, 0.0, static_cast<double>(months.size() - 1), ylo, yhi);
    a.draw_axes("deaths per month", year_labels(months));
    std::vector<Point> pts;
    for (std::size_t i = 0; i < series.entries().size(); ++i)
        pts.push_back({a.px(static_cast<double>(i)),
                       a.py(static_cast<double>(series.entries()[i].count))});
    canvas.polyline(pts, "#1b6ca8", 1.3);
    canvas.line(a.left(), a.py(mean), a.right(), a.py(mean), "#444444", 1.0, "6,4");
    canvas.line(a.left(), a.py(guide), a.right(), a.py(guide), "#444444", 1.0, "2,3");
    canvas.text(a.right() - 4, a.py(mean) - 4, "mean", 9.0, "end");
    canvas.text(a.right() - 4, a.py(guide) - 4, "mean + 2 sd", 9.0, "end");

    Frame b(canvas, 600, 45, 280, 290, 0.5, 12.5, ylo, yhi);
    b.draw_axes("by calendar month", month_axis_labels());
    for (const auto& e : series.entries()) {
        double x = b.px(static_cast<double>(e.ym.month));
        double y = b.py(static_cast<double>(e.count));
        if (e.ym.year == target_year)
            canvas.circle(x, y, 3.0, "#b02e2e");
        else if (baseline_years.count(e.ym.year) > 0)
            canvas.diamond(x, y, 3.0, "#1b6ca8");
    }

    std::ostringstream data;
    data << "data: year,month,deaths\n";
    for (const auto& e : series.entries())
        data << e.ym.year << ',' << e.ym.month << ',' << e.count << '\n';
    data << "mean," << svg::fmt(mean) << "\nmean_plus_2sd," << svg::fmt(guide);
    canvas.comment(data.str());
    return canvas.finish();
}

std::string figure_standardized(const StandardizedSeries& z,
                                const std::vector<YearMonth>& shaded) {
    if (z.entries.empty()) throw DataError("empty standardized series");
    double ylo = 1e300, yhi = -1e300;
    for (const auto& e : z.entries) {
        ylo = std::min(ylo, e.z);
        yhi = std::max(yhi, e.z);
    }
    pad_range(ylo, yhi);

    Canvas canvas(920, 380);
    std::vector<YearMonth> months;
    for (const auto& e : z.entries) months.push_back(e.ym);
    Frame f(canvas, 70, 45, 800, 280, 0.0, static_cast<double>(months.size() - 1), ylo, yhi);

    if (!shaded.empty()) {
        auto pos = [&](const YearMonth& ym) {
            return static_cast<double>(months_between(months.front(), ym));
        };
        double x0 = f.px(pos(shaded.front()) - 0.5);
        double x1 = f.px(pos(shaded.back()) + 0.5);
        canvas.rect(x0, f.top(), x1 - x0, f.bottom() - f.top(), "#cccccc", 0.55);
    }
    f.draw_axes("standardized deaths", year_labels(months));
    canvas.line(f.left(), f.py(0.0), f.right(), f.py(0.0), "#888888", 1.0, "4,4");
    std::vector<Point> pts;
    for (std::size_t i = 0; i < z.entries.size(); ++i)
        pts.push_back({f.px(static_cast<double>(i)), f.py(z.entries[i].z)});
    canvas.polyline(pts, "#1b6ca8", 1.3);

    std::ostringstream data;
    data << "data: year,month,z\n";
    for (const auto& e : z.entries)
        data << e.ym.year << ',' << e.ym.month << ',' << svg::fmt(e.z) << '\n';
    canvas.comment(data.str());
    return canvas.finish();
}

std::string figure_fit(const DesignMatrix& design, const std::vector<double>& fitted,
                       const PosteriorDraws& draws) {
    if (fitted.size() != design.n_rows)
        throw UsageError("fitted values do not match the design");
    double lo = 1e300, hi = -1e300;
    for (std::size_t t = 0; t < design.n_rows; ++t) {
        lo = std::min({lo, design.y[t], fitted[t]});
        hi = std::max({hi, design.y[t], fitted[t]});
    }
    pad_range(lo, hi);

    Canvas canvas(920, 420);
    Frame a(canvas, 70, 45, 340, 320, lo, hi, lo, hi);
    a.draw_axes("observed vs fitted");
    canvas.line(a.px(lo), a.py(lo), a.px(hi), a.py(hi), "#444444", 1.0);
    for (std::size_t t = 0; t < design.n_rows; ++t)
        canvas.circle(a.px(design.y[t]), a.py(fitted[t]), 2.6, "#1b6ca8");

    // Month-offset posteriors.
    std::vector<std::size_t> theta_idx;
    for (std::size_t j = 0; j < draws.names.size(); ++j)
        if (draws.names[j].rfind("theta_", 0) == 0) theta_idx.push_back(j);

    std::ostringstream data;
    data << "data: observed,fitted\n";
    for (std::size_t t = 0; t < design.n_rows; ++t)
        data << svg::fmt(design.y[t]) << ',' << svg::fmt(fitted[t]) << '\n';

    if (!theta_idx.empty()) {
        std::vector<Kde> kdes;
        double xlo = 1e300, xhi = -1e300, dmax = 0.0;
        for (std::size_t j : theta_idx) {
            Kde k = kde(draws.flat(j));
            xlo = std::min(xlo, k.x.front());
            xhi = std::max(xhi, k.x.back());
            for (double d : k.density) dmax = std::max(dmax, d);
            kdes.push_back(std::move(k));
        }
        Frame b(canvas, 500, 45, 340, 320, xlo, xhi, 0.0, dmax * 1.08);
        b.draw_axes("month-offset posteriors");
        canvas.line(b.px(0.0), b.top(), b.px(0.0), b.bottom(), "#888888", 1.0, "4,4");
        for (std::size_t i = 0; i < kdes.size(); ++i) {
            std::vector<Point> pts;
            for (std::size_t g = 0; g < kdes[i].x.size(); ++g)
                pts.push_back({b.px(kdes[i].x[g]), b.py(kdes[i].density[g])});
            canvas.polyline(pts, kPalette[i % std::size(kPalette)], 1.2);
            canvas.text(850, 60 + 14.0 * static_cast<double>(i),
                        draws.names[theta_idx[i]], 9.0);
            canvas.line(844, 56 + 14.0 * static_cast<double>(i), 848,
                        56 + 14.0 * static_cast<double>(i),
                        kPalette[i % std::size(kPalette)], 2.0);
        }
        data << "posterior_mean:";
        for (std::size_t j : theta_idx)
            data << ' ' << draws.names[j] << '=' << svg::fmt(draws.mean(j));
    }
    canvas.comment(data.str());
    return canvas.finish();
}

std::string figure_prediction_errors(const std::vector<PredictionErrorPoint>& points,
                                     const std::vector<PlaceboReport::MonthFlag>& intervals) {
    if (points.empty()) throw DataError("no prediction errors to plot");
    double elo = 0.0, ehi = 0.0;
    for (const auto& p : points) {
        elo = std::min(elo, p.error);
        ehi = std::max(ehi, p.error);
    }
    pad_range(elo, ehi);

    Canvas canvas(920, 420);
    Frame a(canvas, 70, 45, 360, 320, 0.5, 12.5, elo, ehi);
    a.draw_axes("prediction errors by month", month_axis_labels());
    canvas.line(a.left(), a.py(0.0), a.right(), a.py(0.0), "#888888", 1.0, "4,4");
    for (const auto& p : points) {
        double x = a.px(static_cast<double>(p.ym.month));
        double y = a.py(p.error);
        if (p.target)
            canvas.circle(x, y, 3.2, "#b02e2e");
        else
            canvas.diamond(x, y, 2.8, "#1b6ca8");
    }

    std::ostringstream data;
    data << "data: year,month,error,target\n";
    for (const auto& p : points)
        data << p.ym.year << ',' << p.ym.month << ',' << svg::fmt(p.error) << ','
             << (p.target ? 1 : 0) << '\n';

    if (!intervals.empty()) {
        double ylo = 1e300, yhi = -1e300;
        for (const auto& f : intervals) {
            ylo = std::min({ylo, f.lo95, f.observed});
            yhi = std::max({yhi, f.hi95, f.observed});
        }
        pad_range(ylo, yhi);
        Frame b(canvas, 520, 45, 360, 320, 0.5, 12.5, ylo, yhi);
        b.draw_axes("95% predictive intervals", month_axis_labels());
        for (const auto& f : intervals) {
            double x = b.px(static_cast<double>(f.ym.month));
            canvas.line(x, b.py(f.lo95), x, b.py(f.hi95), "#1b6ca8", 2.2);
            canvas.circle(x, b.py(f.observed), 3.0, "#b02e2e");
        }
        data << "intervals: month,lo95,hi95,observed\n";
        for (const auto& f : intervals)
            data << f.ym.str() << ',' << svg::fmt(f.lo95) << ',' << svg::fmt(f.hi95) << ','
                 << svg::fmt(f.observed) << '\n';
    }
    canvas.comment(data.str());
    return canvas.finish();
}

std::string figure_excess_distributions(
    const std::vector<std::pair<std::string, std::vector<double>>>& variants) {
    if (variants.empty()) throw DataError("no excess distributions to plot");
    std::vector<Kde> kdes;
    double xlo = 1e300, xhi = -1e300, dmax = 0.0;
    for (const auto& [label, sums] : variants) {
        Kde k = kde(sums);
        xlo = std::min(xlo, k.x.front());
        xhi = std::max(xhi, k.x.back());
        for (double d : k.density) dmax = std::max(dmax, d);
        kdes.push_back(std::move(k));
    }

    Canvas canvas(920, 420);
    Frame f(canvas, 70, 45, 700, 320, xlo, xhi, 0.0, dmax * 1.08);
    f.draw_axes("excess-death distributions");
    for (std::size_t i = 0; i < kdes.size(); ++i) {
        std::vector<Point> pts;
        for (std::size_t g = 0; g < kdes[i].x.size(); ++g)
            pts.push_back({f.px(kdes[i].x[g]), f.py(kdes[i].density[g])});
        canvas.polyline(pts, i == 0 ? "black" : kPalette[i % std::size(kPalette)],
                        i == 0 ? 1.8 : 1.1, i == 0 ? "" : "5,3");
        canvas.text(800, 60 + 14.0 * static_cast<double>(i), variants[i].first, 9.0);
        canvas.line(790, 56 + 14.0 * static_cast<double>(i), 797,
                    56 + 14.0 * static_cast<double>(i),
                    i == 0 ? "black" : kPalette[i % std::size(kPalette)], 2.0);
    }

    std::ostringstream data;
    data << "data: variant,mean,q2.5,q97.5,n\n";
    for (const auto& [label, sums] : variants) {
        std::vector<double> sorted = sums;
        std::sort(sorted.begin(), sorted.end());
        double mean = 0.0;
        for (double v : sums) mean += v;
        mean /= static_cast<double>(sums.size());
        data << label << ',' << svg::fmt(mean) << ','
             << svg::fmt(sorted[static_cast<std::size_t>(0.025 * (sorted.size() - 1))]) << ','
             << svg::fmt(sorted[static_cast<std::size_t>(0.975 * (sorted.size() - 1))]) << ','
             << sums.size() << '\n';
    }
    canvas.comment(data.str());
    return canvas.finish();
}

} // namespace excessd
