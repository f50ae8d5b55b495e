#include "excessd/placebo.hpp"

#include <algorithm>
#include <cmath>

#include "excessd/parallel.hpp"
#include "excessd/rng.hpp"

namespace excessd {

namespace {

constexpr std::uint64_t kLoyoTag = 0x10010ull;
constexpr std::uint64_t kOneAheadTag = 0x1a3adull;
// Comparison errors below this fraction of the window's count scale are
// treated as numerically zero and yield a not-applicable ratio.
constexpr double kZeroErrorFraction = 1e-3;

PlaceboReport::YearError window_error(const PredictiveDistribution& pred,
                                      const MonthlySeries& observed, int year,
                                      const std::set<int>& window_months) {
    PlaceboReport::YearError ye;
    ye.year = year;
    double signed_sum = 0.0;
    double abs_sum = 0.0;
    for (int m : window_months) {
        YearMonth ym{year, m};
        double e = static_cast<double>(observed.at(ym)) - pred.mean_at(ym);
        signed_sum += e;
        abs_sum += std::abs(e);
    }
    ye.error = signed_sum;
    ye.abs_error = std::abs(signed_sum);
    ye.per_month_mean_abs = abs_sum / static_cast<double>(window_months.size());
    return ye;
}

void finish_ratios(PlaceboReport& report, double count_scale) {
    double target_abs = 0.0, target_pm = 0.0;
    double comp_abs = 0.0, comp_pm = 0.0;
    int n_comp = 0;
    bool have_target = false;
    for (const auto& ye : report.years) {
        if (ye.is_target) {
            target_abs = ye.abs_error;
            target_pm = ye.per_month_mean_abs;
            have_target = true;
        } else {
            comp_abs += ye.abs_error;
            comp_pm += ye.per_month_mean_abs;
            ++n_comp;
        }
    }
    if (!have_target || n_comp == 0) return;
    comp_abs /= n_comp;
    comp_pm /= n_comp;
    report.target_abs_error = target_abs;
    report.comparison_mean_abs_error = comp_abs;
    double floor = kZeroErrorFraction * std::max(count_scale, 1.0);
    if (comp_abs > floor)
        report.ratio = target_abs / comp_abs;
    if (comp_pm > floor)
        report.ratio_per_month = target_pm / comp_pm;
}

/// Mean observed count over the target window, the reference scale for
/// deciding that errors are numerically zero.
double window_count_scale(const MonthlySeries& series, int target_year,
                          const std::set<int>& window_months) {
    double acc = 0.0;
    for (int m : window_months)
        acc += static_cast<double>(series.at({target_year, m}));
    return acc / static_cast<double>(window_months.size());
}

void require_window_months(const std::set<int>& window_months) {
    if (window_months.empty()) throw UsageError("empty placebo window");
    for (int m : window_months) require_month(m);
}

} // namespace

PlaceboReport within_ui_placebo(const PredictiveDistribution& pred,
                                const MonthlySeries& observed,
                                const std::vector<YearMonth>& months) {
    PlaceboReport report;
    report.scheme = "within-ui";
    report.model = pred.model;
    report.seed = pred.seed;
    for (const auto& ym : months) {
        if (!pred.has(ym))
            throw DataError("missing predictions for placebo month " + ym.str());
        if (!observed.contains(ym))
            throw DataError("missing observation for placebo month " + ym.str());
        std::vector<double> col = pred.column(ym);
        PlaceboReport::MonthFlag flag;
        flag.ym = ym;
        flag.observed = static_cast<double>(observed.at(ym));
        flag.lo95 = quantile_type7(col, 0.025);
        flag.hi95 = quantile_type7(col, 0.975);
        flag.pred_mean = pred.mean_at(ym);
        if (flag.observed > flag.hi95) {
            flag.inside = false;
            flag.exceedance = flag.observed - flag.hi95;
        } else if (flag.observed < flag.lo95) {
            flag.inside = false;
            flag.exceedance = flag.observed - flag.lo95;
        }
        report.months.push_back(flag);
    }
    return report;
}

PlaceboReport run_within_ui(const MonthlySeries& series, const ModelSpec& spec,
                            const Prior& prior, const SamplerConfig& config, int target_year,
                            const std::vector<int>& check_months) {
    std::set<int> fit_years;
    for (int y : series.complete_years())
        if (y != target_year) fit_years.insert(y);
    FitResult fr = fit_on_years(series, fit_years, spec, prior, config);
    PredictiveDistribution pred = predict_years(fr.draws, series, {target_year});
    std::vector<YearMonth> months;
    for (int m : check_months) {
        require_month(m);
        months.push_back({target_year, m});
    }
    return within_ui_placebo(pred, series, months);
}

PlaceboReport leave_one_year_out(const MonthlySeries& series, const ModelSpec& spec,
                                 const std::set<int>& window_months, int target_year,
                                 const Prior& prior, const SamplerConfig& config) {
    require_window_months(window_months);
    std::vector<int> all_years = series.complete_years();
    std::vector<int> comparison;
    for (int y : all_years)
        if (y != target_year) comparison.push_back(y);
    if (comparison.size() < 4)
        throw DataError("leave-one-year-out needs at least 3 years besides any left-out year");
    for (int m : window_months)
        if (!series.contains({target_year, m}))
            throw DataError("target year lacks window month " +
                            YearMonth{target_year, m}.str());

    // Job 0 is the target year (fit on all comparison years, original seed);
    // job i>0 leaves comparison[i-1] out of that pool.
    std::size_t n_jobs = comparison.size() + 1;
    std::vector<PlaceboReport::YearError> errors(n_jobs);
    parallel_for(n_jobs, config.n_threads, [&](std::size_t j) {
        int year = j == 0 ? target_year : comparison[j - 1];
        std::set<int> fit_years(comparison.begin(), comparison.end());
        SamplerConfig cfg = config;
        if (j > 0) {
            fit_years.erase(year);
            cfg.seed = derive_seed(config.seed, kLoyoTag + static_cast<std::uint64_t>(year));
        }
        SamplerConfig inner = cfg;
        inner.n_threads = 1; // year-level jobs already run concurrently
        FitResult fr = fit_on_years(series, fit_years, spec, prior, inner);
        PredictiveDistribution pred = predict_years(fr.draws, series, {year});
        errors[j] = window_error(pred, series, year, window_months);
        errors[j].is_target = j == 0;
        errors[j].seed = inner.seed;
    });

    PlaceboReport report;
    report.scheme = "leave-one-year-out";
    report.model = model_label(spec.kind);
    report.seed = config.seed;
    report.years.assign(errors.begin(), errors.end());
    finish_ratios(report, window_count_scale(series, target_year, window_months));
    return report;
}

PlaceboReport one_year_ahead(const MonthlySeries& series, const ModelSpec& spec,
                             const std::set<int>& window_months, const Prior& prior,
                             const SamplerConfig& config, std::optional<int> target_year) {
    require_window_months(window_months);
    std::vector<int> all_years = series.complete_years();
    if (all_years.size() < 4)
        throw DataError("one-year-ahead needs at least 4 years of data");
    int start = all_years.front();
    int target = target_year.value_or(all_years.back());
    if (target - start < 2)
        throw DataError("one-year-ahead needs at least two years of history before " +
                        std::to_string(target));

    std::vector<int> predict_years_list;
    for (int y = start + 2; y <= target; ++y) {
        bool window_observed = true;
        for (int m : window_months)
            if (!series.contains({y, m})) window_observed = false;
        bool history_complete = true;
        for (int h = start; h < y; ++h)
            if (std::find(all_years.begin(), all_years.end(), h) == all_years.end())
                history_complete = false;
        if (window_observed && history_complete) predict_years_list.push_back(y);
    }
    if (predict_years_list.empty() || predict_years_list.back() != target)
        throw DataError("one-year-ahead: target year " + std::to_string(target) +
                        " is not predictable from the available history");
    if (predict_years_list.size() < 2)
        throw DataError("one-year-ahead has no comparison years");

    std::vector<PlaceboReport::YearError> errors(predict_years_list.size());
    parallel_for(predict_years_list.size(), config.n_threads, [&](std::size_t j) {
        int year = predict_years_list[j];
        std::set<int> fit_years;
        for (int h = start; h < year; ++h) fit_years.insert(h);
        SamplerConfig cfg = config;
        cfg.seed = derive_seed(config.seed, kOneAheadTag + static_cast<std::uint64_t>(year));
        cfg.n_threads = 1;
        FitResult fr = fit_on_years(series, fit_years, spec, prior, cfg);
        PredictiveDistribution pred = predict_years(fr.draws, series, {year});
        errors[j] = window_error(pred, series, year, window_months);
        errors[j].is_target = year == target;
        errors[j].seed = cfg.seed;
    });

    PlaceboReport report;
    report.scheme = "one-year-ahead";
    report.model = model_label(spec.kind);
    report.seed = config.seed;
    report.years.assign(errors.begin(), errors.end());
    finish_ratios(report, window_count_scale(series, target, window_months));
    return report;
}

ExcessEstimate exclude_and_reestimate(const MonthlySeries& series, const ModelSpec& spec,
                                      const YearMonth& excluded,
                                      const std::vector<YearMonth>& window,
                                      const Prior& prior, const SamplerConfig& config,
                                      int rounding_unit) {
    if (!series.contains(excluded))
        throw DataError("excluded point " + excluded.str() + " not in series");
    return run_excess_excluding(series, spec, prior, config, {excluded}, window, rounding_unit);
}

} // namespace excessd
