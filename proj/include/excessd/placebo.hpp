#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "excessd/pipeline.hpp"

namespace excessd {

/// Result of one placebo scheme.
///
/// Year-level errors aggregate over the requested window months: `error` is
/// the signed sum of (observed - predictive mean), `abs_error` its absolute
/// value (the quantity the headline ratio uses), and `per_month_mean_abs`
/// the mean of per-month absolute errors (reported alongside since the
/// aggregation convention matters when comparing magnitudes).
struct PlaceboReport {
    std::string scheme; // within-ui | leave-one-year-out | one-year-ahead | outlier-exclusion

    struct MonthFlag {
        YearMonth ym;
        bool inside = true;
        double exceedance = 0.0; // signed, 0 when inside the 95% interval
        double observed = 0.0;
        double lo95 = 0.0, hi95 = 0.0;
        double pred_mean = 0.0;
    };
    std::vector<MonthFlag> months;

    struct YearError {
        int year = 0;
        bool is_target = false;
        double error = 0.0;
        double abs_error = 0.0;
        double per_month_mean_abs = 0.0;
        std::uint64_t seed = 0;
    };
    std::vector<YearError> years;

    std::optional<double> target_abs_error;
    std::optional<double> comparison_mean_abs_error;
    std::optional<double> ratio;           // window-sum aggregation
    std::optional<double> ratio_per_month; // per-month mean-|error| aggregation

    std::string model;
    std::uint64_t seed = 0;
};

/// Flags each month as inside/outside its 95% predictive interval with the
/// signed exceedance beyond the nearer bound.
PlaceboReport within_ui_placebo(const PredictiveDistribution& pred,
                                const MonthlySeries& observed,
                                const std::vector<YearMonth>& months);

/// Full within-UI pipeline for one target year: fits on every other
/// complete year and checks the given months (default January..August).
PlaceboReport run_within_ui(const MonthlySeries& series, const ModelSpec& spec,
                            const Prior& prior, const SamplerConfig& config, int target_year,
                            const std::vector<int>& check_months = {1, 2, 3, 4, 5, 6, 7, 8});

/// For each comparison year Y, refits without Y (the target year is never
/// fitted) and predicts Y's window; the ratio compares the target year's
/// absolute window error against the comparison-year average.
PlaceboReport leave_one_year_out(const MonthlySeries& series, const ModelSpec& spec,
                                 const std::set<int>& window_months, int target_year,
                                 const Prior& prior, const SamplerConfig& config);

/// Sequential backcasts: fit on years [start..Y-1], predict year Y, for every
/// feasible Y (at least two years of history). The last feasible year is the
/// target unless given explicitly.
PlaceboReport one_year_ahead(const MonthlySeries& series, const ModelSpec& spec,
                             const std::set<int>& window_months, const Prior& prior,
                             const SamplerConfig& config,
                             std::optional<int> target_year = std::nullopt);

/// Outlier sensitivity: refit with one observation removed and re-estimate
/// the window. Uses the same seed as the unmodified fit so that an empty
/// exclusion reproduces it bit-identically.
ExcessEstimate exclude_and_reestimate(const MonthlySeries& series, const ModelSpec& spec,
                                      const YearMonth& excluded,
                                      const std::vector<YearMonth>& window,
                                      const Prior& prior, const SamplerConfig& config,
                                      int rounding_unit = 10);

} // namespace excessd
