#pragma once

#include <set>
#include <vector>

#include "excessd/predict.hpp"

namespace excessd {

struct FitResult {
    PosteriorDraws draws;
    DesignMatrix design;
};

/// Fits a model on all months of `fit_years`, minus any explicitly excluded
/// observations. Excluded points split the AR(1) chain: the segment after a
/// gap restarts from the stationary marginal.
FitResult fit_on_years(const MonthlySeries& series, const std::set<int>& fit_years,
                       const ModelSpec& spec, const Prior& prior, const SamplerConfig& config,
                       const std::set<YearMonth>& exclude = {});

/// Predicts every month (January..December) of each year as one chained
/// run in calendar order.
PredictiveDistribution predict_years(const PosteriorDraws& draws, const MonthlySeries& context,
                                     const std::set<int>& years);

/// Excess over `window` from an existing fit. Predicts the window's years in
/// full so AR(1) predictions chain through the observed pre-window months.
/// Refuses windows that overlap the fitting years (leakage guard).
ExcessEstimate run_excess(const MonthlySeries& series, const PosteriorDraws& draws,
                          const std::vector<YearMonth>& window, int rounding_unit = 10);

/// Fit-and-estimate in one step, optionally excluding observations from the
/// fit (outlier sensitivity). Fit years default to every complete year not
/// touched by the window.
ExcessEstimate run_excess_excluding(const MonthlySeries& series, const ModelSpec& spec,
                                    const Prior& prior, const SamplerConfig& config,
                                    const std::set<YearMonth>& exclude,
                                    const std::vector<YearMonth>& window,
                                    int rounding_unit = 10);

/// Complete years of the series that do not intersect the window's years.
std::set<int> default_fit_years(const MonthlySeries& series,
                                const std::vector<YearMonth>& window);

} // namespace excessd
