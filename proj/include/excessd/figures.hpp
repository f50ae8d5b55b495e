#pragma once

#include <set>
#include <string>
#include <vector>

#include "excessd/dataset.hpp"
#include "excessd/modelcomp.hpp"
#include "excessd/placebo.hpp"

namespace excessd {

/// All figures return standalone SVG documents with the plotted values
/// embedded in a trailing comment block, so a figure can be audited without
/// re-running the pipeline.

/// Panel a: monthly tallies over time with guide lines at the baseline-years
/// sample mean and mean + 2 SD. Panel b: per-calendar-month scatter,
/// baseline years as open diamonds, the target year as solid dots.
std::string figure_raw_series(const MonthlySeries& series, const std::set<int>& baseline_years,
                              int target_year);

/// Standardized anomalies with a shaded band over `shaded` months.
std::string figure_standardized(const StandardizedSeries& z,
                                const std::vector<YearMonth>& shaded);

/// Panel a: observed vs fitted scatter with the 45-degree identity line.
/// Panel b: posterior densities of the month-offset parameters.
std::string figure_fit(const DesignMatrix& design, const std::vector<double>& fitted,
                       const PosteriorDraws& draws);

struct PredictionErrorPoint {
    YearMonth ym;
    double error = 0.0;
    bool target = false; // drawn solid; non-target years as open diamonds
};

/// Panel a: per-month prediction errors (target year solid, comparison
/// backcasts open). Panel b: 95% predictive intervals with observed dots.
std::string figure_prediction_errors(const std::vector<PredictionErrorPoint>& points,
                                     const std::vector<PlaceboReport::MonthFlag>& intervals);

/// Overlaid density curves of per-draw window-sum excess distributions,
/// one per labeled variant (solid first curve, dashed rest).
std::string figure_excess_distributions(
    const std::vector<std::pair<std::string, std::vector<double>>>& variants);

} // namespace excessd
