#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "excessd/hmc.hpp"

namespace excessd {

struct ParamSummary {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;
};

struct FitSummary {
    std::string model;
    std::vector<ParamSummary> params;
    double rmse = 0.0;
    std::optional<std::pair<double, double>> loo_ic; // value, standard error
    std::size_t n = 0;
    std::vector<std::string> warnings;
};

/// Posterior-mean fitted value per design row. For the AR(1) model the
/// fitted value includes the one-step error carry rho * (y_{t-1} - mu_{t-1})
/// whenever the previous row is calendar-adjacent; rows that open a segment
/// use the regression mean alone.
std::vector<double> posterior_mean_fitted(const PosteriorDraws& draws,
                                          const DesignMatrix& design);

/// Root mean squared error of the posterior-mean fitted values.
double rmse(const PosteriorDraws& draws, const DesignMatrix& design);

/// Exact leave-one-out information criterion: each time point is removed,
/// the model refit (seed derived per point), and the held-out log predictive
/// density evaluated, conditionally on the residuals of the held-out point's
/// calendar neighbors for the AR(1) model. Returns (-2 * sum lpd, se).
/// Refits whose R-hat exceeds 1.01 append a warning.
std::pair<double, double> loo_ic(const MonthlySeries& series, const ModelSpec& spec,
                                 const Prior& prior, const SamplerConfig& config,
                                 const std::set<YearMonth>* include = nullptr,
                                 std::vector<std::string>* warnings = nullptr);

FitSummary summarize_fit(const PosteriorDraws& draws, const DesignMatrix& design,
                         std::optional<std::pair<double, double>> loo = std::nullopt);

/// Plain-text table in the style of the model-comparison summaries.
std::string format_fit_table(const FitSummary& summary);

} // namespace excessd
