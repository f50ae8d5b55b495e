#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "excessd/hmc.hpp"

namespace excessd {

/// Simulated tallies for each target month, one per retained posterior
/// draw. Values stay real-valued; no discretization to integer counts.
struct PredictiveDistribution {
    std::vector<YearMonth> targets;
    std::size_t n_draws = 0;
    std::vector<double> draws; // n_draws x targets.size(), row-major by draw
    std::string model;
    std::set<int> fit_years;
    std::uint64_t seed = 0;

    double value(std::size_t draw, std::size_t target) const {
        return draws[draw * targets.size() + target];
    }
    std::size_t index_of(const YearMonth& ym) const;
    bool has(const YearMonth& ym) const;
    double mean_at(const YearMonth& ym) const;
    std::vector<double> column(const YearMonth& ym) const;
};

/// Linear-interpolation (type 7) quantile; `values` is copied and sorted.
double quantile_type7(std::vector<double> values, double p);

/// Simulates tallies for `targets` (strictly increasing months) from every
/// retained draw. The mean is alpha + theta_m (plus lag and season terms for
/// the dynamic model); the noise is i.i.d. N(0, sigma) except for the AR(1)
/// model. There, a target whose predecessor month is an earlier target uses
/// the conditional N(rho * eps_prev, sigma), with eps_prev taken from the
/// observed tally when the context contains it and from the simulated value
/// otherwise; any other target starts fresh from the stationary marginal
/// N(0, sigma / sqrt(1 - rho^2)).
///
/// The lagged model takes its lag from the context when the predecessor is
/// observed, from the chained simulated value when the predecessor is an
/// earlier target, and fails with a missing-context error otherwise.
PredictiveDistribution posterior_predict(const PosteriorDraws& draws, const ModelSpec& spec,
                                         std::vector<YearMonth> targets,
                                         const MonthlySeries& observed_context);

/// Excess estimate over a month window: the central estimate is the mean of
/// the per-draw window sum of (observed - predicted); the displayed 50% and
/// 95% uncertainty intervals sum the per-month equal-tailed quantile bounds
/// across the window. The joint quantiles of the per-draw window-sum
/// distribution are retained alongside. Displayed values are rounded to
/// multiples of rounding_unit (nearest, half away from zero).
struct ExcessEstimate {
    std::vector<YearMonth> window;
    int rounding_unit = 10;

    double central = 0.0; // rounded for display
    std::pair<double, double> ui50{0, 0};
    std::pair<double, double> ui95{0, 0};

    double central_raw = 0.0;
    std::pair<double, double> ui50_raw{0, 0};
    std::pair<double, double> ui95_raw{0, 0};

    std::pair<double, double> ui50_joint{0, 0}; // per-draw window-sum quantiles
    std::pair<double, double> ui95_joint{0, 0};

    struct MonthDetail {
        YearMonth ym;
        double central = 0.0;
        double lo50 = 0.0, hi50 = 0.0;
        double lo95 = 0.0, hi95 = 0.0;
    };
    std::vector<MonthDetail> months;

    std::string model;
    std::set<int> fit_years;
    std::uint64_t seed = 0;
};

ExcessEstimate excess(const PredictiveDistribution& pred, const MonthlySeries& observed,
                      const std::vector<YearMonth>& window, int rounding_unit = 10);

/// observed - posterior-predictive mean, per month, unrounded.
std::vector<double> prediction_errors(const PredictiveDistribution& pred,
                                      const MonthlySeries& observed,
                                      const std::vector<YearMonth>& months);

/// Per-draw window sums of (observed - predicted); the sample behind an
/// excess estimate's central value and joint intervals.
std::vector<double> excess_sum_draws(const PredictiveDistribution& pred,
                                     const MonthlySeries& observed,
                                     const std::vector<YearMonth>& window);

double round_to_unit(double x, int unit);

} // namespace excessd
