#include "excessd/pipeline.hpp"

#include <algorithm>

namespace excessd {

FitResult fit_on_years(const MonthlySeries& series, const std::set<int>& fit_years,
                       const ModelSpec& spec, const Prior& prior, const SamplerConfig& config,
                       const std::set<YearMonth>& exclude) {
    if (fit_years.empty()) throw DataError("no fitting years");
    std::set<YearMonth> include = months_of_years(series, fit_years);
    for (const auto& ym : exclude) {
        if (!series.contains(ym))
            throw DataError("excluded point " + ym.str() + " not in series");
        include.erase(ym);
    }
    FitResult fr;
    fr.design = build_design(series, spec, &include);
    fr.draws = sample_hmc(fr.design, prior, spec, config);
    return fr;
}

PredictiveDistribution predict_years(const PosteriorDraws& draws, const MonthlySeries& context,
                                     const std::set<int>& years) {
    std::vector<YearMonth> targets;
    for (int y : years)
        for (int m = 1; m <= 12; ++m) targets.push_back({y, m});
    return posterior_predict(draws, draws.spec, std::move(targets), context);
}

ExcessEstimate run_excess(const MonthlySeries& series, const PosteriorDraws& draws,
                          const std::vector<YearMonth>& window, int rounding_unit) {
    std::set<int> fit_years = draws.fit_years();
    std::set<int> window_years;
    for (const auto& ym : window) {
        if (fit_years.count(ym.year) > 0)
            throw DataError("excess window overlaps fitting years: " + ym.str() +
                            " was used to fit the model");
        window_years.insert(ym.year);
    }
    PredictiveDistribution pred = predict_years(draws, series, window_years);
    return excess(pred, series, window, rounding_unit);
}

ExcessEstimate run_excess_excluding(const MonthlySeries& series, const ModelSpec& spec,
                                    const Prior& prior, const SamplerConfig& config,
                                    const std::set<YearMonth>& exclude,
                                    const std::vector<YearMonth>& window,
                                    int rounding_unit) {
    std::set<int> fit_years = default_fit_years(series, window);
    FitResult fr = fit_on_years(series, fit_years, spec, prior, config, exclude);
    return run_excess(series, fr.draws, window, rounding_unit);
}

std::set<int> default_fit_years(const MonthlySeries& series,
                                const std::vector<YearMonth>& window) {
    std::set<int> window_years;
    for (const auto& ym : window) window_years.insert(ym.year);
    std::set<int> out;
    for (int y : series.complete_years())
        if (window_years.count(y) == 0) out.insert(y);
    if (out.empty())
        throw DataError("no complete fitting years outside the window");
    return out;
}

} // namespace excessd
