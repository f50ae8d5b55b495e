#include "excessd/predict.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "excessd/kernels.hpp"
#include "excessd/rng.hpp"

namespace excessd {

namespace {

constexpr std::uint64_t kPredictTag = 0x9D1C7ull;

/// Per-draw parameter access by flat index, resolved once per prediction.
struct ParamIndex {
    std::size_t alpha = 0;
    std::array<long, 12> theta_by_month{}; // -1 when absent (baseline or model 1/4)
    long rho = -1;
    std::size_t sigma = 0;
    long beta_lag = -1, gamma_hurricane = -1, gamma_dry = -1;
};

ParamIndex resolve_params(const PosteriorDraws& draws) {
    ParamIndex idx;
    idx.theta_by_month.fill(-1);
    idx.alpha = draws.param_index("alpha");
    idx.sigma = draws.param_index("sigma");
    for (int m = 1; m <= 12; ++m) {
        std::string name = std::string("theta_") + month_name(m);
        if (draws.has_param(name))
            idx.theta_by_month[static_cast<std::size_t>(m - 1)] =
                static_cast<long>(draws.param_index(name));
    }
    if (draws.has_param("rho")) idx.rho = static_cast<long>(draws.param_index("rho"));
    if (draws.has_param("beta_lag")) idx.beta_lag = static_cast<long>(draws.param_index("beta_lag"));
    if (draws.has_param("gamma_hurricane"))
        idx.gamma_hurricane = static_cast<long>(draws.param_index("gamma_hurricane"));
    if (draws.has_param("gamma_dry")) idx.gamma_dry = static_cast<long>(draws.param_index("gamma_dry"));
    return idx;
}

} // namespace

std::size_t PredictiveDistribution::index_of(const YearMonth& ym) const {
    for (std::size_t k = 0; k < targets.size(); ++k)
        if (targets[k] == ym) return k;
    throw DataError("month " + ym.str() + " is not a prediction target");
}

bool PredictiveDistribution::has(const YearMonth& ym) const {
    return std::find(targets.begin(), targets.end(), ym) != targets.end();
}

double PredictiveDistribution::mean_at(const YearMonth& ym) const {
    std::size_t k = index_of(ym);
    double acc = 0.0;
    for (std::size_t d = 0; d < n_draws; ++d) acc += value(d, k);
    return acc / static_cast<double>(n_draws);
}

std::vector<double> PredictiveDistribution::column(const YearMonth& ym) const {
    std::size_t k = index_of(ym);
    std::vector<double> out(n_draws);
    for (std::size_t d = 0; d < n_draws; ++d) out[d] = value(d, k);
    return out;
}

double quantile_type7(std::vector<double> values, double p) {
    if (values.empty()) throw DataError("quantile of empty sample");
    std::sort(values.begin(), values.end());
    if (p <= 0.0) return values.front();
    if (p >= 1.0) return values.back();
    double h = (static_cast<double>(values.size()) - 1.0) * p;
    std::size_t i = static_cast<std::size_t>(h);
    double frac = h - static_cast<double>(i);
    if (i + 1 >= values.size()) return values.back();
    return values[i] + frac * (values[i + 1] - values[i]);
}

double round_to_unit(double x, int unit) {
    if (unit <= 1) return std::round(x);
    return static_cast<double>(std::llround(x / unit)) * unit;
}

PredictiveDistribution posterior_predict(const PosteriorDraws& draws, const ModelSpec& spec,
                                         std::vector<YearMonth> targets,
                                         const MonthlySeries& observed_context) {
    if (targets.empty()) throw UsageError("no prediction targets given");
    std::sort(targets.begin(), targets.end());
    for (std::size_t k = 1; k < targets.size(); ++k)
        if (targets[k] == targets[k - 1])
            throw UsageError("duplicate prediction target " + targets[k].str());
    if (spec.kind != draws.spec.kind || spec.baseline_month != draws.spec.baseline_month)
        throw UsageError("model spec does not match the supplied draws");

    const ParamIndex idx = resolve_params(draws);
    const bool ar1 = spec.has_ar1();
    const bool lagged = spec.has_lag();
    const std::size_t n_targets = targets.size();

    PredictiveDistribution pred;
    pred.targets = targets;
    pred.n_draws = draws.n_total();
    pred.draws.assign(pred.n_draws * n_targets, 0.0);
    pred.model = model_label(spec.kind);
    pred.fit_years = draws.fit_years();
    pred.seed = draws.config.seed;

    // Regression mean of a month given one draw's flat parameter row.
    auto mean_for = [&](const double* row, const YearMonth& ym, double lag_value) {
        double mu = row[idx.alpha];
        long th = idx.theta_by_month[static_cast<std::size_t>(ym.month - 1)];
        if (th >= 0) mu += row[static_cast<std::size_t>(th)];
        if (lagged) {
            mu += row[static_cast<std::size_t>(idx.beta_lag)] * lag_value;
            if (is_hurricane_season(ym.month))
                mu += row[static_cast<std::size_t>(idx.gamma_hurricane)];
            if (is_dry_season(ym.month))
                mu += row[static_cast<std::size_t>(idx.gamma_dry)];
        }
        return mu;
    };

    Rng rng(derive_seed(draws.config.seed, kPredictTag));
    const std::size_t n_params = draws.n_params();

    std::size_t flat_draw = 0;
    for (std::size_t c = 0; c < draws.n_chains(); ++c) {
        for (std::size_t d = 0; d < draws.n_retained_per_chain(); ++d, ++flat_draw) {
            const double* row = draws.chains[c].data() + d * n_params;
            double sigma = row[idx.sigma];
            double rho = ar1 ? row[static_cast<std::size_t>(idx.rho)] : 0.0;

            double prev_sim = 0.0;
            double prev_mu = 0.0;

            for (std::size_t k = 0; k < n_targets; ++k) {
                const YearMonth& t = targets[k];
                const YearMonth prev = t.prev();
                const bool follows_previous_target = k > 0 && targets[k - 1] == prev;

                double lag_value = 0.0;
                if (lagged) {
                    if (observed_context.contains(prev))
                        lag_value = static_cast<double>(observed_context.at(prev));
                    else if (follows_previous_target)
                        lag_value = prev_sim;
                    else
                        throw DataError("missing context: no observed count for " + prev.str() +
                                        " to lag " + t.str());
                }

                double mu = mean_for(row, t, lag_value);
                double z = rng.normal();
                double sim;
                if (!ar1) {
                    sim = mu + sigma * z;
                } else if (follows_previous_target) {
                    double eps_prev = observed_context.contains(prev)
                                          ? static_cast<double>(observed_context.at(prev)) - prev_mu
                                          : prev_sim - prev_mu;
                    sim = mu + rho * eps_prev + sigma * z;
                } else {
                    sim = mu + sigma / std::sqrt(1.0 - rho * rho) * z;
                }

                pred.draws[flat_draw * n_targets + k] = sim;
                prev_sim = sim;
                prev_mu = mu;
            }
        }
    }
    return pred;
}

ExcessEstimate excess(const PredictiveDistribution& pred, const MonthlySeries& observed,
                      const std::vector<YearMonth>& window, int rounding_unit) {
    if (window.empty()) throw UsageError("empty excess window");
    if (rounding_unit < 1) throw UsageError("rounding unit must be >= 1");
    for (const auto& ym : window) {
        if (!pred.has(ym))
            throw DataError("window month " + ym.str() + " has no predictions");
        if (!observed.contains(ym))
            throw DataError("window month " + ym.str() + " has no observation");
    }

    ExcessEstimate est;
    est.window = window;
    est.rounding_unit = rounding_unit;
    est.model = pred.model;
    est.fit_years = pred.fit_years;
    est.seed = pred.seed;

    std::vector<double> sums = excess_sum_draws(pred, observed, window);
    est.central_raw = kernels::sum(sums) / static_cast<double>(pred.n_draws);
    est.ui50_joint = {quantile_type7(sums, 0.25), quantile_type7(sums, 0.75)};
    est.ui95_joint = {quantile_type7(sums, 0.025), quantile_type7(sums, 0.975)};

    // Per-month equal-tailed intervals; window bounds are their sums.
    double lo50 = 0.0, hi50 = 0.0, lo95 = 0.0, hi95 = 0.0;
    for (const auto& ym : window) {
        std::size_t k = pred.index_of(ym);
        double obs = static_cast<double>(observed.at(ym));
        std::vector<double> diff(pred.n_draws);
        for (std::size_t d = 0; d < pred.n_draws; ++d)
            diff[d] = obs - pred.value(d, k);
        ExcessEstimate::MonthDetail md;
        md.ym = ym;
        md.central = kernels::sum(diff) / static_cast<double>(pred.n_draws);
        md.lo50 = quantile_type7(diff, 0.25);
        md.hi50 = quantile_type7(diff, 0.75);
        md.lo95 = quantile_type7(diff, 0.025);
        md.hi95 = quantile_type7(diff, 0.975);
        est.months.push_back(md);
        lo50 += md.lo50;
        hi50 += md.hi50;
        lo95 += md.lo95;
        hi95 += md.hi95;
    }
    est.ui50_raw = {lo50, hi50};
    est.ui95_raw = {lo95, hi95};

    est.central = round_to_unit(est.central_raw, rounding_unit);
    est.ui50 = {round_to_unit(lo50, rounding_unit), round_to_unit(hi50, rounding_unit)};
    est.ui95 = {round_to_unit(lo95, rounding_unit), round_to_unit(hi95, rounding_unit)};
    return est;
}

std::vector<double> excess_sum_draws(const PredictiveDistribution& pred,
                                     const MonthlySeries& observed,
                                     const std::vector<YearMonth>& window) {
    std::vector<double> sums(pred.n_draws, 0.0);
    for (const auto& ym : window) {
        std::size_t k = pred.index_of(ym);
        double obs = static_cast<double>(observed.at(ym));
        for (std::size_t d = 0; d < pred.n_draws; ++d)
            sums[d] += obs - pred.value(d, k);
    }
    return sums;
}

std::vector<double> prediction_errors(const PredictiveDistribution& pred,
                                      const MonthlySeries& observed,
                                      const std::vector<YearMonth>& months) {
    std::vector<double> out;
    out.reserve(months.size());
    for (const auto& ym : months) {
        if (!pred.has(ym))
            throw DataError("month " + ym.str() + " has no predictions");
        if (!observed.contains(ym))
            throw DataError("month " + ym.str() + " has no observation");
        out.push_back(static_cast<double>(observed.at(ym)) - pred.mean_at(ym));
    }
    return out;
}

} // namespace excessd
