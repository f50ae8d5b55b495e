#include "excessd/modelcomp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "excessd/kernels.hpp"
#include "excessd/parallel.hpp"
#include "excessd/rng.hpp"

namespace excessd {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr std::uint64_t kLooTag = 0x100A11ull;

double log_normal_pdf(double x, double mean, double var) {
    double d = x - mean;
    return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

double log_mean_exp(const std::vector<double>& v) {
    double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - m);
    return m + std::log(acc / static_cast<double>(v.size()));
}

DesignMatrix drop_row(const DesignMatrix& d, std::size_t row) {
    DesignMatrix out;
    out.n_cols = d.n_cols;
    out.column_names = d.column_names;
    out.column_kinds = d.column_kinds;
    out.n_rows = d.n_rows - 1;
    out.y.reserve(out.n_rows);
    out.x.reserve(out.n_rows * out.n_cols);
    out.time_index.reserve(out.n_rows);
    for (std::size_t t = 0; t < d.n_rows; ++t) {
        if (t == row) continue;
        out.y.push_back(d.y[t]);
        out.time_index.push_back(d.time_index[t]);
        auto r = d.row(t);
        out.x.insert(out.x.end(), r.begin(), r.end());
    }
    return out;
}

} // namespace

std::vector<double> posterior_mean_fitted(const PosteriorDraws& draws,
                                          const DesignMatrix& design) {
    const std::size_t n = design.n_rows;
    const std::size_t p = design.n_cols;
    if (draws.names.size() < p + 1)
        throw UsageError("draws do not match the design's coefficient count");
    const bool ar1 = draws.spec.has_ar1();
    const long rho_idx = ar1 ? static_cast<long>(draws.param_index("rho")) : -1;

    // Rows that continue a calendar-contiguous segment may carry the
    // one-step AR(1) error term.
    std::vector<bool> has_prev(n, false);
    for (std::size_t t = 1; t < n; ++t)
        has_prev[t] = months_between(design.time_index[t - 1], design.time_index[t]) == 1;

    std::vector<double> fitted(n, 0.0);
    std::vector<double> mu(n);
    const std::size_t n_params = draws.n_params();
    for (std::size_t c = 0; c < draws.n_chains(); ++c) {
        for (std::size_t d = 0; d < draws.n_retained_per_chain(); ++d) {
            const double* row = draws.chains[c].data() + d * n_params;
            std::span<const double> coef(row, p);
            for (std::size_t t = 0; t < n; ++t)
                mu[t] = kernels::dot(design.row(t), coef);
            if (ar1) {
                double rho = row[rho_idx];
                for (std::size_t t = n; t-- > 0;) {
                    double f = mu[t];
                    if (has_prev[t]) f += rho * (design.y[t - 1] - mu[t - 1]);
                    fitted[t] += f;
                }
            } else {
                kernels::axpy(1.0, mu, fitted);
            }
        }
    }
    double inv = 1.0 / static_cast<double>(draws.n_total());
    for (double& f : fitted) f *= inv;
    return fitted;
}

double rmse(const PosteriorDraws& draws, const DesignMatrix& design) {
    std::vector<double> fitted = posterior_mean_fitted(draws, design);
    double ss = 0.0;
    for (std::size_t t = 0; t < design.n_rows; ++t) {
        double e = design.y[t] - fitted[t];
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(design.n_rows));
}

std::pair<double, double> loo_ic(const MonthlySeries& series, const ModelSpec& spec,
                                 const Prior& prior, const SamplerConfig& config,
                                 const std::set<YearMonth>* include,
                                 std::vector<std::string>* warnings) {
    DesignMatrix full = build_design(series, spec, include);
    const std::size_t n = full.n_rows;
    const std::size_t p = full.n_cols;
    const bool ar1 = spec.has_ar1();

    std::vector<double> lpd(n, 0.0);
    std::vector<int> bad_refits(n, 0);

    parallel_for(n, config.n_threads, [&](std::size_t t) {
        DesignMatrix reduced = drop_row(full, t);
        SamplerConfig cfg = config;
        cfg.seed = derive_seed(config.seed, kLooTag + t);
        cfg.n_threads = 1;
        PosteriorDraws refit = sample_hmc(reduced, prior, spec, cfg);
        for (double r : refit.diagnostics.rhat)
            if (r > 1.01) bad_refits[t] = 1;

        const double y_held = full.y[t];
        std::span<const double> x_held = full.row(t);

        // Calendar neighbors of the held-out point within the full design.
        long left = -1, right = -1;
        if (ar1) {
            if (t > 0 && months_between(full.time_index[t - 1], full.time_index[t]) == 1)
                left = static_cast<long>(t) - 1;
            if (t + 1 < n && months_between(full.time_index[t], full.time_index[t + 1]) == 1)
                right = static_cast<long>(t) + 1;
        }

        const std::size_t n_params = refit.n_params();
        const long rho_idx = ar1 ? static_cast<long>(refit.param_index("rho")) : -1;
        std::vector<double> logs;
        logs.reserve(refit.n_total());
        for (std::size_t c = 0; c < refit.n_chains(); ++c) {
            for (std::size_t d = 0; d < refit.n_retained_per_chain(); ++d) {
                const double* row = refit.chains[c].data() + d * n_params;
                std::span<const double> coef(row, p);
                double sigma = row[n_params - 1];
                double mu = kernels::dot(x_held, coef);
                double mean = mu, var = sigma * sigma;
                if (ar1) {
                    double rho = row[rho_idx];
                    auto resid = [&](long j) {
                        return full.y[static_cast<std::size_t>(j)] -
                               kernels::dot(full.row(static_cast<std::size_t>(j)), coef);
                    };
                    if (left >= 0 && right >= 0) {
                        double denom = 1.0 + rho * rho;
                        mean = mu + rho * (resid(left) + resid(right)) / denom;
                        var = sigma * sigma / denom;
                    } else if (left >= 0) {
                        mean = mu + rho * resid(left);
                    } else if (right >= 0) {
                        mean = mu + rho * resid(right);
                    } else {
                        var = sigma * sigma / (1.0 - rho * rho);
                    }
                }
                logs.push_back(log_normal_pdf(y_held, mean, var));
            }
        }
        lpd[t] = log_mean_exp(logs);
    });

    double total = 0.0;
    for (double v : lpd) total += v;
    double value = -2.0 * total;

    double mean_dev = value / static_cast<double>(n);
    double ss = 0.0;
    for (double v : lpd) {
        double d = -2.0 * v - mean_dev;
        ss += d * d;
    }
    double se = std::sqrt(static_cast<double>(n) * ss / (static_cast<double>(n) - 1.0));

    int n_bad = 0;
    for (int b : bad_refits) n_bad += b;
    if (n_bad > 0 && warnings != nullptr)
        warnings->push_back(std::to_string(n_bad) + " of " + std::to_string(n) +
                            " leave-one-out refits exceeded R-hat 1.01");
    return {value, se};
}

FitSummary summarize_fit(const PosteriorDraws& draws, const DesignMatrix& design,
                         std::optional<std::pair<double, double>> loo) {
    FitSummary s;
    s.model = model_label(draws.spec.kind);
    s.n = design.n_rows;
    s.rmse = rmse(draws, design);
    s.loo_ic = loo;
    for (std::size_t j = 0; j < draws.n_params(); ++j)
        s.params.push_back({draws.names[j], draws.mean(j), draws.sd(j)});
    s.warnings = draws.diagnostics.warnings;
    return s;
}

std::string format_fit_table(const FitSummary& summary) {
    std::ostringstream out;
    char buf[128];
    out << "model: " << summary.model << "\n";
    std::snprintf(buf, sizeof(buf), "%-18s %12s %10s\n", "parameter", "mean", "sd");
    out << buf;
    for (const auto& p : summary.params) {
        std::snprintf(buf, sizeof(buf), "%-18s %12.1f %10.1f\n", p.name.c_str(), p.mean, p.sd);
        out << buf;
    }
    if (summary.loo_ic) {
        std::snprintf(buf, sizeof(buf), "%-18s %12.0f %10.0f\n", "loo-ic",
                      summary.loo_ic->first, summary.loo_ic->second);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "%-18s %12.1f\n", "rmse", summary.rmse);
    out << buf;
    std::snprintf(buf, sizeof(buf), "%-18s %12zu\n", "n", summary.n);
    out << buf;
    for (const auto& w : summary.warnings) out << "warning: " << w << "\n";
    return out.str();
}

} // namespace excessd
