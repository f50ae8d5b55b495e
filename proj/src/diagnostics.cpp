#include "excessd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace excessd {

namespace {

struct SplitChains {
    std::vector<std::vector<double>> halves;
    std::size_t len = 0;
};

SplitChains split_chains(const PosteriorDraws& draws, std::size_t param) {
    if (draws.n_chains() < 2)
        throw DataError("convergence diagnostics need at least 2 chains");
    if (draws.n_retained_per_chain() < 4)
        throw DataError("convergence diagnostics need at least 4 retained draws per chain");

    SplitChains out;
    out.len = draws.n_retained_per_chain() / 2;
    for (std::size_t c = 0; c < draws.n_chains(); ++c) {
        std::vector<double> first, second;
        first.reserve(out.len);
        second.reserve(out.len);
        for (std::size_t i = 0; i < out.len; ++i)
            first.push_back(draws.value(c, i, param));
        // an odd middle draw is dropped
        std::size_t offset = draws.n_retained_per_chain() - out.len;
        for (std::size_t i = 0; i < out.len; ++i)
            second.push_back(draws.value(c, offset + i, param));
        out.halves.push_back(std::move(first));
        out.halves.push_back(std::move(second));
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v, double mean) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / (static_cast<double>(v.size()) - 1.0);
}

struct VarianceDecomposition {
    double w = 0.0;        // mean within-half-chain variance
    double b_over_len = 0; // B / L = variance of half-chain means
    double var_plus = 0.0;
    std::vector<double> means;
};

VarianceDecomposition decompose(const SplitChains& sc) {
    VarianceDecomposition d;
    std::vector<double> vars;
    for (const auto& h : sc.halves) {
        double m = mean_of(h);
        d.means.push_back(m);
        vars.push_back(var_of(h, m));
    }
    d.w = mean_of(vars);
    double grand = mean_of(d.means);
    d.b_over_len = var_of(d.means, grand);
    double len = static_cast<double>(sc.len);
    d.var_plus = (len - 1.0) / len * d.w + d.b_over_len;
    return d;
}

} // namespace

double rhat(const PosteriorDraws& draws, std::size_t param) {
    SplitChains sc = split_chains(draws, param);
    VarianceDecomposition d = decompose(sc);
    if (d.w <= 0.0)
        return d.b_over_len <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(d.var_plus / d.w);
}

double rhat(const PosteriorDraws& draws, const std::string& param) {
    return rhat(draws, draws.param_index(param));
}

double ess(const PosteriorDraws& draws, std::size_t param) {
    SplitChains sc = split_chains(draws, param);
    VarianceDecomposition d = decompose(sc);
    const std::size_t m = sc.halves.size();
    const std::size_t len = sc.len;
    const double total = static_cast<double>(m * len);
    if (d.var_plus <= 0.0) return total; // constant chains

    // Mean over chains of the (biased) autocovariance at each lag.
    std::vector<double> acov_mean(len, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
        const auto& h = sc.halves[c];
        double mean = d.means[c];
        for (std::size_t t = 0; t < len; ++t) {
            double acc = 0.0;
            for (std::size_t i = 0; i + t < len; ++i)
                acc += (h[i] - mean) * (h[i + t] - mean);
            acov_mean[t] += acc / static_cast<double>(len);
        }
    }
    for (double& v : acov_mean) v /= static_cast<double>(m);

    auto rho_hat = [&](std::size_t t) {
        return 1.0 - (d.w - acov_mean[t]) / d.var_plus;
    };

    // Geyer initial monotone positive sequence over lag pairs.
    double tau = -1.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; 2 * k + 1 < len; ++k) {
        double pair = rho_hat(2 * k) + rho_hat(2 * k + 1);
        if (pair <= 0.0) break;
        pair = std::min(pair, prev_pair);
        prev_pair = pair;
        tau += 2.0 * pair;
    }
    tau = std::max(tau, 1.0 / std::log10(total + 10.0)); // guard antithetic extremes
    return total / tau;
}

double ess(const PosteriorDraws& draws, const std::string& param) {
    return ess(draws, draws.param_index(param));
}

double mcse_mean(const PosteriorDraws& draws, std::size_t param) {
    double n_eff = ess(draws, param);
    return draws.sd(param) / std::sqrt(std::max(n_eff, 1.0));
}

} // namespace excessd
