#include "excessd/hmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "excessd/diagnostics.hpp"
#include "excessd/parallel.hpp"
#include "excessd/rng.hpp"

namespace excessd {

namespace {

constexpr double kDivergenceEnergy = 50.0;

struct ChainResult {
    std::vector<double> draws; // retained x P raw-scale
    double step_size = 0.0;
    double accept_rate = 0.0;
    long divergent_post = 0;
    long divergent_warmup = 0;
};

struct DualAveraging {
    double mu = 0.0;
    double log_eps = 0.0;
    double log_eps_bar = 0.0;
    double h_bar = 0.0;
    long m = 0;
    static constexpr double gamma = 0.05;
    static constexpr double t0 = 10.0;
    static constexpr double kappa = 0.75;

    void reset(double eps0) {
        mu = std::log(10.0 * eps0);
        log_eps = std::log(eps0);
        log_eps_bar = 0.0;
        h_bar = 0.0;
        m = 0;
    }
    void update(double accept_prob, double target) {
        ++m;
        double md = static_cast<double>(m);
        h_bar = (1.0 - 1.0 / (md + t0)) * h_bar + (target - accept_prob) / (md + t0);
        log_eps = mu - std::sqrt(md) / gamma * h_bar;
        double w = std::pow(md, -kappa);
        log_eps_bar = w * log_eps + (1.0 - w) * log_eps_bar;
    }
};

class ChainRunner {
public:
    ChainRunner(const PreparedModel& model, const SamplerConfig& config, std::uint64_t seed)
        : model_(model), config_(config), rng_(seed), dim_(model.dim()),
          inv_mass_(dim_, 1.0), u_(dim_) {}

    ChainResult run() {
        for (std::size_t i = 0; i < dim_; ++i) u_[i] = rng_.uniform(-2.0, 2.0);

        double eps = find_initial_step_size();
        da_.reset(eps);

        const int warmup = config_.n_warmup;
        const int mass_window_start = warmup / 4;
        const int mass_window_end = (3 * warmup) / 4;
        const bool adapt_mass = warmup >= 100;
        std::vector<double> window_draws;

        ChainResult result;
        result.draws.reserve(static_cast<std::size_t>(config_.n_retained()) * dim_);
        double accept_sum = 0.0;

        for (int iter = 0; iter < config_.n_iterations; ++iter) {
            bool adapting = iter < warmup;
            in_warmup_ = adapting;
            if (adapting && adapt_mass && iter == mass_window_end) {
                estimate_mass(window_draws, mass_window_end - mass_window_start);
                window_draws.clear();
                eps = find_initial_step_size();
                da_.reset(eps);
            }

            double accept_prob = transition(eps);

            if (adapting) {
                da_.update(accept_prob, config_.target_acceptance);
                eps = std::exp(da_.log_eps);
                if (adapt_mass && iter >= mass_window_start && iter < mass_window_end)
                    window_draws.insert(window_draws.end(), u_.begin(), u_.end());
                if (iter == warmup - 1) eps = std::exp(da_.log_eps_bar);
            } else {
                accept_sum += accept_prob;
                std::vector<double> raw = model_.raw_parameters(u_);
                result.draws.insert(result.draws.end(), raw.begin(), raw.end());
            }
        }

        result.step_size = eps;
        result.accept_rate =
            config_.n_retained() > 0 ? accept_sum / config_.n_retained() : 0.0;
        result.divergent_post = divergent_post_;
        result.divergent_warmup = divergent_warmup_;
        return result;
    }

private:
    /// One HMC transition; returns the acceptance probability used for
    /// adaptation. Divergent trajectories are rejected and counted.
    double transition(double eps) {
        std::vector<double> p(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            p[i] = rng_.normal() / std::sqrt(inv_mass_[i]);

        long steps = rng_.uniform_int(jitter_lo(), jitter_hi());

        double logp0 = model_.log_density(u_);
        double h0 = -logp0 + kinetic(p);

        std::vector<double> u_new = u_;
        std::vector<double> g_new(dim_);
        model_.grad_log_density(u_new, g_new);

        for (std::size_t i = 0; i < dim_; ++i) p[i] += 0.5 * eps * g_new[i];
        for (long l = 0; l < steps; ++l) {
            for (std::size_t i = 0; i < dim_; ++i) u_new[i] += eps * inv_mass_[i] * p[i];
            model_.grad_log_density(u_new, g_new);
            double half = (l + 1 == steps) ? 0.5 : 1.0;
            for (std::size_t i = 0; i < dim_; ++i) p[i] += half * eps * g_new[i];
        }

        double logp1 = model_.log_density(u_new);
        double h1 = -logp1 + kinetic(p);

        bool divergent = !std::isfinite(h1) || (h1 - h0) > kDivergenceEnergy;
        double accept_prob = 0.0;
        if (!divergent) {
            accept_prob = h0 - h1 >= 0.0 ? 1.0 : std::exp(h0 - h1);
            if (rng_.uniform01() < accept_prob) u_.swap(u_new);
        } else {
            if (in_warmup_) ++divergent_warmup_; else ++divergent_post_;
            rng_.uniform01(); // keep the rng call count identical on rejection
        }
        return accept_prob;
    }

    double kinetic(const std::vector<double>& p) const {
        double k = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) k += inv_mass_[i] * p[i] * p[i];
        return 0.5 * k;
    }

    long jitter_lo() const {
        return std::max(1L, static_cast<long>(std::ceil(0.8 * config_.leapfrog_steps)));
    }
    long jitter_hi() const {
        return std::max(jitter_lo(), static_cast<long>(std::floor(1.2 * config_.leapfrog_steps)));
    }

    /// Doubles/halves eps until a single leapfrog step crosses 50%
    /// acceptance, starting from eps = 1 (Hoffman & Gelman initialization).
    double find_initial_step_size() {
        double eps = 1.0;
        std::vector<double> p0(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            p0[i] = rng_.normal() / std::sqrt(inv_mass_[i]);

        auto energy_error = [&](double step) {
            std::vector<double> u = u_;
            std::vector<double> p = p0;
            std::vector<double> g(dim_);
            double h0 = -model_.log_density(u) + kinetic(p);
            model_.grad_log_density(u, g);
            for (std::size_t i = 0; i < dim_; ++i) p[i] += 0.5 * step * g[i];
            for (std::size_t i = 0; i < dim_; ++i) u[i] += step * inv_mass_[i] * p[i];
            model_.grad_log_density(u, g);
            for (std::size_t i = 0; i < dim_; ++i) p[i] += 0.5 * step * g[i];
            double h1 = -model_.log_density(u) + kinetic(p);
            return h0 - h1; // log acceptance ratio
        };

        double log_ratio = energy_error(eps);
        if (!std::isfinite(log_ratio)) {
            for (int k = 0; k < 60 && !std::isfinite(log_ratio); ++k) {
                eps *= 0.5;
                log_ratio = energy_error(eps);
            }
            if (!std::isfinite(log_ratio)) return 1e-6;
        }
        double direction = log_ratio > std::log(0.5) ? 1.0 : -1.0;
        for (int k = 0; k < 60; ++k) {
            if (direction > 0 && !(log_ratio > std::log(0.5))) break;
            if (direction < 0 && !(log_ratio < std::log(0.5))) break;
            eps *= direction > 0 ? 2.0 : 0.5;
            log_ratio = energy_error(eps);
            if (!std::isfinite(log_ratio)) {
                if (direction > 0) { eps *= 0.5; break; }
                continue;
            }
        }
        return std::clamp(eps, 1e-8, 1e3);
    }

    void estimate_mass(const std::vector<double>& window_draws, long n_window) {
        if (n_window < 20) return;
        double n = static_cast<double>(n_window);
        for (std::size_t i = 0; i < dim_; ++i) {
            double mean = 0.0;
            for (long k = 0; k < n_window; ++k)
                mean += window_draws[static_cast<std::size_t>(k) * dim_ + i];
            mean /= n;
            double ss = 0.0;
            for (long k = 0; k < n_window; ++k) {
                double d = window_draws[static_cast<std::size_t>(k) * dim_ + i] - mean;
                ss += d * d;
            }
            double var = ss / (n - 1.0);
            // shrink toward a small value, as in Stan's windowed adaptation
            var = (n / (n + 5.0)) * var + 1e-3 * (5.0 / (n + 5.0));
            inv_mass_[i] = std::max(var, 1e-8);
        }
    }

    const PreparedModel& model_;
    const SamplerConfig& config_;
    Rng rng_;
    std::size_t dim_;
    std::vector<double> inv_mass_;
    std::vector<double> u_;
    DualAveraging da_;
    bool in_warmup_ = true;
    long divergent_post_ = 0;
    long divergent_warmup_ = 0;
};

} // namespace

void SamplerConfig::check() const {
    if (n_chains < 2)
        throw UsageError("sampler needs at least 2 chains (split R-hat requires them)");
    if (n_warmup < 0 || n_iterations <= 0 || n_warmup >= n_iterations)
        throw UsageError("sampler needs 0 <= warmup < iterations");
    if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
        throw UsageError("target acceptance must lie in (0, 1)");
    if (leapfrog_steps < 1)
        throw UsageError("leapfrog step count must be positive");
}

std::size_t PosteriorDraws::param_index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    throw UsageError("unknown parameter: " + name);
}

bool PosteriorDraws::has_param(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::vector<double> PosteriorDraws::flat(std::size_t param) const {
    std::vector<double> out;
    out.reserve(n_total());
    for (std::size_t c = 0; c < n_chains(); ++c)
        for (std::size_t d = 0; d < n_retained_per_chain(); ++d)
            out.push_back(value(c, d, param));
    return out;
}

ParameterDraw PosteriorDraws::draw_at(std::size_t chain, std::size_t draw) const {
    ParameterDraw p;
    for (std::size_t j = 0; j < names.size(); ++j) {
        double v = value(chain, draw, j);
        const std::string& name = names[j];
        if (name == "alpha") p.alpha = v;
        else if (name.rfind("theta_", 0) == 0) p.theta.push_back(v);
        else if (name == "beta_lag") p.beta_lag = v;
        else if (name == "gamma_hurricane") p.gamma_hurricane = v;
        else if (name == "gamma_dry") p.gamma_dry = v;
        else if (name == "rho") p.rho = v;
        else if (name == "sigma") p.sigma = v;
        else throw UsageError("unrecognized parameter name: " + name);
    }
    return p;
}

std::set<int> PosteriorDraws::fit_years() const {
    std::set<int> out;
    for (const auto& ym : fit_months) out.insert(ym.year);
    return out;
}

double PosteriorDraws::mean(std::size_t param) const {
    double acc = 0.0;
    for (std::size_t c = 0; c < n_chains(); ++c)
        for (std::size_t d = 0; d < n_retained_per_chain(); ++d)
            acc += value(c, d, param);
    return acc / static_cast<double>(n_total());
}

double PosteriorDraws::sd(std::size_t param) const {
    double m = mean(param);
    double ss = 0.0;
    for (std::size_t c = 0; c < n_chains(); ++c)
        for (std::size_t d = 0; d < n_retained_per_chain(); ++d) {
            double v = value(c, d, param) - m;
            ss += v * v;
        }
    return std::sqrt(ss / (static_cast<double>(n_total()) - 1.0));
}

PosteriorDraws sample_hmc(const DesignMatrix& design, const Prior& prior,
                          const ModelSpec& spec, const SamplerConfig& config) {
    config.check();
    PreparedModel model(design, prior, spec.has_ar1());

    std::vector<ChainResult> results(static_cast<std::size_t>(config.n_chains));
    parallel_for(results.size(), config.n_threads, [&](std::size_t c) {
        std::uint64_t chain_seed = derive_seed(config.seed, 0xC4A11ull + c);
        ChainRunner runner(model, config, chain_seed);
        results[c] = runner.run();
    });

    PosteriorDraws draws;
    draws.spec = spec;
    draws.config = config;
    draws.scale = model.scale();
    draws.names = model.parameter_names();
    draws.fit_months = design.time_index;
    for (auto& r : results) draws.chains.push_back(std::move(r.draws));

    Diagnostics& diag = draws.diagnostics;
    long div_post = 0;
    for (const auto& r : results) {
        diag.step_size.push_back(r.step_size);
        diag.accept_rate.push_back(r.accept_rate);
        div_post += r.divergent_post;
    }
    double total_post = static_cast<double>(config.n_chains) *
                        static_cast<double>(config.n_retained());
    diag.divergence_rate = total_post > 0 ? static_cast<double>(div_post) / total_post : 0.0;

    if (draws.n_retained_per_chain() >= 4) {
        for (std::size_t p = 0; p < draws.n_params(); ++p) {
            diag.rhat.push_back(rhat(draws, p));
            diag.ess.push_back(ess(draws, p));
        }
        double max_rhat = *std::max_element(diag.rhat.begin(), diag.rhat.end());
        if (max_rhat > 1.01)
            diag.warnings.push_back("non-convergence: max R-hat " + std::to_string(max_rhat) +
                                    " exceeds 1.01");
    }
    if (diag.divergence_rate > 0.01)
        diag.warnings.push_back("divergence rate " + std::to_string(diag.divergence_rate) +
                                " exceeds 1% of post-warm-up transitions");
    return draws;
}

} // namespace excessd
