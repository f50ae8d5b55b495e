#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "excessd/posterior.hpp"

namespace excessd {

struct SamplerConfig {
    int n_chains = 4;
    int n_iterations = 2000;
    int n_warmup = 1000;
    std::uint64_t seed = 1;
    double target_acceptance = 0.8;
    int leapfrog_steps = 32; // jittered by +-20% per iteration
    int n_threads = 0;       // 0 = all cores; never affects results

    int n_retained() const { return n_iterations - n_warmup; }
    void check() const;
};

struct Diagnostics {
    std::vector<double> rhat;        // per parameter
    std::vector<double> ess;         // per parameter
    double divergence_rate = 0.0;    // post-warmup divergent transitions
    std::vector<double> step_size;   // per chain, post-adaptation
    std::vector<double> accept_rate; // per chain, post-warmup mean
    std::vector<std::string> warnings;
};

/// Post-warm-up draws of every chain, stored on the raw (deaths) scale.
class PosteriorDraws {
public:
    ModelSpec spec;
    SamplerConfig config;
    OutcomeScale scale;
    std::vector<std::string> names;
    std::vector<YearMonth> fit_months;
    std::vector<std::vector<double>> chains; // chain -> (retained x P) row-major
    Diagnostics diagnostics;

    std::size_t n_params() const { return names.size(); }
    std::size_t n_chains() const { return chains.size(); }
    std::size_t n_retained_per_chain() const {
        return chains.empty() || names.empty() ? 0 : chains[0].size() / names.size();
    }
    std::size_t n_total() const { return n_chains() * n_retained_per_chain(); }

    double value(std::size_t chain, std::size_t draw, std::size_t param) const {
        return chains[chain][draw * n_params() + param];
    }
    std::size_t param_index(const std::string& name) const;
    bool has_param(const std::string& name) const;

    /// All chains concatenated for one parameter.
    std::vector<double> flat(std::size_t param) const;

    /// Materializes one draw; fields are populated from parameter names.
    ParameterDraw draw_at(std::size_t chain, std::size_t draw) const;

    std::set<int> fit_years() const;

    /// Posterior mean / sd over all retained draws.
    double mean(std::size_t param) const;
    double sd(std::size_t param) const;
};

/// Multi-chain Hamiltonian Monte Carlo with dual-averaging step-size
/// adaptation and a single diagonal mass-matrix re-estimation during
/// warm-up. Chains run on distinct sub-seeds derived from config.seed and
/// may execute concurrently; output is identical for any thread count.
PosteriorDraws sample_hmc(const DesignMatrix& design, const Prior& prior,
                          const ModelSpec& spec, const SamplerConfig& config);

} // namespace excessd
