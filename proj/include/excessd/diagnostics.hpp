#pragma once

#include <cstddef>
#include <string>

#include "excessd/hmc.hpp"

namespace excessd {

/// Split R-hat: each chain is halved and the usual between/within variance
/// ratio is computed over the half-chains. Requires >= 2 chains and >= 4
/// retained draws per chain. Chains that are all constant and equal give
/// 1 by convention; constant but unequal chains give +infinity.
double rhat(const PosteriorDraws& draws, std::size_t param);
double rhat(const PosteriorDraws& draws, const std::string& param);

/// Effective sample size from the combined autocorrelation estimate with
/// Geyer's initial monotone positive sequence, on split chains. Constant
/// chains return the total draw count by convention.
double ess(const PosteriorDraws& draws, std::size_t param);
double ess(const PosteriorDraws& draws, const std::string& param);

/// Monte-Carlo standard error of the posterior mean: sd / sqrt(ess).
double mcse_mean(const PosteriorDraws& draws, std::size_t param);

} // namespace excessd
