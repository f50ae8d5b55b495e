#pragma once

#include <optional>
#include <span>
#include <vector>

#include "excessd/design.hpp"
#include "excessd/prior.hpp"

namespace excessd {

/// Mean and sample SD of the fitting outcome; defines the internal
/// standardization under which the diffuse priors are unit-scale.
struct OutcomeScale {
    double mean = 0.0;
    double sd = 1.0;
};

OutcomeScale outcome_scale(std::span<const double> y);

/// One posterior draw on the raw (deaths) scale.
struct ParameterDraw {
    double alpha = 0.0;
    std::vector<double> theta; // offsets for non-baseline months, calendar order
    std::optional<double> rho;
    double sigma = 1.0;
    std::optional<double> beta_lag;
    std::optional<double> gamma_hurricane;
    std::optional<double> gamma_dry;
};

/// Throws DataError if sigma <= 0 or rho outside (-1, 1).
void validate(const ParameterDraw& p);

/// Packs a draw into the coefficient order of a design's columns.
std::vector<double> coef_vector(const ParameterDraw& p, const DesignMatrix& design);

/// Unpacks a coefficient vector (+ rho/sigma) into a draw.
ParameterDraw make_draw(std::span<const double> coef, const DesignMatrix& design,
                        std::optional<double> rho, double sigma);

/// Gaussian log-likelihood of a linear model on `design`. Without rho the
/// errors are i.i.d. N(0, sigma^2); with rho they follow a stationary AR(1)
/// within each calendar-contiguous segment: the first residual of a segment
/// is N(0, sigma^2/(1-rho^2)) and each later one is N(rho * prev, sigma^2).
/// Returns -inf on non-finite inputs.
double gaussian_loglik(const DesignMatrix& design, std::span<const double> coef,
                       double sigma, std::optional<double> rho);

/// Spec-level likelihood on raw-scale parameters.
double log_likelihood(const ParameterDraw& p, const DesignMatrix& design, bool ar1);

/// A model readied for sampling: standardized outcome/design, resolved
/// priors, and the affine maps between raw and standardized coefficients.
/// The unconstrained parameter vector is
///   [standardized coefficients..., atanh(rho) (AR models), log(sigma_std)].
class PreparedModel {
public:
    PreparedModel(const DesignMatrix& raw, const Prior& prior, bool ar1);

    std::size_t n_coef() const { return n_coef_; }
    bool ar1() const { return ar1_; }
    std::size_t dim() const { return n_coef_ + (ar1_ ? 1 : 0) + 1; }
    const OutcomeScale& scale() const { return scale_; }
    const DesignMatrix& std_design() const { return std_design_; }

    /// Log posterior density of the unconstrained vector, up to an additive
    /// constant shared with log_posterior() below (the outcome Jacobian).
    double log_density(std::span<const double> u) const;

    /// Analytic gradient of log_density; grad.size() == dim().
    void grad_log_density(std::span<const double> u, std::span<double> grad) const;

    /// Raw-scale parameters [coef..., (rho), sigma] from unconstrained u.
    std::vector<double> raw_parameters(std::span<const double> u) const;

    std::vector<double> to_unconstrained(const ParameterDraw& p) const;

    /// Parameter names in raw_parameters() order.
    const std::vector<std::string>& parameter_names() const { return names_; }

private:
    struct ResolvedPrior {
        double location = 0.0;
        double scale = 1.0;
        double df = 3.0;
        bool student_t = true;
        double log_norm = 0.0;
    };

    static ResolvedPrior resolve(const PriorComponent& c, double location_shift, double unit);
    double prior_logpdf(const ResolvedPrior& rp, double value) const;
    double prior_dlogpdf(const ResolvedPrior& rp, double value) const;

    DesignMatrix std_design_;
    OutcomeScale scale_;
    bool ar1_ = false;
    std::size_t n_coef_ = 0;
    std::vector<double> col_shift_, col_scale_;
    std::vector<double> col_mean_; // standardized-design column means
    // Standardized-space intercept priors act on the centered intercept
    // (the mean outcome level), matching the reference defaults; raw-space
    // intercept priors act on the intercept itself.
    bool center_intercept_prior_ = false;
    std::vector<ResolvedPrior> coef_prior_;
    ResolvedPrior rho_prior_, sigma_prior_;
    std::vector<std::pair<std::size_t, std::size_t>> segments_;
    std::vector<std::string> names_;
};

/// Spec-level log posterior: raw-scale log-likelihood plus prior
/// log-densities on the standardized-coefficient scale plus the
/// log-Jacobians of the sigma (log) and rho (atanh) transforms.
double log_posterior(const ParameterDraw& p, const DesignMatrix& design,
                     const Prior& prior, bool ar1);

/// Gradient of the log posterior in the unconstrained parameterization.
std::vector<double> grad_log_posterior(const ParameterDraw& p, const DesignMatrix& design,
                                       const Prior& prior, bool ar1);

} // namespace excessd
