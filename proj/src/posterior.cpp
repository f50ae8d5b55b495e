#include "excessd/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "excessd/kernels.hpp"

namespace excessd {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogSigmaBound = 20.0; // truncation guard for degenerate data
constexpr double kAtanhRhoBound = 12.0;

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// log(1 - tanh(x)^2), stable for large |x|.
double log_one_minus_tanh_sq(double x) {
    double a = std::abs(x);
    return 2.0 * (std::numbers::ln2 - a - std::log1p(std::exp(-2.0 * a)));
}

} // namespace

OutcomeScale outcome_scale(std::span<const double> y) {
    OutcomeScale s;
    if (y.empty()) return s;
    double n = static_cast<double>(y.size());
    s.mean = kernels::sum(y) / n;
    if (y.size() > 1) {
        double ss = 0.0;
        for (double v : y) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / (n - 1.0));
    }
    if (!(s.sd > 1e-12 * std::max(1.0, std::abs(s.mean))))
        s.sd = 1.0; // constant outcome; keep the transform invertible
    return s;
}

void validate(const ParameterDraw& p) {
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma))
        throw DataError("parameter draw: sigma must be positive and finite");
    if (p.rho && !(std::abs(*p.rho) < 1.0))
        throw DataError("parameter draw: rho must lie strictly inside (-1, 1)");
    if (!std::isfinite(p.alpha))
        throw DataError("parameter draw: alpha must be finite");
    for (double t : p.theta)
        if (!std::isfinite(t)) throw DataError("parameter draw: theta must be finite");
}

std::vector<double> coef_vector(const ParameterDraw& p, const DesignMatrix& design) {
    std::vector<double> coef;
    coef.reserve(design.n_cols);
    std::size_t theta_used = 0;
    for (std::size_t j = 0; j < design.n_cols; ++j) {
        switch (design.column_kinds[j]) {
            case ColumnKind::intercept:
                coef.push_back(p.alpha);
                break;
            case ColumnKind::month_dummy:
                if (theta_used >= p.theta.size())
                    throw UsageError("parameter draw has too few month offsets for this design");
                coef.push_back(p.theta[theta_used++]);
                break;
            case ColumnKind::lag:
                if (!p.beta_lag) throw UsageError("parameter draw lacks beta_lag");
                coef.push_back(*p.beta_lag);
                break;
            case ColumnKind::season_indicator:
                if (design.column_names[j] == "gamma_hurricane") {
                    if (!p.gamma_hurricane) throw UsageError("parameter draw lacks gamma_hurricane");
                    coef.push_back(*p.gamma_hurricane);
                } else {
                    if (!p.gamma_dry) throw UsageError("parameter draw lacks gamma_dry");
                    coef.push_back(*p.gamma_dry);
                }
                break;
        }
    }
    if (theta_used != p.theta.size())
        throw UsageError("parameter draw has more month offsets than the design");
    return coef;
}

ParameterDraw make_draw(std::span<const double> coef, const DesignMatrix& design,
                        std::optional<double> rho, double sigma) {
    if (coef.size() != design.n_cols)
        throw UsageError("coefficient count does not match design");
    ParameterDraw p;
    p.rho = rho;
    p.sigma = sigma;
    for (std::size_t j = 0; j < design.n_cols; ++j) {
        switch (design.column_kinds[j]) {
            case ColumnKind::intercept: p.alpha = coef[j]; break;
            case ColumnKind::month_dummy: p.theta.push_back(coef[j]); break;
            case ColumnKind::lag: p.beta_lag = coef[j]; break;
            case ColumnKind::season_indicator:
                if (design.column_names[j] == "gamma_hurricane")
                    p.gamma_hurricane = coef[j];
                else
                    p.gamma_dry = coef[j];
                break;
        }
    }
    return p;
}

namespace {

double loglik_core(const DesignMatrix& design, std::span<const double> coef,
                   double sigma, std::optional<double> rho,
                   const std::vector<std::pair<std::size_t, std::size_t>>& segments) {
    const std::size_t n = design.n_rows;
    if (n == 0) throw DataError("empty design");
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !all_finite(coef)) return kNegInf;
    if (rho && !(std::abs(*rho) < 1.0)) return kNegInf;

    std::vector<double> r(n);
    for (std::size_t t = 0; t < n; ++t)
        r[t] = design.y[t] - kernels::dot(design.row(t), coef);

    double quad = 0.0;
    double log_det_term = 0.0;
    if (!rho) {
        quad = kernels::sumsq(r);
    } else {
        double q = *rho;
        for (auto [start, len] : segments) {
            std::span<const double> rs(r.data() + start, len);
            double s2 = kernels::sumsq(rs.subspan(1));
            double s1 = kernels::sumsq(rs.first(len - 1));
            double c = kernels::dot(rs.first(len - 1), rs.subspan(1));
            quad += (1.0 - q * q) * rs[0] * rs[0] + s2 - 2.0 * q * c + q * q * s1;
            log_det_term += 0.5 * std::log1p(-q * q);
        }
    }
    double ll = -0.5 * static_cast<double>(n) * kLog2Pi -
                static_cast<double>(n) * std::log(sigma) + log_det_term -
                quad / (2.0 * sigma * sigma);
    return std::isfinite(ll) ? ll : kNegInf;
}

} // namespace

double gaussian_loglik(const DesignMatrix& design, std::span<const double> coef,
                       double sigma, std::optional<double> rho) {
    return loglik_core(design, coef, sigma, rho,
                       rho ? design.segments()
                           : std::vector<std::pair<std::size_t, std::size_t>>{});
}

double log_likelihood(const ParameterDraw& p, const DesignMatrix& design, bool ar1) {
    validate(p);
    if (ar1 && !p.rho)
        throw UsageError("ar1 likelihood requested but the draw has no rho");
    return gaussian_loglik(design, coef_vector(p, design), p.sigma,
                           ar1 ? p.rho : std::nullopt);
}

PreparedModel::ResolvedPrior PreparedModel::resolve(const PriorComponent& c,
                                                    double location_shift, double unit) {
    // A raw-space component on b relates to the standardized coefficient v
    // through b = location_shift + unit * v; the density is re-expressed on v.
    ResolvedPrior rp;
    rp.student_t = c.family == PriorComponent::Family::student_t;
    rp.df = c.df;
    if (c.space == PriorComponent::Space::raw) {
        rp.location = (c.location - location_shift) / unit;
        rp.scale = c.scale / unit;
    } else {
        rp.location = c.location;
        rp.scale = c.scale;
    }
    if (!(rp.scale > 0.0))
        throw UsageError("prior scale must be positive");
    if (rp.student_t) {
        if (!(rp.df > 0.0)) throw UsageError("prior df must be positive");
        rp.log_norm = std::lgamma(0.5 * (rp.df + 1.0)) - std::lgamma(0.5 * rp.df) -
                      0.5 * std::log(rp.df * std::numbers::pi) - std::log(rp.scale);
    } else {
        rp.log_norm = -0.5 * kLog2Pi - std::log(rp.scale);
    }
    return rp;
}

double PreparedModel::prior_logpdf(const ResolvedPrior& rp, double value) const {
    double u = (value - rp.location) / rp.scale;
    if (rp.student_t)
        return rp.log_norm - 0.5 * (rp.df + 1.0) * std::log1p(u * u / rp.df);
    return rp.log_norm - 0.5 * u * u;
}

double PreparedModel::prior_dlogpdf(const ResolvedPrior& rp, double value) const {
    double u = (value - rp.location) / rp.scale;
    if (rp.student_t)
        return -(rp.df + 1.0) * u / ((rp.df + u * u) * rp.scale);
    return -u / rp.scale;
}

PreparedModel::PreparedModel(const DesignMatrix& raw, const Prior& prior, bool ar1)
    : std_design_(raw), ar1_(ar1), n_coef_(raw.n_cols) {
    if (raw.column_kinds.empty() || raw.column_kinds[0] != ColumnKind::intercept)
        throw UsageError("designs must carry the intercept as their first column");
    scale_ = outcome_scale(raw.y);

    col_shift_.assign(n_coef_, 0.0);
    col_scale_.assign(n_coef_, 1.0);
    bool has_lag = false;
    for (std::size_t j = 0; j < n_coef_; ++j) {
        if (raw.column_kinds[j] == ColumnKind::lag) {
            has_lag = true;
            col_shift_[j] = scale_.mean;
            col_scale_[j] = scale_.sd;
        }
    }

    // Standardize the outcome and the lag column in place.
    kernels::affine(-scale_.mean / scale_.sd, 1.0 / scale_.sd,
                    std::span<const double>(raw.y), std::span<double>(std_design_.y));
    for (std::size_t j = 0; j < n_coef_; ++j) {
        if (col_scale_[j] == 1.0 && col_shift_[j] == 0.0) continue;
        for (std::size_t t = 0; t < std_design_.n_rows; ++t)
            std_design_.x[t * n_coef_ + j] =
                (raw.at(t, j) - col_shift_[j]) / col_scale_[j];
    }

    col_mean_.assign(n_coef_, 0.0);
    for (std::size_t j = 0; j < n_coef_; ++j) {
        double acc = 0.0;
        for (std::size_t t = 0; t < std_design_.n_rows; ++t)
            acc += std_design_.at(t, j);
        col_mean_[j] = acc / static_cast<double>(std::max<std::size_t>(std_design_.n_rows, 1));
    }

    coef_prior_.reserve(n_coef_);
    for (std::size_t j = 0; j < n_coef_; ++j) {
        const PriorComponent& c = prior.for_coef(raw.column_names[j]);
        bool is_intercept = raw.column_kinds[j] == ColumnKind::intercept;
        if (is_intercept && has_lag && c.space == PriorComponent::Space::raw)
            throw UsageError("raw-space intercept priors are not supported for lagged models");
        if (is_intercept)
            center_intercept_prior_ = c.space == PriorComponent::Space::standardized;
        double shift = is_intercept ? scale_.mean : 0.0;
        double unit = is_intercept ? scale_.sd : scale_.sd / col_scale_[j];
        coef_prior_.push_back(resolve(c, shift, unit));
    }
    rho_prior_ = resolve(prior.rho, 0.0, 1.0);
    sigma_prior_ = resolve(prior.sigma, 0.0, scale_.sd);

    segments_ = std_design_.segments();
    names_ = raw.column_names;
    if (ar1_) names_.push_back("rho");
    names_.push_back("sigma");
}

double PreparedModel::log_density(std::span<const double> u) const {
    if (u.size() != dim()) throw UsageError("unconstrained vector has wrong length");
    if (!all_finite(u)) return kNegInf;
    double x_sigma = u[dim() - 1];
    if (std::abs(x_sigma) > kLogSigmaBound) return kNegInf;
    double sigma_std = std::exp(x_sigma);

    std::optional<double> rho;
    double x_rho = 0.0;
    if (ar1_) {
        x_rho = u[n_coef_];
        if (std::abs(x_rho) > kAtanhRhoBound) return kNegInf;
        rho = std::tanh(x_rho);
    }

    std::span<const double> coef = u.first(n_coef_);
    double lp = loglik_core(std_design_, coef, sigma_std, rho, segments_);
    if (!std::isfinite(lp)) return kNegInf;

    for (std::size_t j = 0; j < n_coef_; ++j) {
        double value = coef[j];
        if (j == 0 && center_intercept_prior_) {
            value = coef[0];
            for (std::size_t k = 1; k < n_coef_; ++k) value += coef[k] * col_mean_[k];
        }
        lp += prior_logpdf(coef_prior_[j], value);
    }
    lp += prior_logpdf(sigma_prior_, sigma_std) + x_sigma;
    if (ar1_)
        lp += prior_logpdf(rho_prior_, *rho) + log_one_minus_tanh_sq(x_rho);
    return std::isfinite(lp) ? lp : kNegInf;
}

void PreparedModel::grad_log_density(std::span<const double> u, std::span<double> grad) const {
    if (u.size() != dim() || grad.size() != dim())
        throw UsageError("gradient buffer has wrong length");
    std::fill(grad.begin(), grad.end(), 0.0);
    if (!all_finite(u)) return;
    double x_sigma = u[dim() - 1];
    if (std::abs(x_sigma) > kLogSigmaBound) return;
    double sigma_std = std::exp(x_sigma);
    double inv_two_sigma_sq = 1.0 / (2.0 * sigma_std * sigma_std);

    double rho = 0.0, x_rho = 0.0;
    if (ar1_) {
        x_rho = u[n_coef_];
        if (std::abs(x_rho) > kAtanhRhoBound) return;
        rho = std::tanh(x_rho);
    }

    const std::size_t n = std_design_.n_rows;
    std::span<const double> coef = u.first(n_coef_);
    std::vector<double> r(n);
    for (std::size_t t = 0; t < n; ++t)
        r[t] = std_design_.y[t] - kernels::dot(std_design_.row(t), coef);

    // Adjoint of the innovation quadratic Q with respect to the residuals.
    std::vector<double> adj(n);
    double quad = 0.0;
    double dquad_drho = 0.0;
    if (!ar1_) {
        kernels::affine(0.0, 2.0, r, std::span<double>(adj));
        quad = kernels::sumsq(r);
    } else {
        for (auto [start, len] : segments_) {
            std::span<const double> rs(r.data() + start, len);
            kernels::ar1_adjoint(rs, rho, std::span<double>(adj.data() + start, len));
            double s2 = kernels::sumsq(rs.subspan(1));
            double s1 = kernels::sumsq(rs.first(len - 1));
            double c = kernels::dot(rs.first(len - 1), rs.subspan(1));
            quad += (1.0 - rho * rho) * rs[0] * rs[0] + s2 - 2.0 * rho * c + rho * rho * s1;
            dquad_drho += -2.0 * rho * rs[0] * rs[0] - 2.0 * (c - rho * s1);
        }
    }

    // Coefficients: dll/dc = (X^T adj) / (2 sigma^2), then the prior terms.
    std::span<double> coef_grad = grad.first(n_coef_);
    for (std::size_t t = 0; t < n; ++t)
        kernels::axpy(adj[t], std_design_.row(t), coef_grad);
    for (std::size_t j = 0; j < n_coef_; ++j) {
        double prior_term = 0.0;
        if (!(j == 0 && center_intercept_prior_))
            prior_term = prior_dlogpdf(coef_prior_[j], coef[j]);
        coef_grad[j] = coef_grad[j] * inv_two_sigma_sq + prior_term;
    }
    if (center_intercept_prior_) {
        double centered = coef[0];
        for (std::size_t k = 1; k < n_coef_; ++k) centered += coef[k] * col_mean_[k];
        double d = prior_dlogpdf(coef_prior_[0], centered);
        coef_grad[0] += d;
        for (std::size_t k = 1; k < n_coef_; ++k) coef_grad[k] += d * col_mean_[k];
    }

    grad[dim() - 1] = -static_cast<double>(n) + quad / (sigma_std * sigma_std) +
                      prior_dlogpdf(sigma_prior_, sigma_std) * sigma_std + 1.0;

    if (ar1_) {
        double n_segments = static_cast<double>(segments_.size());
        grad[n_coef_] = -n_segments * rho -
                        (1.0 - rho * rho) * dquad_drho * inv_two_sigma_sq +
                        prior_dlogpdf(rho_prior_, rho) * (1.0 - rho * rho) - 2.0 * rho;
    }
}

std::vector<double> PreparedModel::raw_parameters(std::span<const double> u) const {
    std::vector<double> out;
    out.reserve(dim());
    double intercept = scale_.mean + scale_.sd * u[0];
    out.push_back(0.0); // placeholder, adjusted below
    for (std::size_t j = 1; j < n_coef_; ++j) {
        double b = u[j] * scale_.sd / col_scale_[j];
        out.push_back(b);
        intercept -= b * col_shift_[j];
    }
    out[0] = intercept;
    if (ar1_) out.push_back(std::tanh(u[n_coef_]));
    out.push_back(scale_.sd * std::exp(u[dim() - 1]));
    return out;
}

std::vector<double> PreparedModel::to_unconstrained(const ParameterDraw& p) const {
    validate(p);
    if (ar1_ && !p.rho)
        throw UsageError("model has an AR(1) term but the draw has no rho");
    std::vector<double> b = coef_vector(p, std_design_);
    std::vector<double> u(dim());
    double shifted = b[0] - scale_.mean;
    for (std::size_t j = 1; j < n_coef_; ++j) {
        u[j] = b[j] * col_scale_[j] / scale_.sd;
        shifted += b[j] * col_shift_[j];
    }
    u[0] = shifted / scale_.sd;
    if (ar1_) u[n_coef_] = std::atanh(*p.rho);
    u[dim() - 1] = std::log(p.sigma / scale_.sd);
    return u;
}

double log_posterior(const ParameterDraw& p, const DesignMatrix& design,
                     const Prior& prior, bool ar1) {
    PreparedModel prep(design, prior, ar1);
    std::vector<double> u = prep.to_unconstrained(p);
    double lp = prep.log_density(u);
    if (!std::isfinite(lp)) return lp;
    // log_density is expressed on the standardized outcome; shifting by the
    // outcome Jacobian restates it against the raw-scale likelihood.
    return lp - static_cast<double>(design.n_rows) * std::log(prep.scale().sd);
}

std::vector<double> grad_log_posterior(const ParameterDraw& p, const DesignMatrix& design,
                                       const Prior& prior, bool ar1) {
    PreparedModel prep(design, prior, ar1);
    std::vector<double> u = prep.to_unconstrained(p);
    std::vector<double> grad(prep.dim());
    prep.grad_log_density(u, grad);
    return grad;
}

} // namespace excessd
