#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "excessd/posterior.hpp"
#include "excessd/rng.hpp"
#include "oracles.hpp"

using namespace excessd;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

DesignMatrix residual_design(const std::vector<double>& y, int start_year = 2010,
                             int start_month = 1) {
    // intercept-only design whose outcome IS the residual vector once the
    // coefficient is zero
    DesignMatrix d;
    d.n_rows = y.size();
    d.n_cols = 1;
    d.y = y;
    d.x.assign(y.size(), 1.0);
    d.column_names = {"alpha"};
    d.column_kinds = {ColumnKind::intercept};
    YearMonth ym{start_year, start_month};
    for (std::size_t i = 0; i < y.size(); ++i) {
        d.time_index.push_back(ym);
        ym = ym.next();
    }
    return d;
}

ParameterDraw zero_mean_draw(double sigma, std::optional<double> rho) {
    ParameterDraw p;
    p.alpha = 0.0;
    p.sigma = sigma;
    p.rho = rho;
    return p;
}

double t3_logpdf(double u) {
    double log_norm = std::lgamma(2.0) - std::lgamma(1.5) - 0.5 * std::log(3.0 * std::numbers::pi);
    return log_norm - 2.0 * std::log1p(u * u / 3.0);
}

} // namespace

TEST_CASE("iid log-likelihood at zero residuals") {
    std::vector<double> zeros(3, 0.0);
    DesignMatrix d = residual_design(zeros);
    double ll = log_likelihood(zero_mean_draw(1.0, std::nullopt), d, false);
    CHECK(ll == doctest::Approx(-1.5 * kLog2Pi)); // -(3/2) log(2 pi)
}

TEST_CASE("ar1 likelihood with rho = 0 degenerates to iid") {
    Rng rng(11);
    std::vector<double> y(20);
    for (auto& v : y) v = rng.normal(0.0, 3.0);
    DesignMatrix d = residual_design(y);
    double iid = log_likelihood(zero_mean_draw(2.5, std::nullopt), d, false);
    double ar1 = log_likelihood(zero_mean_draw(2.5, 0.0), d, true);
    CHECK(ar1 == doctest::Approx(iid).epsilon(1e-14));
}

TEST_CASE("ar1 likelihood matches the Toeplitz multivariate-normal oracle") {
    Rng rng(101);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 8));
        double rho = rng.uniform(-0.95, 0.95);
        double sigma = rng.uniform(0.1, 10.0);
        std::vector<double> resid(n);
        for (auto& v : resid) v = rng.normal(0.0, sigma);

        DesignMatrix d = residual_design(resid);
        double ours = log_likelihood(zero_mean_draw(sigma, rho), d, true);
        double oracle = oracles::mvn_ar1_logpdf(resid, rho, sigma);
        CHECK(std::abs(ours - oracle) < 1e-8);
    }
}

TEST_CASE("segmented ar1 likelihood equals independent blocks") {
    Rng rng(5);
    std::vector<double> r1(6), r2(9);
    for (auto& v : r1) v = rng.normal();
    for (auto& v : r2) v = rng.normal();

    // one design with a one-month hole between the blocks
    std::vector<double> all = r1;
    all.insert(all.end(), r2.begin(), r2.end());
    DesignMatrix d = residual_design(all);
    YearMonth ym{2011, 1};
    for (std::size_t i = 0; i < d.n_rows; ++i) {
        if (i == r1.size()) ym = ym.next(); // skip a month
        d.time_index[i] = ym;
        ym = ym.next();
    }
    REQUIRE(d.segments().size() == 2);

    double ours = log_likelihood(zero_mean_draw(1.3, 0.62), d, true);
    double oracle = oracles::mvn_ar1_logpdf_blocks({r1, r2}, 0.62, 1.3);
    CHECK(ours == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("invalid parameters are rejected") {
    std::vector<double> y = {1.0, 2.0, 3.0};
    DesignMatrix d = residual_design(y);
    CHECK_THROWS_AS(log_likelihood(zero_mean_draw(-1.0, std::nullopt), d, false), DataError);
    CHECK_THROWS_AS(log_likelihood(zero_mean_draw(1.0, 1.5), d, true), DataError);
    CHECK_THROWS_AS(log_likelihood(zero_mean_draw(1.0, std::nullopt), d, true), UsageError);
    CHECK(gaussian_loglik(d, std::vector<double>{0.0}, 0.0, std::nullopt) ==
          -std::numeric_limits<double>::infinity());
}

TEST_CASE("prior components contribute their mode density at their location") {
    // all-unit-t prior, evaluated at the standardized prior locations
    MonthlySeries s = demo_series(3, false);
    DesignMatrix d = build_design(s, {ModelKind::MonthEffectsAr1, 1});
    Prior prior; // t(3,0,1) on every component, standardized space
    PreparedModel prep(d, prior, true);

    // parameters whose standardized coefficients sit at 0, sigma_std = 1, rho = 0
    std::vector<double> u(prep.dim(), 0.0);
    double lp = prep.log_density(u);

    std::vector<double> coef_std(prep.n_coef(), 0.0);
    double sigma_std = 1.0;
    std::vector<double> raw = prep.raw_parameters(u);
    ParameterDraw p = make_draw(std::span<const double>(raw).first(prep.n_coef()), d, 0.0,
                                raw.back());
    double ll = gaussian_loglik(prep.std_design(), coef_std, sigma_std, 0.0);

    double expected_prior = 0.0;
    for (std::size_t j = 0; j < prep.n_coef(); ++j) expected_prior += t3_logpdf(0.0);
    expected_prior += t3_logpdf(1.0) + 0.0;       // sigma at sigma_std=1, jacobian log sigma = 0
    expected_prior += t3_logpdf(0.0) + 0.0;       // rho at 0, jacobian log(1-rho^2) = 0
    CHECK(lp - ll == doctest::Approx(expected_prior).epsilon(1e-12));

    // spec-level value differs from the internal one exactly by the outcome jacobian
    double lp_spec = log_posterior(p, d, prior, true);
    CHECK(lp_spec == doctest::Approx(lp - static_cast<double>(d.n_rows) *
                                              std::log(prep.scale().sd))
                         .epsilon(1e-12));
}

TEST_CASE("gradient matches central finite differences on every model") {
    MonthlySeries s = demo_series(4, false);
    Rng rng(77);
    for (int model = 1; model <= 4; ++model) {
        ModelSpec spec{model_kind_from_int(model), 1};
        DesignMatrix d = build_design(s, spec);
        Prior prior = Prior::diffuse();
        PreparedModel prep(d, prior, spec.has_ar1());

        for (int trial = 0; trial < 6; ++trial) {
            std::vector<double> u(prep.dim());
            for (auto& v : u) v = rng.uniform(-2.0, 2.0);

            std::vector<double> grad(prep.dim());
            prep.grad_log_density(u, grad);
            auto f = [&](const std::vector<double>& x) { return prep.log_density(x); };
            std::vector<double> fd = oracles::fd_gradient(f, u);
            for (std::size_t i = 0; i < u.size(); ++i) {
                double denom = std::max({std::abs(grad[i]), std::abs(fd[i]), 1e-3});
                CHECK(std::abs(grad[i] - fd[i]) / denom < 1e-5);
            }
        }
    }
}

TEST_CASE("flat-prior posterior peaks at the least-squares solution") {
    MonthlySeries s = demo_series(8, false);
    ModelSpec spec{ModelKind::MonthEffects, 1};
    DesignMatrix d = build_design(s, spec);
    Prior flat = Prior::near_flat();
    PreparedModel prep(d, flat, false);

    std::vector<double> ols = oracles::ols_coefficients(d);
    double rss = 0.0;
    for (std::size_t t = 0; t < d.n_rows; ++t) {
        double fit = 0.0;
        for (std::size_t j = 0; j < d.n_cols; ++j) fit += d.at(t, j) * ols[j];
        rss += (d.y[t] - fit) * (d.y[t] - fit);
    }

    ParameterDraw p = make_draw(ols, d, std::nullopt,
                                std::sqrt(rss / (static_cast<double>(d.n_rows) - 1.0)));
    std::vector<double> u = prep.to_unconstrained(p);
    std::vector<double> grad(prep.dim());
    prep.grad_log_density(u, grad);

    // coefficient gradient vanishes at the OLS optimum...
    for (std::size_t j = 0; j < prep.n_coef(); ++j) CHECK(std::abs(grad[j]) < 1e-6);
    // ...and the sigma gradient vanishes at the profile solution
    // sigma^2 = RSS/(N-1) (the -1 comes from the log-transform jacobian).
    CHECK(std::abs(grad[prep.dim() - 1]) < 1e-6);
}

TEST_CASE("with fixed rho the coefficient optimum is the gls solution") {
    MonthlySeries s = demo_series(9, false);
    ModelSpec spec{ModelKind::MonthEffectsAr1, 1};
    DesignMatrix d = build_design(s, spec);
    Prior flat = Prior::near_flat();
    PreparedModel prep(d, flat, true);

    double rho = 0.5;
    std::vector<double> gls = oracles::gls_coefficients(d, rho);
    ParameterDraw p = make_draw(gls, d, rho, 110.0);
    std::vector<double> u = prep.to_unconstrained(p);
    std::vector<double> grad(prep.dim());
    prep.grad_log_density(u, grad);
    for (std::size_t j = 0; j < prep.n_coef(); ++j) CHECK(std::abs(grad[j]) < 1e-6);
}

TEST_CASE("unconstrained mapping round-trips") {
    MonthlySeries s = demo_series(10, false);
    ModelSpec spec{ModelKind::MonthEffectsAr1, 1};
    DesignMatrix d = build_design(s, spec);
    PreparedModel prep(d, Prior::diffuse(), true);

    ParameterDraw p;
    p.alpha = 2600.0;
    p.theta.assign(11, -150.0);
    p.theta[3] = 40.0;
    p.rho = 0.35;
    p.sigma = 92.0;

    std::vector<double> u = prep.to_unconstrained(p);
    std::vector<double> raw = prep.raw_parameters(u);
    CHECK(raw[0] == doctest::Approx(p.alpha).epsilon(1e-12));
    CHECK(raw[4] == doctest::Approx(p.theta[3]).epsilon(1e-12));
    CHECK(raw[prep.n_coef()] == doctest::Approx(*p.rho).epsilon(1e-12));
    CHECK(raw.back() == doctest::Approx(p.sigma).epsilon(1e-12));
}

TEST_CASE("informative prior construction from reference years") {
    MonthlySeries s = demo_series(12, false);
    std::set<int> ref = {2010, 2011};
    Prior prior = derive_informative_prior(s, ref, 1);
    CHECK(prior.informative);

    double jan_mean = (s.at({2010, 1}) + s.at({2011, 1})) / 2.0;
    double sep_mean = (s.at({2010, 9}) + s.at({2011, 9})) / 2.0;
    const PriorComponent& alpha = prior.coef_overrides.at("alpha");
    CHECK(alpha.family == PriorComponent::Family::normal);
    CHECK(alpha.space == PriorComponent::Space::raw);
    CHECK(alpha.location == doctest::Approx(jan_mean));
    CHECK(prior.coef_overrides.at("theta_sep").location ==
          doctest::Approx(sep_mean - jan_mean));
    CHECK(alpha.scale > 0.0);
    // rho and sigma stay diffuse
    CHECK(prior.rho.family == PriorComponent::Family::student_t);
    CHECK(prior.sigma.scale == doctest::Approx(1.0));

    CHECK_THROWS_AS(derive_informative_prior(s, {2010}, 1), DataError);
    CHECK_THROWS_AS(derive_informative_prior(s, {2030, 2031}, 1), DataError);
}
