#include <doctest.h>

#include <cmath>

#include "excessd/modelcomp.hpp"
#include "excessd/pipeline.hpp"
#include "excessd/rng.hpp"
#include "oracles.hpp"

using namespace excessd;

namespace {

SamplerConfig loo_config(std::uint64_t seed, int iters = 500) {
    SamplerConfig c;
    c.n_chains = 2;
    c.n_iterations = iters;
    c.n_warmup = iters / 2;
    c.seed = seed;
    return c;
}

/// Draws with a single hand-picked parameter vector.
PosteriorDraws exact_draws(const DesignMatrix& design, ModelKind kind,
                           const std::vector<double>& coef, std::optional<double> rho,
                           double sigma) {
    PosteriorDraws d;
    d.spec = {kind, 1};
    d.names = design.column_names;
    if (rho) d.names.push_back("rho");
    d.names.push_back("sigma");
    std::vector<double> row = coef;
    if (rho) row.push_back(*rho);
    row.push_back(sigma);
    d.chains.push_back(row);
    return d;
}

MonthlySeries pattern_series(int n_months, std::uint64_t seed, long base = 2400,
                             double spread = 100.0) {
    Rng rng(seed);
    std::vector<MonthlySeries::Entry> entries;
    YearMonth ym{2010, 1};
    for (int i = 0; i < n_months; ++i) {
        entries.push_back({ym, base + static_cast<long>(std::llround(spread * rng.normal()))});
        ym = ym.next();
    }
    return MonthlySeries(std::move(entries), "pattern");
}

} // namespace

TEST_CASE("a perfect fit has zero rmse") {
    // outcome exactly equal to the month pattern the coefficients encode
    std::vector<MonthlySeries::Entry> entries;
    for (int y = 0; y < 3; ++y)
        for (int m = 1; m <= 12; ++m)
            entries.push_back({{2010 + y, m}, 2000 + 10 * m});
    MonthlySeries s(std::move(entries), "exact");
    DesignMatrix design = build_design(s, {ModelKind::MonthEffects, 1});

    std::vector<double> coef(12, 0.0);
    coef[0] = 2010.0; // january level
    for (int j = 1; j <= 11; ++j) coef[static_cast<std::size_t>(j)] = 10.0 * j;
    PosteriorDraws d = exact_draws(design, ModelKind::MonthEffects, coef, std::nullopt, 1.0);
    CHECK(rmse(d, design) == doctest::Approx(0.0).epsilon(1e-12));

    // the ar1 carry keeps a perfect fit perfect (residuals stay zero)
    PosteriorDraws d3 = exact_draws(design, ModelKind::MonthEffectsAr1, coef, 0.6, 1.0);
    CHECK(rmse(d3, design) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("an identically zero predictor leaves rmse unchanged") {
    MonthlySeries s = pattern_series(36, 2);
    DesignMatrix design = build_design(s, {ModelKind::InterceptOnly, 1});
    PosteriorDraws d = exact_draws(design, ModelKind::InterceptOnly, {2400.0}, std::nullopt, 50.0);
    double base_rmse = rmse(d, design);

    DesignMatrix padded = design;
    padded.n_cols = 2;
    padded.column_names.push_back("theta_feb"); // name only; the column is zero
    padded.column_kinds.push_back(ColumnKind::month_dummy);
    padded.x.clear();
    for (std::size_t t = 0; t < design.n_rows; ++t) {
        padded.x.push_back(1.0);
        padded.x.push_back(0.0);
    }
    PosteriorDraws d2 =
        exact_draws(padded, ModelKind::MonthEffects, {2400.0, 123.0}, std::nullopt, 50.0);
    CHECK(rmse(d2, padded) == doctest::Approx(base_rmse).epsilon(1e-12));
}

TEST_CASE("ar1 fitted values carry the one-step residual") {
    MonthlySeries s = pattern_series(30, 9);
    DesignMatrix design = build_design(s, {ModelKind::InterceptOnly, 1});
    double rho = 0.5, alpha = 2400.0;
    PosteriorDraws d = exact_draws(design, ModelKind::MonthEffectsAr1, {alpha}, rho, 40.0);
    std::vector<double> fitted = posterior_mean_fitted(d, design);
    CHECK(fitted[0] == doctest::Approx(alpha));
    for (std::size_t t = 1; t < design.n_rows; ++t)
        CHECK(fitted[t] == doctest::Approx(alpha + rho * (design.y[t - 1] - alpha)));
}

TEST_CASE("loo-ic approximates the analytic gaussian deviance") {
    // near-standard-normal outcome around a large level; expected deviance
    // is about N (log(2 pi sig^2) + 1)
    Rng rng(15);
    std::vector<MonthlySeries::Entry> entries;
    YearMonth ym{2010, 1};
    const long level = 10000;
    for (int i = 0; i < 50; ++i) {
        entries.push_back({ym, level + static_cast<long>(std::llround(rng.normal()))});
        ym = ym.next();
    }
    MonthlySeries s(std::move(entries), "gauss");

    auto [value, se] = loo_ic(s, {ModelKind::InterceptOnly, 1}, Prior::near_flat(),
                              loo_config(3, 400));
    // integer rounding inflates the unit variance to about 1 + 1/12
    double sig2 = 1.0 + 1.0 / 12.0;
    double expected = 50.0 * (std::log(2.0 * 3.14159265358979323846 * sig2) + 1.0);
    CHECK(std::abs(value - expected) < 3.0 * se + 6.0);
    CHECK(se > 0.0);
}

TEST_CASE("duplicating the data roughly doubles loo-ic") {
    MonthlySeries s24 = pattern_series(24, 8);
    std::vector<MonthlySeries::Entry> doubled = s24.entries();
    YearMonth ym = s24.last().next();
    for (const auto& e : s24.entries()) {
        doubled.push_back({ym, e.count});
        ym = ym.next();
    }
    MonthlySeries s48(std::move(doubled), "doubled");

    auto [v24, se24] = loo_ic(s24, {ModelKind::InterceptOnly, 1}, Prior::diffuse(),
                              loo_config(5, 400));
    auto [v48, se48] = loo_ic(s48, {ModelKind::InterceptOnly, 1}, Prior::diffuse(),
                              loo_config(5, 400));
    CHECK(std::abs(v48 - 2.0 * v24) < 3.0 * (se48 + 2.0 * se24));
}

TEST_CASE("exact-refit loo matches the closed-form flat-prior predictive") {
    MonthlySeries s = pattern_series(24, 21);
    ModelSpec spec{ModelKind::InterceptOnly, 1};
    DesignMatrix design = build_design(s, spec);

    double analytic = 0.0;
    for (std::size_t t = 0; t < design.n_rows; ++t)
        analytic += oracles::analytic_loo_lpd(design, t);

    auto [value, se] = loo_ic(s, spec, Prior::near_flat(), loo_config(7, 600));
    CHECK(std::abs(value - (-2.0 * analytic)) < 2.5);
    CHECK(se > 0.0);
}

TEST_CASE("fit summary carries parameters, rmse and n") {
    MonthlySeries s = demo_series(61, false);
    ModelSpec spec{ModelKind::MonthEffectsAr1, 1};
    FitResult fr = fit_on_years(s, {2010, 2011, 2012, 2013, 2014, 2015, 2016}, spec,
                                Prior::diffuse(), loo_config(31, 400));
    FitSummary summary = summarize_fit(fr.draws, fr.design, std::make_pair(1040.0, 17.0));
    CHECK(summary.model == std::string("month-effects-ar1"));
    CHECK(summary.n == 84);
    CHECK(summary.params.size() == 14);
    CHECK(summary.rmse > 0.0);
    REQUIRE(summary.loo_ic.has_value());
    CHECK(summary.loo_ic->first == 1040.0);
    std::string table = format_fit_table(summary);
    CHECK(table.find("rmse") != std::string::npos);
    CHECK(table.find("theta_sep") != std::string::npos);
}
