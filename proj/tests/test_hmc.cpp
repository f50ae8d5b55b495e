#include <doctest.h>

#include <cmath>

#include "excessd/diagnostics.hpp"
#include "excessd/pipeline.hpp"
#include "excessd/rng.hpp"

using namespace excessd;

namespace {

SamplerConfig config_of(int chains, int iterations, int warmup, std::uint64_t seed) {
    SamplerConfig c;
    c.n_chains = chains;
    c.n_iterations = iterations;
    c.n_warmup = warmup;
    c.seed = seed;
    return c;
}

/// Hand-assembled draws container for diagnostic-only tests.
PosteriorDraws fake_draws(const std::vector<std::vector<double>>& chain_values) {
    PosteriorDraws d;
    d.names = {"alpha"};
    for (const auto& c : chain_values) d.chains.push_back(c);
    return d;
}

MonthlySeries integer_series(const std::vector<double>& values, int start_year) {
    std::vector<MonthlySeries::Entry> entries;
    YearMonth ym{start_year, 1};
    for (double v : values) {
        entries.push_back({ym, static_cast<long>(std::llround(v))});
        ym = ym.next();
    }
    return MonthlySeries(std::move(entries), "hmc-test");
}

} // namespace

TEST_CASE("config validation") {
    SamplerConfig c = config_of(1, 100, 50, 1);
    CHECK_THROWS_AS(c.check(), UsageError); // r-hat needs >= 2 chains
    c = config_of(4, 100, 100, 1);
    CHECK_THROWS_AS(c.check(), UsageError); // warmup < iterations
    c = config_of(4, 100, 50, 1);
    CHECK_NOTHROW(c.check());
}

TEST_CASE("posterior of a known gaussian target is recovered") {
    // intercept-only model: with a near-flat prior the alpha posterior is
    // N(ybar, sigma^2/n) given sigma, so the posterior mean must sit within
    // Monte-Carlo error of the sample mean.
    Rng rng(3);
    std::vector<double> values;
    for (int i = 0; i < 48; ++i) values.push_back(1000.0 + 25.0 * rng.normal());
    MonthlySeries s = integer_series(values, 2010);

    ModelSpec spec{ModelKind::InterceptOnly, 1};
    FitResult fr = fit_on_years(s, {2010, 2011, 2012, 2013}, spec, Prior::near_flat(),
                                config_of(4, 800, 400, 11));

    double ybar = 0.0, ss = 0.0;
    for (const auto& e : s.entries()) ybar += static_cast<double>(e.count);
    ybar /= static_cast<double>(s.size());
    for (const auto& e : s.entries()) {
        double dlt = static_cast<double>(e.count) - ybar;
        ss += dlt * dlt;
    }
    double sample_sd = std::sqrt(ss / (static_cast<double>(s.size()) - 1.0));

    std::size_t a = fr.draws.param_index("alpha");
    std::size_t sg = fr.draws.param_index("sigma");
    double mcse_alpha = mcse_mean(fr.draws, a);
    double mcse_sigma = mcse_mean(fr.draws, sg);
    CHECK(std::abs(fr.draws.mean(a) - ybar) < 3.0 * mcse_alpha + 1e-9);
    CHECK(std::abs(fr.draws.mean(sg) - sample_sd) < 3.0 * mcse_sigma + 1.0);
    // posterior sd of alpha ~ sigma/sqrt(n)
    CHECK(fr.draws.sd(a) == doctest::Approx(sample_sd / std::sqrt(48.0)).epsilon(0.35));
}

TEST_CASE("chains satisfy parameter constraints in every retained draw") {
    MonthlySeries s = demo_series(31, false);
    ModelSpec spec{ModelKind::MonthEffectsAr1, 1};
    FitResult fr = fit_on_years(s, {2010, 2011, 2012, 2013, 2014, 2015, 2016}, spec,
                                Prior::diffuse(), config_of(2, 400, 200, 21));
    std::size_t rho_idx = fr.draws.param_index("rho");
    std::size_t sigma_idx = fr.draws.param_index("sigma");
    for (std::size_t c = 0; c < fr.draws.n_chains(); ++c)
        for (std::size_t d = 0; d < fr.draws.n_retained_per_chain(); ++d) {
            CHECK(fr.draws.value(c, d, sigma_idx) > 0.0);
            CHECK(std::abs(fr.draws.value(c, d, rho_idx)) < 1.0);
        }
    CHECK(fr.draws.n_retained_per_chain() == 200);
    CHECK(fr.draws.n_chains() == 2);
}

TEST_CASE("model 3 at moderate size converges with few divergences") {
    MonthlySeries s = demo_series(32, false);
    ModelSpec spec{ModelKind::MonthEffectsAr1, 1};
    FitResult fr = fit_on_years(s, {2010, 2011, 2012, 2013, 2014, 2015, 2016}, spec,
                                Prior::diffuse(), config_of(4, 1000, 500, 13));
    for (double r : fr.draws.diagnostics.rhat) CHECK(r < 1.02);
    CHECK(fr.draws.diagnostics.divergence_rate < 0.01);
}

TEST_CASE("split r-hat conventions") {
    // constant and equal chains: 1 by convention
    std::vector<double> flat(100, 5.0);
    PosteriorDraws d = fake_draws({flat, flat});
    CHECK(rhat(d, std::size_t{0}) == doctest::Approx(1.0));
    CHECK(ess(d, std::size_t{0}) == doctest::Approx(200.0));

    // far-separated chains: far above any threshold
    std::vector<double> lo(100), hi(100);
    Rng rng(8);
    for (int i = 0; i < 100; ++i) {
        lo[i] = -10.0 + 0.01 * rng.normal();
        hi[i] = 10.0 + 0.01 * rng.normal();
    }
    PosteriorDraws sep = fake_draws({lo, hi});
    CHECK(rhat(sep, std::size_t{0}) > 10.0);

    // iid chains from one distribution: close to 1
    auto iid_chain = [&](std::uint64_t seed) {
        Rng r(seed);
        std::vector<double> v(1000);
        for (auto& x : v) x = r.normal();
        return v;
    };
    PosteriorDraws iid = fake_draws({iid_chain(1), iid_chain(2), iid_chain(3), iid_chain(4)});
    CHECK(rhat(iid, std::size_t{0}) < 1.01);
    CHECK(ess(iid, std::size_t{0}) > 1200.0); // near the 4000 nominal draws

    CHECK_THROWS_AS(rhat(fake_draws({flat}), std::size_t{0}), DataError);
    PosteriorDraws tiny = fake_draws({{1.0, 2.0}, {1.0, 2.0}});
    CHECK_THROWS_AS(rhat(tiny, std::size_t{0}), DataError);
    CHECK_THROWS_AS(rhat(d, "not-a-param"), UsageError);
}

TEST_CASE("an informative prior pulls the intercept toward the reference mean") {
    // reference januaries sit at 3000, fitting-period januaries at 2500
    Rng rng(40);
    std::vector<MonthlySeries::Entry> entries;
    for (int y = 2010; y <= 2016; ++y)
        for (int m = 1; m <= 12; ++m) {
            long level = m == 1 ? (y <= 2011 ? 3000 : 2500) : 2400;
            entries.push_back({{y, m}, level + rng.uniform_int(-25, 25)});
        }
    MonthlySeries s(std::move(entries), "prior-shift");

    ModelSpec spec{ModelKind::MonthEffects, 1};
    SamplerConfig cfg = config_of(4, 800, 400, 55);
    std::set<int> fit_years = {2012, 2013, 2014, 2015, 2016};

    FitResult diffuse = fit_on_years(s, fit_years, spec, Prior::diffuse(), cfg);
    Prior informative = derive_informative_prior(s, {2010, 2011}, 1);
    FitResult informed = fit_on_years(s, fit_years, spec, informative, cfg);

    double prior_mean = informative.coef_overrides.at("alpha").location;
    CHECK(prior_mean > 2900.0);
    double a_diffuse = diffuse.draws.mean(diffuse.draws.param_index("alpha"));
    double a_informed = informed.draws.mean(informed.draws.param_index("alpha"));
    CHECK(std::abs(a_informed - prior_mean) < std::abs(a_diffuse - prior_mean));
    CHECK(a_informed > a_diffuse + 10.0);
}

TEST_CASE("draw accessors materialize parameter structs") {
    MonthlySeries s = demo_series(33, false);
    ModelSpec spec{ModelKind::MonthEffectsAr1, 1};
    FitResult fr = fit_on_years(s, {2010, 2011, 2012, 2013, 2014, 2015, 2016}, spec,
                                Prior::diffuse(), config_of(2, 80, 40, 3));
    ParameterDraw p = fr.draws.draw_at(0, 0);
    CHECK(p.theta.size() == 11);
    CHECK(p.rho.has_value());
    CHECK(p.sigma > 0.0);
    CHECK(!p.beta_lag.has_value());
    CHECK(fr.draws.fit_years() == std::set<int>{2010, 2011, 2012, 2013, 2014, 2015, 2016});
}
