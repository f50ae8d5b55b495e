#include <doctest.h>

#include "excessd/figures.hpp"
#include "excessd/modelcomp.hpp"
#include "excessd/pipeline.hpp"

using namespace excessd;

namespace {

std::set<int> ref_years() { return {2010, 2011, 2012, 2013, 2014, 2015, 2016}; }

} // namespace

TEST_CASE("raw-series figure embeds the guide-line values") {
    MonthlySeries s = demo_series(71, true);
    std::string svg = figure_raw_series(s, ref_years(), 2017);
    CHECK(svg.rfind("<?xml", 0) == 0);
    // the comment block carries the sample mean and the mean + 2 sd guide
    auto mean_pos = svg.find("\nmean,");
    REQUIRE(mean_pos != std::string::npos);
    double mean = std::stod(svg.substr(mean_pos + 6));
    CHECK(mean == doctest::Approx(2448.5).epsilon(0.01));
    auto guide_pos = svg.find("mean_plus_2sd,");
    REQUIRE(guide_pos != std::string::npos);
    double guide = std::stod(svg.substr(guide_pos + 14));
    CHECK(guide == doctest::Approx(mean + 2.0 * 150.0).epsilon(0.05));
}

TEST_CASE("standardized figure shades the requested months") {
    MonthlySeries s = demo_series(72, true);
    MonthlyBaseline b = monthly_baseline(s, ref_years());
    StandardizedSeries z = standardize(s, b);
    std::vector<YearMonth> shaded;
    for (int m = 9; m <= 12; ++m) shaded.push_back({2017, m});
    std::string svg = figure_standardized(z, shaded);
    CHECK(svg.find("fill-opacity") != std::string::npos); // the shaded band
    CHECK(svg.find("2017,9,") != std::string::npos);      // data rows present
}

TEST_CASE("fit figure draws the identity line and the offset posteriors") {
    MonthlySeries s = demo_series(73, false);
    ModelSpec spec{ModelKind::MonthEffectsAr1, 1};
    SamplerConfig cfg;
    cfg.n_chains = 2;
    cfg.n_iterations = 200;
    cfg.n_warmup = 100;
    cfg.seed = 3;
    FitResult fr = fit_on_years(s, ref_years(), spec, Prior::diffuse(), cfg);
    std::vector<double> fitted = posterior_mean_fitted(fr.draws, fr.design);
    std::string svg = figure_fit(fr.design, fitted, fr.draws);
    CHECK(svg.find("observed vs fitted") != std::string::npos);
    CHECK(svg.find("theta_sep") != std::string::npos);
    CHECK(svg.find("posterior_mean:") != std::string::npos);

    std::vector<double> wrong(3, 0.0);
    CHECK_THROWS_AS(figure_fit(fr.design, wrong, fr.draws), UsageError);
}

TEST_CASE("excess-distribution figure needs at least one variant") {
    CHECK_THROWS_AS(figure_excess_distributions({}), DataError);
    std::vector<double> sums;
    for (int i = 0; i < 200; ++i) sums.push_back(900.0 + 5.0 * i);
    std::string svg = figure_excess_distributions({{"all baseline years", sums}});
    CHECK(svg.find("all baseline years") != std::string::npos);
}
