// excessd: estimates excess events in monthly count series against Bayesian
// regression counterfactuals, with a placebo-test battery for validating
// the estimates. See README.md for a walkthrough.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "excessd/dataset.hpp"
#include "excessd/diagnostics.hpp"
#include "excessd/figures.hpp"
#include "excessd/kernels.hpp"
#include "excessd/manifest.hpp"
#include "excessd/modelcomp.hpp"
#include "excessd/pipeline.hpp"
#include "excessd/placebo.hpp"
#include "excessd/rng.hpp"
#include "excessd/serialize.hpp"
#include "excessd/version.hpp"

namespace x = excessd;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitConvergence = 4;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("EXCESSD_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 1;
}

std::string default_timestamp() {
    if (const char* env = std::getenv("EXCESSD_TIMESTAMP")) return env;
    return "";
}

struct CommonOpts {
    std::string csv;
    std::uint64_t seed = default_seed();
    int threads = 0;
    std::string timestamp = default_timestamp();
    bool strict = false;
};

struct SamplerOpts {
    int chains = 4;
    int iterations = 2000;
    int warmup = 1000;
    double target_accept = 0.8;
    int leapfrog = 32;
};

void add_common(CLI::App* cmd, CommonOpts& c, bool csv_required = true) {
    auto* opt = cmd->add_option("--csv", c.csv, "input csv (year,month,deaths with header)");
    if (csv_required) opt->required();
    cmd->add_option("--seed", c.seed, "rng seed (default: EXCESSD_SEED or 1)");
    cmd->add_option("--threads", c.threads, "worker threads (default: all cores)");
    cmd->add_option("--timestamp", c.timestamp,
                    "pin the manifest timestamp (default: EXCESSD_TIMESTAMP or now)");
    cmd->add_flag("--strict", c.strict, "exit 4 on convergence warnings");
}

void add_sampler(CLI::App* cmd, SamplerOpts& s) {
    cmd->add_option("--chains", s.chains, "number of chains");
    cmd->add_option("--iterations", s.iterations, "iterations per chain");
    cmd->add_option("--warmup", s.warmup, "warm-up iterations per chain");
    cmd->add_option("--target-accept", s.target_accept, "dual-averaging target");
    cmd->add_option("--leapfrog", s.leapfrog, "leapfrog steps (jittered +-20%)");
}

x::SamplerConfig make_config(const CommonOpts& c, const SamplerOpts& s) {
    x::SamplerConfig cfg;
    cfg.n_chains = s.chains;
    cfg.n_iterations = s.iterations;
    cfg.n_warmup = s.warmup;
    cfg.seed = c.seed;
    cfg.target_acceptance = s.target_accept;
    cfg.leapfrog_steps = s.leapfrog;
    cfg.n_threads = c.threads;
    return cfg;
}

std::set<int> to_set(const std::vector<int>& v) { return {v.begin(), v.end()}; }

std::set<int> resolve_fit_years(const x::MonthlySeries& series, const std::string& years_flag) {
    if (!years_flag.empty()) return to_set(x::parse_year_range(years_flag));
    std::vector<int> years = series.complete_years();
    if (years.empty()) throw x::DataError("series has no complete years to fit");
    return {years.begin(), years.end()};
}

int check_strict(const CommonOpts& c, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    if (c.strict && !warnings.empty()) {
        std::cerr << "exiting with status 4 (--strict and convergence warnings present)\n";
        return kExitConvergence;
    }
    return 0;
}

void write_text_file(const std::string& content, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw x::DataError("cannot open file for writing: " + path);
    out << content;
}

std::string excess_table(const x::ExcessEstimate& est) {
    std::ostringstream out;
    char buf[160];
    out << "window: " << est.window.front().str() << ":" << est.window.back().str()
        << "   model: " << est.model << "\n";

    auto rounded1 = [&](double v) {
        char b[32];
        std::snprintf(b, sizeof(b), "%.0f", x::round_to_unit(v, est.rounding_unit));
        return std::string(b);
    };
    auto rounded2 = [&](double lo, double hi) {
        char b[48];
        std::snprintf(b, sizeof(b), "%.0f;%.0f", x::round_to_unit(lo, est.rounding_unit),
                      x::round_to_unit(hi, est.rounding_unit));
        return std::string(b);
    };

    std::snprintf(buf, sizeof(buf), "%-10s", "");
    out << buf;
    for (const auto& md : est.months) {
        std::snprintf(buf, sizeof(buf), "%12s", md.ym.str().c_str());
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "%14s\n", "window");
    out << buf;

    auto row = [&](const char* name, const std::vector<std::string>& cells,
                   const std::string& window_cell) {
        std::snprintf(buf, sizeof(buf), "%-10s", name);
        out << buf;
        for (const auto& cell : cells) {
            std::snprintf(buf, sizeof(buf), "%12s", cell.c_str());
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), "%14s\n", window_cell.c_str());
        out << buf;
    };

    std::vector<std::string> centrals, ui50s, ui95s;
    for (const auto& md : est.months) {
        centrals.push_back(rounded1(md.central));
        ui50s.push_back(rounded2(md.lo50, md.hi50));
        ui95s.push_back(rounded2(md.lo95, md.hi95));
    }
    row("central", centrals, rounded1(est.central_raw));
    row("50% ui", ui50s, rounded2(est.ui50_raw.first, est.ui50_raw.second));
    row("95% ui", ui95s, rounded2(est.ui95_raw.first, est.ui95_raw.second));
    out << "(rounded to the nearest " << est.rounding_unit << ")\n";
    return out.str();
}

std::string placebo_table(const x::PlaceboReport& r) {
    std::ostringstream out;
    char buf[160];
    out << "scheme: " << r.scheme << "   model: " << r.model << "\n";
    if (!r.months.empty()) {
        std::snprintf(buf, sizeof(buf), "%-10s %10s %10s %10s %8s %12s\n", "month",
                      "observed", "lo95", "hi95", "inside", "exceedance");
        out << buf;
        for (const auto& f : r.months) {
            std::snprintf(buf, sizeof(buf), "%-10s %10.0f %10.1f %10.1f %8s %12.1f\n",
                          f.ym.str().c_str(), f.observed, f.lo95, f.hi95,
                          f.inside ? "yes" : "NO", f.exceedance);
            out << buf;
        }
    }
    if (!r.years.empty()) {
        std::snprintf(buf, sizeof(buf), "%-8s %14s %14s %18s %8s\n", "year", "sum error",
                      "|sum error|", "mean |error|/mo", "target");
        out << buf;
        for (const auto& ye : r.years) {
            std::snprintf(buf, sizeof(buf), "%-8d %14.1f %14.1f %18.1f %8s\n", ye.year,
                          ye.error, ye.abs_error, ye.per_month_mean_abs,
                          ye.is_target ? "*" : "");
            out << buf;
        }
    }
    if (r.ratio) {
        std::snprintf(buf, sizeof(buf), "ratio (target |sum error| vs comparison mean): %.2f\n",
                      *r.ratio);
        out << buf;
    } else if (!r.years.empty()) {
        out << "ratio: not applicable (comparison errors are numerically zero)\n";
    }
    if (r.ratio_per_month) {
        std::snprintf(buf, sizeof(buf), "ratio (per-month mean |error| basis): %.2f\n",
                      *r.ratio_per_month);
        out << buf;
    }
    return out.str();
}

// ---------------------------------------------------------------------------

int cmd_synth(const CommonOpts& c, const std::string& out_path, const std::string& years_flag,
              double serial_rho, bool append_2017) {
    std::set<int> years = years_flag.empty()
                              ? std::set<int>{2010, 2011, 2012, 2013, 2014, 2015, 2016}
                              : to_set(x::parse_year_range(years_flag));
    x::MonthlySeries series =
        x::synthesize_moment_matched(x::demo_baseline(), years, c.seed, serial_rho);
    if (append_2017) series = x::concat(series, x::demo_observed_2017());
    x::write_csv(series, out_path);
    std::cout << "wrote " << series.size() << " rows to " << out_path << " ("
              << x::fingerprint_file(out_path) << ")\n";
    return 0;
}

int cmd_summary(const CommonOpts& c, const std::string& years_flag, int target_year) {
    x::MonthlySeries series = x::load_csv(c.csv);
    std::vector<int> complete = series.complete_years();
    if (complete.empty()) throw x::DataError("no complete years in series");
    int target = target_year > 0 ? target_year : complete.back();
    std::set<int> years;
    if (!years_flag.empty()) {
        years = to_set(x::parse_year_range(years_flag));
    } else {
        for (int y : complete)
            if (y != target) years.insert(y);
    }
    x::MonthlyBaseline baseline = x::monthly_baseline(series, years);

    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-6s %14s %10d %12s\n", "month", "mean (sd)", target,
                  "difference");
    std::cout << buf;
    for (int m = 1; m <= 12; ++m) {
        const auto& cell = baseline.cell(m);
        if (series.contains({target, m})) {
            long obs = series.at({target, m});
            std::snprintf(buf, sizeof(buf), "%-6s %8.0f (%3.0f) %10ld %12lld\n",
                          x::month_name(m), cell.mu, cell.sigma, obs,
                          static_cast<long long>(
                              std::llround(static_cast<double>(obs) - cell.mu)));
        } else {
            std::snprintf(buf, sizeof(buf), "%-6s %8.0f (%3.0f) %10s %12s\n", x::month_name(m),
                          cell.mu, cell.sigma, "-", "-");
        }
        std::cout << buf;
    }
    return 0;
}

int cmd_fit(const CommonOpts& c, const SamplerOpts& s, int model_number,
            const std::string& years_flag, int baseline_month,
            const std::string& informative_years, bool with_loo,
            const std::string& out_draws, const std::string& out_summary) {
    x::MonthlySeries series = x::load_csv(c.csv);
    x::ModelSpec spec{x::model_kind_from_int(model_number), baseline_month};
    x::SamplerConfig config = make_config(c, s);

    std::set<int> fit_years = resolve_fit_years(series, years_flag);
    x::Prior prior = x::Prior::diffuse();
    if (!informative_years.empty()) {
        std::set<int> ref_years = to_set(x::parse_year_range(informative_years));
        prior = x::derive_informative_prior(series, ref_years, baseline_month);
        for (int y : ref_years) fit_years.erase(y); // reference data is not refit
        if (fit_years.empty())
            throw x::DataError("informative-prior years leave no fitting years");
    }

    x::FitResult fr = x::fit_on_years(series, fit_years, spec, prior, config);

    std::optional<std::pair<double, double>> loo;
    std::vector<std::string> loo_warnings;
    if (with_loo) {
        std::set<x::YearMonth> include = x::months_of_years(series, fit_years);
        loo = x::loo_ic(series, spec, prior, config, &include, &loo_warnings);
    }
    x::FitSummary summary = x::summarize_fit(fr.draws, fr.design, loo);
    summary.warnings.insert(summary.warnings.end(), loo_warnings.begin(), loo_warnings.end());
    std::cout << x::format_fit_table(summary);

    x::RunManifest manifest = x::make_manifest("fit", x::fingerprint_file(c.csv), spec, config,
                                               fr.draws.fit_years(), c.timestamp);
    if (!out_draws.empty()) {
        x::json j = x::to_json(fr.draws);
        j["manifest"] = x::to_json(manifest);
        x::write_json_file(j, out_draws);
    }
    if (!out_summary.empty()) {
        x::json j = x::to_json(summary);
        j["manifest"] = x::to_json(manifest);
        x::write_json_file(j, out_summary);
    }
    return check_strict(c, summary.warnings);
}

int cmd_excess(const CommonOpts& c, const SamplerOpts& s, const std::string& draws_path,
               int model_number, const std::string& years_flag, const std::string& window_flag,
               int rounding_unit, const std::vector<std::string>& exclude_flags,
               const std::string& informative_years, const std::string& out_path) {
    x::MonthlySeries series = x::load_csv(c.csv);
    std::vector<x::YearMonth> window = x::parse_month_window(window_flag);

    std::set<x::YearMonth> exclude;
    for (const auto& e : exclude_flags) exclude.insert(x::parse_year_month(e));

    x::ExcessEstimate est;
    x::ModelSpec spec;
    x::SamplerConfig config = make_config(c, s);
    std::vector<std::string> warnings;

    bool reuse_draws = !draws_path.empty() && exclude.empty() && informative_years.empty();
    if (reuse_draws) {
        x::PosteriorDraws draws = x::draws_from_json(x::parse_json_file(draws_path));
        spec = draws.spec;
        config = draws.config;
        config.n_threads = c.threads;
        est = x::run_excess(series, draws, window, rounding_unit);
        warnings = draws.diagnostics.warnings;
    } else {
        std::set<int> fit_years;
        if (!draws_path.empty()) {
            // reuse the stored fit's model, sampler settings and years
            x::PosteriorDraws draws = x::draws_from_json(x::parse_json_file(draws_path));
            spec = draws.spec;
            config = draws.config;
            config.n_threads = c.threads;
            fit_years = draws.fit_years();
        } else {
            spec = x::ModelSpec{x::model_kind_from_int(model_number), 1};
            fit_years = years_flag.empty() ? x::default_fit_years(series, window)
                                           : to_set(x::parse_year_range(years_flag));
        }
        x::Prior prior = x::Prior::diffuse();
        if (!informative_years.empty()) {
            std::set<int> ref_years = to_set(x::parse_year_range(informative_years));
            prior = x::derive_informative_prior(series, ref_years, spec.baseline_month);
            for (int y : ref_years) fit_years.erase(y);
            if (fit_years.empty())
                throw x::DataError("informative-prior years leave no fitting years");
        }
        x::FitResult fr = x::fit_on_years(series, fit_years, spec, prior, config, exclude);
        est = x::run_excess(series, fr.draws, window, rounding_unit);
        warnings = fr.draws.diagnostics.warnings;
    }

    std::cout << excess_table(est);
    if (!out_path.empty()) {
        x::RunManifest manifest = x::make_manifest("excess", x::fingerprint_file(c.csv), spec,
                                                   config, est.fit_years, c.timestamp);
        x::json j = x::to_json(est);
        j["manifest"] = x::to_json(manifest);
        x::write_json_file(j, out_path);
    }
    return check_strict(c, warnings);
}

std::set<int> parse_month_set(const std::string& flag) {
    auto parse_m = [](const std::string& s) {
        std::size_t pos = 0;
        int m = std::stoi(s, &pos);
        if (pos != s.size()) throw x::ParseError("bad month '" + s + "'");
        x::require_month(m);
        return m;
    };
    auto colon = flag.find(':');
    int lo, hi;
    if (colon == std::string::npos) {
        lo = hi = parse_m(flag);
    } else {
        lo = parse_m(flag.substr(0, colon));
        hi = parse_m(flag.substr(colon + 1));
    }
    if (hi < lo) throw x::ParseError("month range end precedes start in '" + flag + "'");
    std::set<int> out;
    for (int m = lo; m <= hi; ++m) out.insert(m);
    return out;
}

int cmd_placebo(const CommonOpts& c, const SamplerOpts& s, const std::string& scheme,
                int model_number, const std::string& window_flag, int target_year,
                const std::string& exclude_point, const std::string& out_path,
                int rounding_unit) {
    x::MonthlySeries series = x::load_csv(c.csv);
    x::ModelSpec spec{x::model_kind_from_int(model_number), 1};
    x::SamplerConfig config = make_config(c, s);
    x::Prior prior = x::Prior::diffuse();

    std::vector<int> complete = series.complete_years();
    if (complete.empty()) throw x::DataError("no complete years in series");
    int target = target_year > 0 ? target_year : complete.back();

    x::json out;
    std::string table;
    if (scheme == "within-ui") {
        x::PlaceboReport r = x::run_within_ui(series, spec, prior, config, target);
        table = placebo_table(r);
        out = x::to_json(r);
    } else if (scheme == "loyo") {
        std::set<int> months = parse_month_set(window_flag.empty() ? "9:10" : window_flag);
        x::PlaceboReport r = x::leave_one_year_out(series, spec, months, target, prior, config);
        table = placebo_table(r);
        out = x::to_json(r);
    } else if (scheme == "one-ahead") {
        std::set<int> months = parse_month_set(window_flag.empty() ? "9:10" : window_flag);
        x::PlaceboReport r = x::one_year_ahead(series, spec, months, prior, config, target);
        table = placebo_table(r);
        out = x::to_json(r);
    } else if (scheme == "exclude") {
        if (exclude_point.empty())
            throw x::UsageError("scheme 'exclude' needs --exclude-point YYYY-MM");
        if (window_flag.empty())
            throw x::UsageError("scheme 'exclude' needs --window YYYY-MM:YYYY-MM");
        std::vector<x::YearMonth> window = x::parse_month_window(window_flag);
        x::ExcessEstimate est =
            x::exclude_and_reestimate(series, spec, x::parse_year_month(exclude_point), window,
                                      prior, config, rounding_unit);
        table = excess_table(est);
        out = x::to_json(est);
    } else {
        throw x::UsageError("unknown scheme '" + scheme +
                            "' (within-ui | loyo | one-ahead | exclude)");
    }

    std::cout << table;
    if (!out_path.empty()) {
        x::RunManifest manifest = x::make_manifest("placebo", x::fingerprint_file(c.csv), spec,
                                                   config, {}, c.timestamp);
        out["manifest"] = x::to_json(manifest);
        x::write_json_file(out, out_path);
    }
    return 0;
}

int cmd_plot(const CommonOpts& c, int figure, const std::string& draws_path,
             const std::string& window_flag, int target_year, const std::string& out_path) {
    x::MonthlySeries series = x::load_csv(c.csv);
    std::vector<int> complete = series.complete_years();
    if (complete.empty()) throw x::DataError("no complete years in series");
    int target = target_year > 0 ? target_year : complete.back();
    std::set<int> baseline_years;
    for (int y : complete)
        if (y != target) baseline_years.insert(y);

    std::optional<x::PosteriorDraws> loaded;
    auto load_draws = [&]() -> const x::PosteriorDraws& {
        if (draws_path.empty())
            throw x::UsageError("figure " + std::to_string(figure) + " needs --draws");
        if (!loaded) loaded = x::draws_from_json(x::parse_json_file(draws_path));
        return *loaded;
    };

    std::string svg_doc;
    switch (figure) {
        case 1:
            svg_doc = x::figure_raw_series(series, baseline_years, target);
            break;
        case 2: {
            x::MonthlyBaseline baseline = x::monthly_baseline(series, baseline_years);
            x::StandardizedSeries z = x::standardize(series, baseline);
            std::vector<x::YearMonth> shaded;
            if (!window_flag.empty())
                shaded = x::parse_month_window(window_flag);
            else
                for (int m = 9; m <= 12; ++m) shaded.push_back({target, m});
            svg_doc = x::figure_standardized(z, shaded);
            break;
        }
        case 3: {
            const x::PosteriorDraws& draws = load_draws();
            std::set<x::YearMonth> include(draws.fit_months.begin(), draws.fit_months.end());
            x::DesignMatrix design = x::build_design(series, draws.spec, &include);
            std::vector<double> fitted = x::posterior_mean_fitted(draws, design);
            svg_doc = x::figure_fit(design, fitted, draws);
            break;
        }
        case 4: {
            const x::PosteriorDraws& draws = load_draws();
            x::SamplerConfig config = draws.config;
            config.n_threads = c.threads;
            std::vector<x::PredictionErrorPoint> points;

            x::PredictiveDistribution pred = x::predict_years(draws, series, {target});
            std::vector<x::YearMonth> target_months;
            for (int m = 1; m <= 12; ++m)
                if (series.contains({target, m})) target_months.push_back({target, m});
            std::vector<double> errs = x::prediction_errors(pred, series, target_months);
            for (std::size_t i = 0; i < target_months.size(); ++i)
                points.push_back({target_months[i], errs[i], true});

            // leave-one-year-out backcasts for the comparison years
            for (int y : draws.fit_years()) {
                std::set<int> fit_years = draws.fit_years();
                fit_years.erase(y);
                x::SamplerConfig cfg = config;
                cfg.seed =
                    x::derive_seed(config.seed, 0x10010ull + static_cast<std::uint64_t>(y));
                x::FitResult fr =
                    x::fit_on_years(series, fit_years, draws.spec, x::Prior::diffuse(), cfg);
                x::PredictiveDistribution py = x::predict_years(fr.draws, series, {y});
                std::vector<x::YearMonth> months;
                for (int m = 1; m <= 12; ++m)
                    if (series.contains({y, m})) months.push_back({y, m});
                std::vector<double> ye = x::prediction_errors(py, series, months);
                for (std::size_t i = 0; i < months.size(); ++i)
                    points.push_back({months[i], ye[i], false});
            }

            x::PlaceboReport within = x::within_ui_placebo(pred, series, target_months);
            svg_doc = x::figure_prediction_errors(points, within.months);
            break;
        }
        case 5: {
            const x::PosteriorDraws& draws = load_draws();
            x::SamplerConfig config = draws.config;
            config.n_threads = c.threads;
            std::vector<x::YearMonth> window;
            if (!window_flag.empty())
                window = x::parse_month_window(window_flag);
            else
                for (int m = 9; m <= 12; ++m) window.push_back({target, m});
            std::set<int> window_years;
            for (const auto& ym : window) window_years.insert(ym.year);

            std::vector<std::pair<std::string, std::vector<double>>> variants;
            x::PredictiveDistribution main_pred = x::predict_years(draws, series, window_years);
            variants.push_back(
                {"all baseline years", x::excess_sum_draws(main_pred, series, window)});
            std::set<int> fit_years = draws.fit_years();
            for (int y : fit_years) {
                if (y == *fit_years.rbegin()) break; // final baseline year stays in every fit
                std::set<int> reduced = fit_years;
                reduced.erase(y);
                x::SamplerConfig cfg = config;
                cfg.seed = x::derive_seed(config.seed, 0xF16ull + static_cast<std::uint64_t>(y));
                x::FitResult fr =
                    x::fit_on_years(series, reduced, draws.spec, x::Prior::diffuse(), cfg);
                x::PredictiveDistribution p = x::predict_years(fr.draws, series, window_years);
                variants.push_back(
                    {"without " + std::to_string(y), x::excess_sum_draws(p, series, window)});
            }
            svg_doc = x::figure_excess_distributions(variants);
            break;
        }
        default:
            throw x::UsageError("figure must be 1..5");
    }

    // every artifact carries its manifest; figures embed it as a comment
    std::optional<x::ModelSpec> model;
    std::optional<x::SamplerConfig> config;
    std::set<int> fit_years;
    if (loaded) {
        model = loaded->spec;
        config = loaded->config;
        fit_years = loaded->fit_years();
    }
    x::RunManifest manifest = x::make_manifest("plot", x::fingerprint_file(c.csv), model,
                                               config, fit_years, c.timestamp);
    std::string stamp = "<!--\nmanifest: " + x::dump_json(x::to_json(manifest)) + "-->\n</svg>";
    auto tail = svg_doc.rfind("</svg>");
    if (tail != std::string::npos) svg_doc.replace(tail, 6, stamp);

    std::string path =
        out_path.empty() ? ("figure" + std::to_string(figure) + ".svg") : out_path;
    write_text_file(svg_doc, path);
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_report(const CommonOpts& c, const std::vector<std::string>& excess_paths,
               const std::vector<std::string>& placebo_paths,
               const std::vector<std::string>& summary_paths, const std::string& out_path) {
    std::string combined;
    x::json excess_list = x::json::array();
    for (const auto& p : excess_paths) {
        x::json j = x::parse_json_file(p);
        x::excess_from_json(j); // schema check
        combined += x::dump_json(j);
        excess_list.push_back(j);
    }
    x::json placebo_list = x::json::array();
    for (const auto& p : placebo_paths) {
        x::json j = x::parse_json_file(p);
        combined += x::dump_json(j);
        placebo_list.push_back(j);
    }
    x::json summary_list = x::json::array();
    for (const auto& p : summary_paths) {
        x::json j = x::parse_json_file(p);
        x::fit_summary_from_json(j);
        combined += x::dump_json(j);
        summary_list.push_back(j);
    }

    x::RunManifest manifest = x::make_manifest("report", x::fingerprint_bytes(combined),
                                               std::nullopt, std::nullopt, {}, c.timestamp);
    x::json report{
        {"schema", "excessd/report/v1"},
        {"manifest", x::to_json(manifest)},
        {"excess", excess_list},
        {"placebo", placebo_list.empty() ? x::json("not run") : x::json(placebo_list)},
        {"model_comparison",
         summary_list.empty() ? x::json("not run") : x::json(summary_list)},
        {"published_comparisons", x::published_comparisons()}};

    std::cout << "report: " << excess_paths.size() << " excess estimate(s), "
              << placebo_paths.size() << " placebo report(s), " << summary_paths.size()
              << " fit summary(ies)\n";
    for (const auto& j : excess_list) {
        x::ExcessEstimate est = x::excess_from_json(j);
        std::cout << "  " << est.window.front().str() << ":" << est.window.back().str()
                  << "  central " << est.central << "  95% ui [" << est.ui95.first << "; "
                  << est.ui95.second << "]\n";
    }
    std::cout << "published comparisons:\n";
    for (const auto& row : x::published_comparisons()["rows"]) {
        std::cout << "  " << row["study"].get<std::string>() << ": "
                  << row["estimate"].get<double>();
        if (!row["ui95"].is_null())
            std::cout << " [" << row["ui95"][0].get<double>() << "; "
                      << row["ui95"][1].get<double>() << "]";
        std::cout << "\n";
    }
    if (!out_path.empty()) x::write_json_file(report, out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"excess-event estimation for monthly count series "
                 "(Bayesian regression counterfactuals + placebo tests)"};
    app.set_version_flag("--version", excessd::kVersion);
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "write a moment-matched synthetic dataset");
    CommonOpts synth_c;
    std::string synth_out, synth_years;
    double synth_rho = 0.5;
    bool synth_2017 = false;
    add_common(synth, synth_c, false);
    synth->add_option("--out", synth_out, "output csv path")->required();
    synth->add_option("--years", synth_years, "years to synthesize (default 2010:2016)");
    synth->add_option("--serial-rho", synth_rho, "serial correlation of the base draws");
    synth->add_flag("--append-2017", synth_2017, "append the bundled 2017 observations");

    auto* summary = app.add_subcommand("summary", "per-month baseline table for a csv");
    CommonOpts summary_c;
    std::string summary_years;
    int summary_target = 0;
    add_common(summary, summary_c);
    summary->add_option("--years", summary_years, "baseline years (default: all but target)");
    summary->add_option("--target-year", summary_target, "comparison year (default: last)");

    auto* fit = app.add_subcommand("fit", "fit a model and write draws + summary");
    CommonOpts fit_c;
    SamplerOpts fit_s;
    int fit_model = 3, fit_baseline_month = 1;
    std::string fit_years, fit_informative, fit_out_draws, fit_out_summary;
    bool fit_loo = false;
    add_common(fit, fit_c);
    add_sampler(fit, fit_s);
    fit->add_option("--model", fit_model, "model number 1..4")->required();
    fit->add_option("--years", fit_years, "fitting years YYYY:YYYY (default: complete years)");
    fit->add_option("--baseline-month", fit_baseline_month, "omitted month dummy (default 1)");
    fit->add_option("--informative-prior", fit_informative,
                    "derive month-mean priors from these years and fit on the rest");
    fit->add_flag("--loo", fit_loo, "compute the leave-one-out information criterion");
    fit->add_option("--out-draws", fit_out_draws, "draws json path");
    fit->add_option("--out-summary", fit_out_summary, "summary json path");

    auto* excess_cmd = app.add_subcommand("excess", "excess estimate over a month window");
    CommonOpts excess_c;
    SamplerOpts excess_s;
    std::string excess_draws, excess_window, excess_years, excess_informative, excess_out;
    std::vector<std::string> excess_exclude;
    int excess_model = 3, excess_round = 10;
    add_common(excess_cmd, excess_c);
    add_sampler(excess_cmd, excess_s);
    excess_cmd->add_option("--draws", excess_draws, "draws json from a previous fit");
    excess_cmd->add_option("--model", excess_model, "model number 1..4 (when refitting)");
    excess_cmd->add_option("--years", excess_years, "fitting years (when refitting)");
    excess_cmd->add_option("--window", excess_window, "window YYYY-MM:YYYY-MM")->required();
    excess_cmd->add_option("--round", excess_round, "rounding unit for display (default 10)");
    excess_cmd->add_option("--exclude", excess_exclude,
                           "exclude observation(s) YYYY-MM from the fit (repeatable)");
    excess_cmd->add_option("--informative-prior", excess_informative,
                           "derive month-mean priors from these years and refit on the rest");
    excess_cmd->add_option("--out", excess_out, "output json path");

    auto* placebo = app.add_subcommand("placebo", "placebo-test battery");
    CommonOpts placebo_c;
    SamplerOpts placebo_s;
    std::string placebo_scheme, placebo_window, placebo_exclude, placebo_out;
    int placebo_model = 3, placebo_target = 0, placebo_round = 10;
    add_common(placebo, placebo_c);
    add_sampler(placebo, placebo_s);
    placebo->add_option("--scheme", placebo_scheme, "within-ui | loyo | one-ahead | exclude")
        ->required();
    placebo->add_option("--model", placebo_model, "model number 1..4 (default 3)");
    placebo->add_option("--window", placebo_window,
                        "months MM:MM for loyo/one-ahead, YYYY-MM:YYYY-MM for exclude");
    placebo->add_option("--target-year", placebo_target,
                        "target year (default: last complete)");
    placebo->add_option("--exclude-point", placebo_exclude, "observation YYYY-MM to exclude");
    placebo->add_option("--round", placebo_round, "rounding unit for the exclude scheme");
    placebo->add_option("--out", placebo_out, "output json path");

    auto* plot = app.add_subcommand("plot", "emit a figure as svg");
    CommonOpts plot_c;
    SamplerOpts plot_s;
    int plot_figure = 1, plot_target = 0;
    std::string plot_draws, plot_window, plot_out;
    add_common(plot, plot_c);
    add_sampler(plot, plot_s);
    plot->add_option("--figure", plot_figure, "figure number 1..5")->required();
    plot->add_option("--draws", plot_draws, "draws json (figures 3-5)");
    plot->add_option("--window", plot_window, "window override for figures 2 and 5");
    plot->add_option("--target-year", plot_target, "target year (default: last complete)");
    plot->add_option("--out", plot_out, "output svg path");

    auto* report = app.add_subcommand("report", "merge artifacts into one report");
    CommonOpts report_c;
    std::vector<std::string> report_excess, report_placebo, report_summaries;
    std::string report_out;
    add_common(report, report_c, false);
    report->add_option("--excess", report_excess, "excess json artifact(s)")->required();
    report->add_option("--placebo", report_placebo, "placebo json artifact(s)");
    report->add_option("--summary", report_summaries, "fit summary artifact(s)");
    report->add_option("--out", report_out, "output json path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed())
            return cmd_synth(synth_c, synth_out, synth_years, synth_rho, synth_2017);
        if (summary->parsed()) return cmd_summary(summary_c, summary_years, summary_target);
        if (fit->parsed())
            return cmd_fit(fit_c, fit_s, fit_model, fit_years, fit_baseline_month,
                           fit_informative, fit_loo, fit_out_draws, fit_out_summary);
        if (excess_cmd->parsed())
            return cmd_excess(excess_c, excess_s, excess_draws, excess_model, excess_years,
                              excess_window, excess_round, excess_exclude, excess_informative,
                              excess_out);
        if (placebo->parsed())
            return cmd_placebo(placebo_c, placebo_s, placebo_scheme, placebo_model,
                               placebo_window, placebo_target, placebo_exclude, placebo_out,
                               placebo_round);
        if (plot->parsed())
            return cmd_plot(plot_c, plot_figure, plot_draws, plot_window, plot_target, plot_out);
        if (report->parsed())
            return cmd_report(report_c, report_excess, report_placebo, report_summaries,
                              report_out);
    } catch (const excessd::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const excessd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
