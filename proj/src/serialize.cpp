#include "excessd/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace excessd {

json json_num(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

double num_or_nan(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

namespace {

json pair_to_json(const std::pair<double, double>& p) {
    return json::array({json_num(p.first), json_num(p.second)});
}

std::pair<double, double> pair_from_json(const json& j) {
    return {num_or_nan(j.at(0)), num_or_nan(j.at(1))};
}

json opt_to_json(const std::optional<double>& v) {
    return v ? json_num(*v) : json(nullptr);
}

std::optional<double> opt_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json years_to_json(const std::set<int>& years) {
    json out = json::array();
    for (int y : years) out.push_back(y);
    return out;
}

std::set<int> years_from_json(const json& j) {
    std::set<int> out;
    for (const auto& v : j) out.insert(v.get<int>());
    return out;
}

} // namespace

json to_json(const ModelSpec& spec) {
    return json{{"kind", static_cast<int>(spec.kind)},
                {"label", model_label(spec.kind)},
                {"baseline_month", spec.baseline_month}};
}

ModelSpec model_spec_from_json(const json& j) {
    ModelSpec spec;
    spec.kind = model_kind_from_int(j.at("kind").get<int>());
    spec.baseline_month = j.at("baseline_month").get<int>();
    return spec;
}

json to_json(const SamplerConfig& config) {
    return json{{"chains", config.n_chains},
                {"iterations", config.n_iterations},
                {"warmup", config.n_warmup},
                {"seed", config.seed},
                {"target_acceptance", config.target_acceptance},
                {"leapfrog_steps", config.leapfrog_steps}};
}

SamplerConfig sampler_config_from_json(const json& j) {
    SamplerConfig c;
    c.n_chains = j.at("chains").get<int>();
    c.n_iterations = j.at("iterations").get<int>();
    c.n_warmup = j.at("warmup").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.target_acceptance = j.at("target_acceptance").get<double>();
    c.leapfrog_steps = j.at("leapfrog_steps").get<int>();
    return c;
}

json to_json(const RunManifest& m) {
    return json{{"command", m.command},
                {"dataset", m.dataset_fingerprint},
                {"model", m.model ? to_json(*m.model) : json(nullptr)},
                {"sampler", m.sampler ? to_json(*m.sampler) : json(nullptr)},
                {"fit_years", years_to_json(m.fit_years)},
                {"version", m.version},
                {"timestamp", m.timestamp}};
}

RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.dataset_fingerprint = j.at("dataset").get<std::string>();
    if (!j.at("model").is_null()) m.model = model_spec_from_json(j.at("model"));
    if (!j.at("sampler").is_null()) m.sampler = sampler_config_from_json(j.at("sampler"));
    m.fit_years = years_from_json(j.at("fit_years"));
    m.version = j.at("version").get<std::string>();
    m.timestamp = j.at("timestamp").get<std::string>();
    return m;
}

json to_json(const PosteriorDraws& draws) {
    json chains = json::array();
    for (const auto& chain : draws.chains) {
        json chain_json = json::array();
        std::size_t n_params = draws.n_params();
        for (std::size_t d = 0; d * n_params < chain.size(); ++d) {
            json row = json::array();
            for (std::size_t p = 0; p < n_params; ++p)
                row.push_back(json_num(chain[d * n_params + p]));
            chain_json.push_back(std::move(row));
        }
        chains.push_back(std::move(chain_json));
    }

    json months = json::array();
    for (const auto& ym : draws.fit_months) months.push_back(ym.str());

    json rhat = json::array(), ess_j = json::array();
    for (double v : draws.diagnostics.rhat) rhat.push_back(json_num(v));
    for (double v : draws.diagnostics.ess) ess_j.push_back(json_num(v));
    json step = json::array(), acc = json::array();
    for (double v : draws.diagnostics.step_size) step.push_back(json_num(v));
    for (double v : draws.diagnostics.accept_rate) acc.push_back(json_num(v));

    return json{{"schema", "excessd/draws/v1"},
                {"model", to_json(draws.spec)},
                {"sampler", to_json(draws.config)},
                {"standardization", {{"mean", json_num(draws.scale.mean)},
                                     {"sd", json_num(draws.scale.sd)}}},
                {"parameters", draws.names},
                {"fit_months", months},
                {"chains", chains},
                {"diagnostics",
                 {{"rhat", rhat},
                  {"ess", ess_j},
                  {"divergence_rate", json_num(draws.diagnostics.divergence_rate)},
                  {"step_size", step},
                  {"accept_rate", acc},
                  {"warnings", draws.diagnostics.warnings}}}};
}

PosteriorDraws draws_from_json(const json& j) {
    if (j.value("schema", "") != "excessd/draws/v1")
        throw ParseError("not a draws file (schema mismatch)");
    PosteriorDraws d;
    d.spec = model_spec_from_json(j.at("model"));
    d.config = sampler_config_from_json(j.at("sampler"));
    d.scale.mean = num_or_nan(j.at("standardization").at("mean"));
    d.scale.sd = num_or_nan(j.at("standardization").at("sd"));
    d.names = j.at("parameters").get<std::vector<std::string>>();
    for (const auto& s : j.at("fit_months"))
        d.fit_months.push_back(parse_year_month(s.get<std::string>()));
    for (const auto& chain_json : j.at("chains")) {
        std::vector<double> chain;
        for (const auto& row : chain_json) {
            if (row.size() != d.names.size())
                throw ParseError("draw length does not match parameter list");
            for (const auto& v : row) chain.push_back(num_or_nan(v));
        }
        d.chains.push_back(std::move(chain));
    }
    const json& diag = j.at("diagnostics");
    for (const auto& v : diag.at("rhat")) d.diagnostics.rhat.push_back(num_or_nan(v));
    for (const auto& v : diag.at("ess")) d.diagnostics.ess.push_back(num_or_nan(v));
    d.diagnostics.divergence_rate = num_or_nan(diag.at("divergence_rate"));
    for (const auto& v : diag.at("step_size")) d.diagnostics.step_size.push_back(num_or_nan(v));
    for (const auto& v : diag.at("accept_rate")) d.diagnostics.accept_rate.push_back(num_or_nan(v));
    d.diagnostics.warnings = diag.at("warnings").get<std::vector<std::string>>();
    return d;
}

json to_json(const ExcessEstimate& est) {
    json window = json::array();
    for (const auto& ym : est.window) window.push_back(ym.str());
    json months = json::array();
    for (const auto& md : est.months)
        months.push_back(json{{"month", md.ym.str()},
                              {"central", json_num(md.central)},
                              {"lo50", json_num(md.lo50)},
                              {"hi50", json_num(md.hi50)},
                              {"lo95", json_num(md.lo95)},
                              {"hi95", json_num(md.hi95)}});
    return json{{"schema", "excessd/excess/v1"},
                {"window", window},
                {"rounding_unit", est.rounding_unit},
                {"central", json_num(est.central)},
                {"ui50", pair_to_json(est.ui50)},
                {"ui95", pair_to_json(est.ui95)},
                {"central_raw", json_num(est.central_raw)},
                {"ui50_raw", pair_to_json(est.ui50_raw)},
                {"ui95_raw", pair_to_json(est.ui95_raw)},
                {"ui50_joint", pair_to_json(est.ui50_joint)},
                {"ui95_joint", pair_to_json(est.ui95_joint)},
                {"months", months},
                {"model", est.model},
                {"fit_years", years_to_json(est.fit_years)},
                {"seed", est.seed}};
}

ExcessEstimate excess_from_json(const json& j) {
    if (j.value("schema", "") != "excessd/excess/v1")
        throw ParseError("not an excess estimate file (schema mismatch)");
    ExcessEstimate est;
    for (const auto& s : j.at("window")) est.window.push_back(parse_year_month(s.get<std::string>()));
    est.rounding_unit = j.at("rounding_unit").get<int>();
    est.central = num_or_nan(j.at("central"));
    est.ui50 = pair_from_json(j.at("ui50"));
    est.ui95 = pair_from_json(j.at("ui95"));
    est.central_raw = num_or_nan(j.at("central_raw"));
    est.ui50_raw = pair_from_json(j.at("ui50_raw"));
    est.ui95_raw = pair_from_json(j.at("ui95_raw"));
    est.ui50_joint = pair_from_json(j.at("ui50_joint"));
    est.ui95_joint = pair_from_json(j.at("ui95_joint"));
    for (const auto& m : j.at("months")) {
        ExcessEstimate::MonthDetail md;
        md.ym = parse_year_month(m.at("month").get<std::string>());
        md.central = num_or_nan(m.at("central"));
        md.lo50 = num_or_nan(m.at("lo50"));
        md.hi50 = num_or_nan(m.at("hi50"));
        md.lo95 = num_or_nan(m.at("lo95"));
        md.hi95 = num_or_nan(m.at("hi95"));
        est.months.push_back(md);
    }
    est.model = j.at("model").get<std::string>();
    est.fit_years = years_from_json(j.at("fit_years"));
    est.seed = j.at("seed").get<std::uint64_t>();
    return est;
}

json to_json(const PlaceboReport& report) {
    json months = json::array();
    for (const auto& f : report.months)
        months.push_back(json{{"month", f.ym.str()},
                              {"inside", f.inside},
                              {"exceedance", json_num(f.exceedance)},
                              {"observed", json_num(f.observed)},
                              {"lo95", json_num(f.lo95)},
                              {"hi95", json_num(f.hi95)},
                              {"pred_mean", json_num(f.pred_mean)}});
    json years = json::array();
    for (const auto& ye : report.years)
        years.push_back(json{{"year", ye.year},
                             {"is_target", ye.is_target},
                             {"error", json_num(ye.error)},
                             {"abs_error", json_num(ye.abs_error)},
                             {"per_month_mean_abs", json_num(ye.per_month_mean_abs)},
                             {"seed", ye.seed}});
    return json{{"schema", "excessd/placebo/v1"},
                {"scheme", report.scheme},
                {"months", months},
                {"years", years},
                {"target_abs_error", opt_to_json(report.target_abs_error)},
                {"comparison_mean_abs_error", opt_to_json(report.comparison_mean_abs_error)},
                {"ratio", opt_to_json(report.ratio)},
                {"ratio_per_month", opt_to_json(report.ratio_per_month)},
                {"model", report.model},
                {"seed", report.seed}};
}

PlaceboReport placebo_from_json(const json& j) {
    if (j.value("schema", "") != "excessd/placebo/v1")
        throw ParseError("not a placebo report file (schema mismatch)");
    PlaceboReport r;
    r.scheme = j.at("scheme").get<std::string>();
    for (const auto& m : j.at("months")) {
        PlaceboReport::MonthFlag f;
        f.ym = parse_year_month(m.at("month").get<std::string>());
        f.inside = m.at("inside").get<bool>();
        f.exceedance = num_or_nan(m.at("exceedance"));
        f.observed = num_or_nan(m.at("observed"));
        f.lo95 = num_or_nan(m.at("lo95"));
        f.hi95 = num_or_nan(m.at("hi95"));
        f.pred_mean = num_or_nan(m.at("pred_mean"));
        r.months.push_back(f);
    }
    for (const auto& y : j.at("years")) {
        PlaceboReport::YearError ye;
        ye.year = y.at("year").get<int>();
        ye.is_target = y.at("is_target").get<bool>();
        ye.error = num_or_nan(y.at("error"));
        ye.abs_error = num_or_nan(y.at("abs_error"));
        ye.per_month_mean_abs = num_or_nan(y.at("per_month_mean_abs"));
        ye.seed = y.at("seed").get<std::uint64_t>();
        r.years.push_back(ye);
    }
    r.target_abs_error = opt_from_json(j.at("target_abs_error"));
    r.comparison_mean_abs_error = opt_from_json(j.at("comparison_mean_abs_error"));
    r.ratio = opt_from_json(j.at("ratio"));
    r.ratio_per_month = opt_from_json(j.at("ratio_per_month"));
    r.model = j.at("model").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

json to_json(const FitSummary& summary) {
    json params = json::array();
    for (const auto& p : summary.params)
        params.push_back(json{{"name", p.name},
                              {"mean", json_num(p.mean)},
                              {"sd", json_num(p.sd)}});
    json loo = nullptr;
    if (summary.loo_ic)
        loo = json::array({json_num(summary.loo_ic->first), json_num(summary.loo_ic->second)});
    return json{{"schema", "excessd/summary/v1"},
                {"model", summary.model},
                {"params", params},
                {"rmse", json_num(summary.rmse)},
                {"loo_ic", loo},
                {"n", summary.n},
                {"warnings", summary.warnings}};
}

FitSummary fit_summary_from_json(const json& j) {
    if (j.value("schema", "") != "excessd/summary/v1")
        throw ParseError("not a fit summary file (schema mismatch)");
    FitSummary s;
    s.model = j.at("model").get<std::string>();
    for (const auto& p : j.at("params"))
        s.params.push_back({p.at("name").get<std::string>(), num_or_nan(p.at("mean")),
                            num_or_nan(p.at("sd"))});
    s.rmse = num_or_nan(j.at("rmse"));
    if (!j.at("loo_ic").is_null())
        s.loo_ic = std::make_pair(num_or_nan(j.at("loo_ic").at(0)),
                                  num_or_nan(j.at("loo_ic").at(1)));
    s.n = j.at("n").get<std::size_t>();
    s.warnings = j.at("warnings").get<std::vector<std::string>>();
    return s;
}

json published_comparisons() {
    json rows = json::array();
    auto row = [](const char* study, double estimate, json ui) {
        return json{{"study", study}, {"estimate", estimate}, {"ui95", std::move(ui)}};
    };
    rows.push_back(row("Santos-Lozada & Howard (2018)", 1110, nullptr));
    rows.push_back(row("Robles et al. (2017)", 1052, nullptr));
    rows.push_back(row("Rivera & Rolke (2018)", 822, json::array({605, 1039})));
    rows.push_back(row("Santos-Burgoa et al. (2018)", 1271, nullptr));
    rows.push_back(row("Kishore et al. (2018)", 4645, json::array({793, 8498})));
    return json{{"note", "published excess-death estimates for the same event"},
                {"rows", rows}};
}

std::string dump_json(const json& j) {
    return j.dump(2) + "\n";
}

json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open json file: " + path);
    json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid json in " + path + ": " + e.what());
    }
    return j;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot open file for writing: " + path);
    out << dump_json(j);
}

} // namespace excessd
