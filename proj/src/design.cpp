#include "excessd/design.hpp"

#include <algorithm>

namespace excessd {

ModelKind model_kind_from_int(int k) {
    switch (k) {
        case 1: return ModelKind::InterceptOnly;
        case 2: return ModelKind::MonthEffects;
        case 3: return ModelKind::MonthEffectsAr1;
        case 4: return ModelKind::DynamicSeasonal;
        default: throw UsageError("model must be 1, 2, 3 or 4 (got " + std::to_string(k) + ")");
    }
}

const char* model_label(ModelKind kind) {
    switch (kind) {
        case ModelKind::InterceptOnly: return "intercept-only";
        case ModelKind::MonthEffects: return "month-effects";
        case ModelKind::MonthEffectsAr1: return "month-effects-ar1";
        case ModelKind::DynamicSeasonal: return "dynamic-seasonal";
    }
    return "?";
}

std::vector<std::pair<std::size_t, std::size_t>> DesignMatrix::segments() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= n_rows; ++i) {
        bool boundary = i == n_rows ||
                        months_between(time_index[i - 1], time_index[i]) != 1;
        if (boundary) {
            out.emplace_back(start, i - start);
            start = i;
        }
    }
    return out;
}

DesignMatrix build_design(const MonthlySeries& series, const ModelSpec& spec,
                          const std::set<YearMonth>* include) {
    require_month(spec.baseline_month);

    DesignMatrix d;
    d.column_names.push_back("alpha");
    d.column_kinds.push_back(ColumnKind::intercept);
    std::vector<int> dummy_months;
    if (spec.has_month_effects()) {
        for (int m = 1; m <= 12; ++m) {
            if (m == spec.baseline_month) continue;
            dummy_months.push_back(m);
            d.column_names.push_back(std::string("theta_") + month_name(m));
            d.column_kinds.push_back(ColumnKind::month_dummy);
        }
    }
    if (spec.has_lag()) {
        d.column_names.push_back("beta_lag");
        d.column_kinds.push_back(ColumnKind::lag);
        d.column_names.push_back("gamma_hurricane");
        d.column_kinds.push_back(ColumnKind::season_indicator);
        d.column_names.push_back("gamma_dry");
        d.column_kinds.push_back(ColumnKind::season_indicator);
    }
    d.n_cols = d.column_names.size();

    auto included = [&](const YearMonth& ym) {
        return include == nullptr || include->count(ym) > 0;
    };

    for (const auto& e : series.entries()) {
        if (!included(e.ym)) continue;
        if (spec.has_lag()) {
            YearMonth prev = e.ym.prev();
            if (!series.contains(prev) || !included(prev)) continue;
        }
        d.time_index.push_back(e.ym);
        d.y.push_back(static_cast<double>(e.count));
        d.x.push_back(1.0); // intercept
        for (int m : dummy_months)
            d.x.push_back(e.ym.month == m ? 1.0 : 0.0);
        if (spec.has_lag()) {
            d.x.push_back(static_cast<double>(series.at(e.ym.prev())));
            d.x.push_back(is_hurricane_season(e.ym.month) ? 1.0 : 0.0);
            d.x.push_back(is_dry_season(e.ym.month) ? 1.0 : 0.0);
        }
    }
    d.n_rows = d.y.size();

    if (d.n_rows < kMinFitRows)
        throw DataError("insufficient data: " + std::to_string(d.n_rows) + " usable rows, need " +
                        std::to_string(kMinFitRows));
    return d;
}

std::set<YearMonth> months_of_years(const MonthlySeries& series, const std::set<int>& years) {
    std::set<YearMonth> out;
    for (const auto& e : series.entries())
        if (years.count(e.ym.year) > 0) out.insert(e.ym);
    return out;
}

} // namespace excessd
