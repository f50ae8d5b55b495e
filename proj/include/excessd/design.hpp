#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "excessd/dataset.hpp"
#include "excessd/types.hpp"

namespace excessd {

/// The four regression variants. Numbering follows the CLI's --model flag.
enum class ModelKind {
    InterceptOnly = 1,
    MonthEffects = 2,
    MonthEffectsAr1 = 3,
    DynamicSeasonal = 4,
};

ModelKind model_kind_from_int(int k);
const char* model_label(ModelKind kind);

struct ModelSpec {
    ModelKind kind = ModelKind::MonthEffectsAr1;
    int baseline_month = 1; // omitted dummy; its level is the intercept

    bool has_month_effects() const {
        return kind == ModelKind::MonthEffects || kind == ModelKind::MonthEffectsAr1;
    }
    bool has_ar1() const { return kind == ModelKind::MonthEffectsAr1; }
    bool has_lag() const { return kind == ModelKind::DynamicSeasonal; }
};

inline bool is_hurricane_season(int month) { return month >= 6 && month <= 11; }
inline bool is_dry_season(int month) { return month == 12 || month <= 3; }

enum class ColumnKind { intercept, month_dummy, lag, season_indicator };

/// Outcome vector plus predictor matrix (row-major), with the calendar
/// month of every row retained so that serial-structure code can detect
/// gaps left by excluded observations.
struct DesignMatrix {
    std::vector<double> y;
    std::vector<double> x; // n_rows x n_cols, row-major
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::string> column_names;
    std::vector<ColumnKind> column_kinds;
    std::vector<YearMonth> time_index;

    std::span<const double> row(std::size_t i) const {
        return {x.data() + i * n_cols, n_cols};
    }
    double at(std::size_t i, std::size_t j) const { return x[i * n_cols + j]; }

    /// Maximal runs of calendar-contiguous rows, as (start, length).
    std::vector<std::pair<std::size_t, std::size_t>> segments() const;
};

/// Minimum usable fit size ("at least 24 entries required for any model fit").
inline constexpr std::size_t kMinFitRows = 24;

/// Builds the outcome/predictor pair for one model. When `include` is given,
/// only months in the set produce rows; for the lagged model a row also
/// requires its predecessor month in the set, so excluded observations are
/// never used as lag values.
DesignMatrix build_design(const MonthlySeries& series, const ModelSpec& spec,
                          const std::set<YearMonth>* include = nullptr);

/// Convenience: include-set for "all months of these years".
std::set<YearMonth> months_of_years(const MonthlySeries& series, const std::set<int>& years);

} // namespace excessd
