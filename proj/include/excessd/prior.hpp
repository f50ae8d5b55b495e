#pragma once

#include <map>
#include <set>
#include <string>

#include "excessd/dataset.hpp"

namespace excessd {

/// One prior component. Student-t components default to the diffuse
/// t(3, 0, 1) shape; `space` says whether location/scale are expressed on
/// the internally standardized coefficient scale or in raw outcome units.
struct PriorComponent {
    enum class Family { student_t, normal };
    enum class Space { standardized, raw };

    Family family = Family::student_t;
    Space space = Space::standardized;
    double location = 0.0;
    double scale = 1.0;
    double df = 3.0;

    static PriorComponent diffuse_t() { return {}; }
    static PriorComponent raw_normal(double location, double scale) {
        return {Family::normal, Space::raw, location, scale, 0.0};
    }
};

/// Priors for a model fit. Coefficients take `coef_default` unless an
/// override keyed by coefficient name ("alpha", "theta_sep", ...) exists.
/// `rho` applies to the AR(1) coefficient on (-1,1); `sigma` to the
/// innovation SD on the standardized outcome scale.
struct Prior {
    bool informative = false;
    PriorComponent coef_default;
    std::map<std::string, PriorComponent> coef_overrides;
    PriorComponent rho;
    PriorComponent sigma;

    const PriorComponent& for_coef(const std::string& name) const {
        auto it = coef_overrides.find(name);
        return it == coef_overrides.end() ? coef_default : it->second;
    }

    /// t(3,0,1) on the standardized scale for every parameter.
    static Prior diffuse();

    /// Effectively flat coefficient priors (wide Student-t); used by the
    /// frequentist-equivalence oracles.
    static Prior near_flat(double scale = 1e6);
};

/// Month-mean normal priors from a reference period: the prior mean of the
/// intercept is the baseline month's average over the reference years, each
/// month offset's prior mean is that month's average minus the baseline
/// average, and every coefficient gets the pooled within-month residual SD
/// as its prior SD. rho and sigma stay diffuse.
Prior derive_informative_prior(const MonthlySeries& series,
                               const std::set<int>& reference_years,
                               int baseline_month = 1);

} // namespace excessd
