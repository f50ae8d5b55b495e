#include "excessd/prior.hpp"

#include <cmath>

namespace excessd {

Prior Prior::diffuse() {
    // Mirrors the probabilistic-programming defaults the reference fits used:
    // a unit-scale Student-t on the centered intercept and on sigma (both
    // ~unit-sized after standardization), and a much wider t on the
    // remaining coefficients so their estimates stay near the frequentist
    // ones. A unit-scale t on every dummy coefficient would shrink the
    // month offsets by tens of deaths.
    Prior p;
    p.coef_default.scale = 10.0;
    p.coef_overrides["alpha"] = PriorComponent::diffuse_t();
    return p;
}

Prior Prior::near_flat(double scale) {
    Prior p;
    p.coef_default.scale = scale;
    p.sigma.scale = scale;
    return p;
}

Prior derive_informative_prior(const MonthlySeries& series,
                               const std::set<int>& reference_years,
                               int baseline_month) {
    require_month(baseline_month);
    if (reference_years.size() < 2)
        throw DataError("informative prior needs at least two reference years");

    MonthlyBaseline ref = monthly_baseline(series, reference_years);

    double pooled_var = 0.0;
    for (int m = 1; m <= 12; ++m) {
        double s = ref.cell(m).sigma;
        pooled_var += s * s;
    }
    double pooled_sd = std::sqrt(pooled_var / 12.0);
    if (!(pooled_sd > 0.0))
        pooled_sd = 1.0; // degenerate constant reference period

    Prior prior;
    prior.informative = true;
    double base_mean = ref.cell(baseline_month).mu;
    prior.coef_overrides["alpha"] = PriorComponent::raw_normal(base_mean, pooled_sd);
    for (int m = 1; m <= 12; ++m) {
        if (m == baseline_month) continue;
        prior.coef_overrides[std::string("theta_") + month_name(m)] =
            PriorComponent::raw_normal(ref.cell(m).mu - base_mean, pooled_sd);
    }
    return prior;
}

} // namespace excessd
