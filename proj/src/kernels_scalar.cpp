#include "excessd/kernels.hpp"

#include <cassert>
#include <cstddef>

namespace excessd::kernels::scalar {

double sum(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc;
}

double sumsq(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc;
}

double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void affine(double a, double b, std::span<const double> x, std::span<double> out) {
    assert(x.size() == out.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a + b * x[i];
}

void ar1_adjoint(std::span<const double> r, double rho, std::span<double> g) {
    assert(!r.empty() && r.size() == g.size());
    const std::size_t n = r.size();
    if (n == 1) {
        g[0] = 2.0 * (1.0 - rho * rho) * r[0];
        return;
    }
    g[0] = 2.0 * (1.0 - rho * rho) * r[0] - 2.0 * rho * (r[1] - rho * r[0]);
    for (std::size_t t = 1; t + 1 < n; ++t)
        g[t] = 2.0 * (r[t] - rho * r[t - 1]) - 2.0 * rho * (r[t + 1] - rho * r[t]);
    g[n - 1] = 2.0 * (r[n - 1] - rho * r[n - 2]);
}

extern const Ops kOps;
const Ops kOps = {&sum, &sumsq, &dot, &axpy, &affine, &ar1_adjoint};

} // namespace excessd::kernels::scalar
