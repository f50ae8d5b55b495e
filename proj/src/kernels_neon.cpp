#include "excessd/kernels.hpp"

#include <arm_neon.h>
#include <cassert>
#include <cstddef>

namespace excessd::kernels::neon {

double sum(std::span<const double> x) {
    const std::size_t n = x.size();
    std::size_t i = 0;
    float64x2_t acc = vdupq_n_f64(0.0);
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x.data() + i));
    double total = vaddvq_f64(acc);
    for (; i < n; ++i) total += x[i];
    return total;
}

double sumsq(std::span<const double> x) {
    const std::size_t n = x.size();
    std::size_t i = 0;
    float64x2_t acc = vdupq_n_f64(0.0);
    for (; i + 2 <= n; i += 2) {
        float64x2_t a = vld1q_f64(x.data() + i);
        acc = vfmaq_f64(acc, a, a);
    }
    double total = vaddvq_f64(acc);
    for (; i < n; ++i) total += x[i] * x[i];
    return total;
}

double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    const std::size_t n = x.size();
    std::size_t i = 0;
    float64x2_t acc = vdupq_n_f64(0.0);
    for (; i + 2 <= n; i += 2)
        acc = vfmaq_f64(acc, vld1q_f64(x.data() + i), vld1q_f64(y.data() + i));
    double total = vaddvq_f64(acc);
    for (; i < n; ++i) total += x[i] * y[i];
    return total;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    const std::size_t n = x.size();
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y.data() + i, vfmaq_f64(vld1q_f64(y.data() + i), va, vld1q_f64(x.data() + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void affine(double a, double b, std::span<const double> x, std::span<double> out) {
    assert(x.size() == out.size());
    const std::size_t n = x.size();
    const float64x2_t va = vdupq_n_f64(a);
    const float64x2_t vb = vdupq_n_f64(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(out.data() + i, vfmaq_f64(va, vb, vld1q_f64(x.data() + i)));
    for (; i < n; ++i) out[i] = a + b * x[i];
}

void ar1_adjoint(std::span<const double> r, double rho, std::span<double> g) {
    assert(!r.empty() && r.size() == g.size());
    const std::size_t n = r.size();
    if (n == 1) {
        g[0] = 2.0 * (1.0 - rho * rho) * r[0];
        return;
    }
    g[0] = 2.0 * (1.0 - rho * rho) * r[0] - 2.0 * rho * (r[1] - rho * r[0]);
    const float64x2_t c_mid = vdupq_n_f64(2.0 + 2.0 * rho * rho);
    const float64x2_t c_side = vdupq_n_f64(-2.0 * rho);
    std::size_t t = 1;
    for (; t + 2 + 1 <= n; t += 2) {
        float64x2_t prev = vld1q_f64(r.data() + t - 1);
        float64x2_t cur = vld1q_f64(r.data() + t);
        float64x2_t next = vld1q_f64(r.data() + t + 1);
        vst1q_f64(g.data() + t, vfmaq_f64(vmulq_f64(c_mid, cur), c_side, vaddq_f64(prev, next)));
    }
    for (; t + 1 < n; ++t)
        g[t] = 2.0 * (r[t] - rho * r[t - 1]) - 2.0 * rho * (r[t + 1] - rho * r[t]);
    g[n - 1] = 2.0 * (r[n - 1] - rho * r[n - 2]);
}

extern const Ops kOps;
const Ops kOps = {&sum, &sumsq, &dot, &axpy, &affine, &ar1_adjoint};

} // namespace excessd::kernels::neon
