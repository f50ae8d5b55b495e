#include "excessd/kernels.hpp"

#include <cassert>
#include <cstddef>
#include <immintrin.h>

namespace excessd::kernels::avx2 {

namespace {

inline double hadd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

} // namespace

double sum(std::span<const double> x) {
    const std::size_t n = x.size();
    std::size_t i = 0;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x.data() + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x.data() + i + 4));
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x.data() + i));
    double total = hadd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) total += x[i];
    return total;
}

double sumsq(std::span<const double> x) {
    const std::size_t n = x.size();
    std::size_t i = 0;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (; i + 8 <= n; i += 8) {
        __m256d a = _mm256_loadu_pd(x.data() + i);
        __m256d b = _mm256_loadu_pd(x.data() + i + 4);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
        acc1 = _mm256_fmadd_pd(b, b, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(x.data() + i);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
    }
    double total = hadd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) total += x[i] * x[i];
    return total;
}

double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    const std::size_t n = x.size();
    std::size_t i = 0;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i + 4), _mm256_loadu_pd(y.data() + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i), acc0);
    double total = hadd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) total += x[i] * y[i];
    return total;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    const std::size_t n = x.size();
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i));
        _mm256_storeu_pd(y.data() + i, acc);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void affine(double a, double b, std::span<const double> x, std::span<double> out) {
    assert(x.size() == out.size());
    const std::size_t n = x.size();
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out.data() + i, _mm256_fmadd_pd(vb, _mm256_loadu_pd(x.data() + i), va));
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
    // Interior rows: g_t = (2 + 2 rho^2) r_t - 2 rho (r_{t-1} + r_{t+1}).
    const __m256d c_mid = _mm256_set1_pd(2.0 + 2.0 * rho * rho);
    const __m256d c_side = _mm256_set1_pd(-2.0 * rho);
    std::size_t t = 1;
    for (; t + 4 + 1 <= n; t += 4) {
        __m256d prev = _mm256_loadu_pd(r.data() + t - 1);
        __m256d cur = _mm256_loadu_pd(r.data() + t);
        __m256d next = _mm256_loadu_pd(r.data() + t + 1);
        __m256d acc = _mm256_mul_pd(c_mid, cur);
        acc = _mm256_fmadd_pd(c_side, _mm256_add_pd(prev, next), acc);
        _mm256_storeu_pd(g.data() + t, acc);
    }
    for (; t + 1 < n; ++t)
        g[t] = 2.0 * (r[t] - rho * r[t - 1]) - 2.0 * rho * (r[t + 1] - rho * r[t]);
    g[n - 1] = 2.0 * (r[n - 1] - rho * r[n - 2]);
}

extern const Ops kOps;
const Ops kOps = {&sum, &sumsq, &dot, &axpy, &affine, &ar1_adjoint};

} // namespace excessd::kernels::avx2
