#include "excessd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "excessd/errors.hpp"

namespace excessd::kernels {

namespace scalar { extern const Ops kOps; }
#if EXCESSD_WITH_AVX2
namespace avx2 { extern const Ops kOps; }
#endif
#if EXCESSD_WITH_NEON
namespace neon { extern const Ops kOps; }
#endif

namespace {

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if EXCESSD_WITH_AVX2
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::neon:
#if EXCESSD_WITH_NEON
            return true; // baseline on aarch64
#else
            return false;
#endif
    }
    return false;
}

Backend pick_default() {
    if (const char* env = std::getenv("EXCESSD_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && backend_supported(Backend::avx2)) return Backend::avx2;
        if (std::strcmp(env, "neon") == 0 && backend_supported(Backend::neon)) return Backend::neon;
        return Backend::scalar;
    }
    if (backend_supported(Backend::avx2)) return Backend::avx2;
    if (backend_supported(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

std::atomic<const Ops*> g_active{nullptr};
std::atomic<Backend> g_active_backend{Backend::scalar};

const Ops& activate() {
    const Ops* ops = g_active.load(std::memory_order_acquire);
    if (ops) return *ops;
    Backend b = pick_default();
    g_active_backend.store(b);
    g_active.store(&ops_for(b), std::memory_order_release);
    return ops_for(b);
}

} // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

const Ops& ops_for(Backend b) {
    switch (b) {
        case Backend::scalar:
            return scalar::kOps;
        case Backend::avx2:
#if EXCESSD_WITH_AVX2
            return avx2::kOps;
#else
            break;
#endif
        case Backend::neon:
#if EXCESSD_WITH_NEON
            return neon::kOps;
#else
            break;
#endif
    }
    throw UsageError(std::string("kernel backend not built: ") + backend_name(b));
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out{Backend::scalar};
    if (backend_supported(Backend::avx2)) out.push_back(Backend::avx2);
    if (backend_supported(Backend::neon)) out.push_back(Backend::neon);
    return out;
}

Backend active_backend() {
    activate();
    return g_active_backend.load();
}

void set_backend(Backend b) {
    if (!backend_supported(b))
        throw UsageError(std::string("kernel backend unavailable on this cpu: ") + backend_name(b));
    g_active_backend.store(b);
    g_active.store(&ops_for(b), std::memory_order_release);
}

double sum(std::span<const double> x) { return activate().sum(x); }
double sumsq(std::span<const double> x) { return activate().sumsq(x); }
double dot(std::span<const double> x, std::span<const double> y) { return activate().dot(x, y); }
void axpy(double a, std::span<const double> x, std::span<double> y) { activate().axpy(a, x, y); }
void affine(double a, double b, std::span<const double> x, std::span<double> out) {
    activate().affine(a, b, x, out);
}
void ar1_adjoint(std::span<const double> r, double rho, std::span<double> g) {
    activate().ar1_adjoint(r, rho, g);
}

} // namespace excessd::kernels
