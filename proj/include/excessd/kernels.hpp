#pragma once

#include <span>
#include <string>
#include <vector>

namespace excessd::kernels {

/// Vectorized arithmetic kernels used by the likelihood, gradient and
/// posterior-predictive inner loops. Every operation has a scalar reference
/// implementation and, where the platform provides them, SIMD variants.
/// The active backend is selected at runtime from CPU capabilities and can
/// be overridden with the EXCESSD_KERNELS environment variable
/// (scalar | avx2 | neon) or set_backend().
enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);

/// Backends usable on this machine (scalar is always first).
std::vector<Backend> available_backends();

Backend active_backend();

/// Selects a backend explicitly; throws excessd::UsageError if unavailable.
void set_backend(Backend b);

double sum(std::span<const double> x);
double sumsq(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

/// out[i] = a + b * x[i]
void affine(double a, double b, std::span<const double> x, std::span<double> out);

/// Gradient of the AR(1) innovation quadratic
///   Q(r) = (1 - rho^2) r_0^2 + sum_{t>=1} (r_t - rho r_{t-1})^2
/// with respect to r, written to g (g.size() == r.size(), r non-empty).
void ar1_adjoint(std::span<const double> r, double rho, std::span<double> g);

/// Function-pointer table for one backend; exposed so equivalence tests can
/// exercise every implementation directly regardless of dispatch.
struct Ops {
    double (*sum)(std::span<const double>);
    double (*sumsq)(std::span<const double>);
    double (*dot)(std::span<const double>, std::span<const double>);
    void (*axpy)(double, std::span<const double>, std::span<double>);
    void (*affine)(double, double, std::span<const double>, std::span<double>);
    void (*ar1_adjoint)(std::span<const double>, double, std::span<double>);
};

const Ops& ops_for(Backend b);

} // namespace excessd::kernels
