#pragma once

// Data-parallel inner loops used by the dense linear algebra. Each kernel has
// a scalar reference implementation and an AVX2/FMA variant; the variant is
// picked once at startup from the CPU feature flags and can be overridden for
// equivalence testing.

#include <cstddef>
#include <span>
#include <string_view>

namespace hvib::kernels {

enum class Backend { scalar, avx2 };

std::string_view to_string(Backend backend);

/// True when the backend was compiled in and the running CPU supports it.
bool available(Backend backend);

Backend active();

/// Selects the backend used by the dispatching entry points. Throws
/// hvib::Error(precondition) if the backend is not available.
void select(Backend backend);

/// Best backend available on this CPU.
Backend detect();

/// c[m x n] = a[m x k] * b[k x n], all row-major and densely packed.
void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a,
          const double* b, double* c);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> x, std::span<const double> y);

/// y = alpha * x + beta * y
void axpby(double alpha, std::span<const double> x, double beta,
           std::span<double> y);

// Direct entry points per backend (the equivalence tests call both).
namespace scalar {
void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a,
          const double* b, double* c);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void axpby(double alpha, const double* x, double beta, double* y,
           std::size_t n);
}  // namespace scalar

namespace avx2 {
void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a,
          const double* b, double* c);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void axpby(double alpha, const double* x, double beta, double* y,
           std::size_t n);
}  // namespace avx2

}  // namespace hvib::kernels
