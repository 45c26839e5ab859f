#include <atomic>
#include <cassert>

#include "hvib/error.hpp"
#include "hvib/kernels.hpp"

namespace hvib::kernels {

namespace {

struct Table {
  void (*gemm)(std::size_t, std::size_t, std::size_t, const double*,
               const double*, double*);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpby)(double, const double*, double, double*, std::size_t);
};

constexpr Table kScalar{&scalar::gemm, &scalar::axpy, &scalar::dot,
                        &scalar::axpby};
constexpr Table kAvx2{&avx2::gemm, &avx2::axpy, &avx2::dot, &avx2::axpby};

bool cpu_has_avx2() {
#if defined(HVIB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{detect() == Backend::avx2 ? &kAvx2
                                                                   : &kScalar};
  return table;
}

}  // namespace

std::string_view to_string(Backend backend) {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

bool available(Backend backend) {
  if (backend == Backend::scalar) return true;
  static const bool avx2 = cpu_has_avx2();
  return avx2;
}

Backend detect() {
  return available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

Backend active() {
  return current().load(std::memory_order_relaxed) == &kAvx2 ? Backend::avx2
                                                              : Backend::scalar;
}

void select(Backend backend) {
  if (!available(backend)) {
    fail(ErrorKind::precondition,
         "kernel backend '" + std::string(to_string(backend)) +
             "' is not available on this CPU");
  }
  current().store(backend == Backend::avx2 ? &kAvx2 : &kScalar,
                  std::memory_order_relaxed);
}

void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a,
          const double* b, double* c) {
  current().load(std::memory_order_relaxed)->gemm(m, n, k, a, b, c);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  current().load(std::memory_order_relaxed)->axpy(alpha, x.data(), y.data(),
                                                  x.size());
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return current().load(std::memory_order_relaxed)->dot(x.data(), y.data(),
                                                        x.size());
}

void axpby(double alpha, std::span<const double> x, double beta,
           std::span<double> y) {
  assert(x.size() == y.size());
  current().load(std::memory_order_relaxed)->axpby(alpha, x.data(), beta,
                                                   y.data(), x.size());
}

}  // namespace hvib::kernels
