#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hvib/kernels.hpp"
#include "hvib/matrix.hpp"

using namespace hvib;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0, scale = 1e-300;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(a[i]));
  }
  return worst / scale;
}

class BackendRestore : public ::testing::Test {
 protected:
  void SetUp() override { saved_ = kernels::active(); }
  void TearDown() override { kernels::select(saved_); }
  void require_avx2() {
    if (!kernels::available(kernels::Backend::avx2)) GTEST_SKIP() << "no AVX2 on this CPU";
  }
  kernels::Backend saved_{};
};

}  // namespace

TEST_F(BackendRestore, ScalarAlwaysAvailable) {
  EXPECT_TRUE(kernels::available(kernels::Backend::scalar));
  kernels::select(kernels::Backend::scalar);
  EXPECT_EQ(kernels::active(), kernels::Backend::scalar);
  EXPECT_EQ(kernels::to_string(kernels::Backend::scalar), "scalar");
}

TEST_F(BackendRestore, DetectPicksAvailableBackend) {
  EXPECT_TRUE(kernels::available(kernels::detect()));
}

TEST_F(BackendRestore, GemmMatchesNaiveTripleLoop) {
  std::mt19937_64 rng(1);
  for (std::size_t m : {1u, 2u, 3u, 5u, 8u, 13u})
    for (std::size_t n : {1u, 4u, 7u, 9u})
      for (std::size_t k : {1u, 3u, 6u, 17u}) {
        const auto a = random_vec(rng, m * k), b = random_vec(rng, k * n);
        std::vector<double> ref(m * n, 0.0), c(m * n, 7.0);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < k; ++l) ref[i * n + j] += a[i * k + l] * b[l * n + j];
        kernels::scalar::gemm(m, n, k, a.data(), b.data(), c.data());
        EXPECT_LT(max_rel_diff(ref, c), 1e-14);
      }
}

TEST_F(BackendRestore, Avx2GemmEquivalentToScalar) {
  require_avx2();
  std::mt19937_64 rng(2);
  for (std::size_t m = 1; m <= 12; ++m)
    for (std::size_t n = 1; n <= 12; ++n) {
      const std::size_t k = (m * 7 + n * 3) % 11 + 1;
      const auto a = random_vec(rng, m * k), b = random_vec(rng, k * n);
      std::vector<double> cs(m * n), cv(m * n);
      kernels::scalar::gemm(m, n, k, a.data(), b.data(), cs.data());
      kernels::avx2::gemm(m, n, k, a.data(), b.data(), cv.data());
      EXPECT_LT(max_rel_diff(cs, cv), 1e-13) << m << "x" << n << "x" << k;
    }
}

TEST_F(BackendRestore, Avx2VectorKernelsEquivalentToScalar) {
  require_avx2();
  std::mt19937_64 rng(3);
  for (std::size_t n = 0; n <= 37; ++n) {
    const auto x = random_vec(rng, n);
    const auto y0 = random_vec(rng, n);
    auto ys = y0, yv = y0;
    kernels::scalar::axpy(0.7, x.data(), ys.data(), n);
    kernels::avx2::axpy(0.7, x.data(), yv.data(), n);
    EXPECT_LT(max_rel_diff(ys, yv), 1e-15);
    ys = y0;
    yv = y0;
    kernels::scalar::axpby(-1.3, x.data(), 0.25, ys.data(), n);
    kernels::avx2::axpby(-1.3, x.data(), 0.25, yv.data(), n);
    EXPECT_LT(max_rel_diff(ys, yv), 1e-15);
    const double ds = kernels::scalar::dot(x.data(), y0.data(), n);
    const double dv = kernels::avx2::dot(x.data(), y0.data(), n);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y0[i]);
    EXPECT_LE(std::abs(ds - dv), 1e-15 * (mag + 1e-300) * 4);
  }
}

TEST_F(BackendRestore, MatrixProductIndependentOfBackend) {
  require_avx2();
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Matrix a(9, 7), b(7, 5);
  for (double& v : a.data()) v = g(rng);
  for (double& v : b.data()) v = g(rng);
  kernels::select(kernels::Backend::scalar);
  const Matrix ps = a * b;
  kernels::select(kernels::Backend::avx2);
  const Matrix pv = a * b;
  EXPECT_LT((ps - pv).max_abs(), 1e-13 * ps.max_abs());
}
