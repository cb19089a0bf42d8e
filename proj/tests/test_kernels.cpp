#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "crackdual/kernels.hpp"

using namespace crackdual;

namespace {

struct Batch {
  std::vector<double> gx, gy, w;
};

Batch random_batch(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> w(0.1, 10.0);
  Batch b;
  for (std::size_t i = 0; i < n; ++i) {
    // Mix tiny, zero and large gradients.
    const double s = i % 7 == 0 ? 0.0 : (i % 5 == 0 ? 1e-8 : (i % 11 == 0 ? 1e4 : 1.0));
    b.gx.push_back(s * g(rng));
    b.gy.push_back(s * g(rng));
    b.w.push_back(w(rng));
  }
  return b;
}

}  // namespace

TEST(Kernels, ScalarIsAlwaysAvailable) {
  EXPECT_TRUE(kernels::available(kernels::Backend::scalar));
  EXPECT_STREQ(kernels::name(kernels::Backend::scalar), "scalar");
}

TEST(Kernels, ScalarReference) {
  const std::vector<double> gx{3, 0}, gy{4, 0}, w{2, 1};
  std::vector<double> scale(2);
  const double e = kernels::scalar::power_cells(gx, gy, w, 3.0, 0.0, scale);
  EXPECT_NEAR(e, 2 * 125.0 / 3.0, 1e-12);
  EXPECT_NEAR(scale[0], 2 * 5.0, 1e-12);
  EXPECT_EQ(scale[1], 0.0);
  EXPECT_NEAR(kernels::scalar::power_sum(gx, gy, w, 2.0), 50.0, 1e-12);
}

TEST(Kernels, Avx2MatchesScalar) {
  if (!kernels::available(kernels::Backend::avx2)) GTEST_SKIP() << "no AVX2 on this CPU";
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1000u}) {
    const Batch b = random_batch(n, 42 + static_cast<unsigned>(n));
    for (double p : {1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 1.3}) {
      for (double eps : {0.0, 1e-3, 0.5}) {
        if (p < 2 && eps == 0.0) continue;
        std::vector<double> s1(n), s2(n);
        const double e1 = kernels::scalar::power_cells(b.gx, b.gy, b.w, p, eps, s1);
        const double e2 = kernels::avx2::power_cells(b.gx, b.gy, b.w, p, eps, s2);
        EXPECT_NEAR(e1, e2, 1e-12 * std::max(1.0, std::abs(e1))) << n << " " << p << " " << eps;
        for (std::size_t i = 0; i < n; ++i)
          ASSERT_NEAR(s1[i], s2[i], 1e-12 * std::max(1.0, std::abs(s1[i]))) << i << " " << p;
      }
      const double a = kernels::scalar::power_sum(b.gx, b.gy, b.w, p);
      const double c = kernels::avx2::power_sum(b.gx, b.gy, b.w, p);
      EXPECT_NEAR(a, c, 1e-12 * std::max(1.0, std::abs(a))) << n << " " << p;
    }
  }
}

TEST(Kernels, HalfIntegerExponentsUseTheVectorPath) {
  EXPECT_TRUE(kernels::avx2::supports_exponent(2.0));
  EXPECT_TRUE(kernels::avx2::supports_exponent(1.5));
  EXPECT_FALSE(kernels::avx2::supports_exponent(1.25));
  EXPECT_TRUE(kernels::avx2::supports_exponent(3.0));
  EXPECT_FALSE(kernels::avx2::supports_exponent(1.3));
}

TEST(Kernels, DispatchFollowsSelection) {
  const kernels::Backend saved = kernels::active();
  const Batch b = random_batch(64, 5);
  std::vector<double> s(64);
  kernels::set_active(kernels::Backend::scalar);
  EXPECT_EQ(kernels::active(), kernels::Backend::scalar);
  const double ref = kernels::scalar::power_cells(b.gx, b.gy, b.w, 3.0, 0.0, s);
  EXPECT_EQ(kernels::power_cells(b.gx, b.gy, b.w, 3.0, 0.0, s), ref);
  if (kernels::available(kernels::Backend::avx2)) {
    kernels::set_active(kernels::Backend::avx2);
    EXPECT_NEAR(kernels::power_cells(b.gx, b.gy, b.w, 3.0, 0.0, s), ref, 1e-12 * ref);
  }
  kernels::set_active(saved);
}
