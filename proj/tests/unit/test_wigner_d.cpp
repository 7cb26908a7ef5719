#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "sphsparse/wigner_d.hpp"

namespace sphsparse {
namespace {

constexpr double kHalfPi = 0.5 * kPi;

TEST(DeltaTable, ClosedFormsAtLowDegree) {
  const DeltaTable delta(3);
  EXPECT_NEAR(delta(0, 0, 0), 1.0, 1e-15);
  EXPECT_NEAR(delta(1, 0, 0), 0.0, 1e-15);
  EXPECT_NEAR(delta(1, 1, 0), -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(delta(1, 0, 1), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(delta(1, 1, 1), 0.5, 1e-15);
  EXPECT_NEAR(delta(1, 1, -1), 0.5, 1e-15);
  EXPECT_NEAR(delta(2, 0, 0), -0.5, 1e-15);
  EXPECT_NEAR(delta(2, 2, 0), std::sqrt(6.0) / 4.0, 1e-15);
  EXPECT_NEAR(delta(2, 1, 1), -0.5, 1e-15);
}

TEST(DeltaTable, MatchesExplicitSum) {
  const DeltaTable delta(16);
  for (int ell = 0; ell < 16; ++ell)
    for (int mp = -ell; mp <= ell; ++mp)
      for (int m = -ell; m <= ell; ++m)
        ASSERT_NEAR(delta(ell, mp, m), wigner_d_explicit(ell, mp, m, kHalfPi), 1e-12)
            << ell << " " << mp << " " << m;
}

TEST(DeltaTable, ColumnsAreOrthonormalAtHighDegree) {
  const DeltaTable delta(257);
  for (int ell : {100, 200, 256}) {
    for (int m : {-ell, -3, 0, 7, ell}) {
      for (int n : {m, 0, 1}) {
        double dot = 0.0;
        const double* a = delta.column(ell, m);
        const double* b = delta.column(ell, n);
        for (int i = 0; i < 2 * ell + 1; ++i) dot += a[i] * b[i];
        EXPECT_NEAR(dot, m == n ? 1.0 : 0.0, 1e-11) << ell << " " << m << " " << n;
      }
    }
  }
}

TEST(DeltaTable, SharedCacheCoversRequest) {
  const auto small = DeltaTable::shared(8);
  const auto large = DeltaTable::shared(20);
  EXPECT_GE(small->band_limit(), 8);
  EXPECT_GE(large->band_limit(), 20);
  EXPECT_DOUBLE_EQ((*large)(5, 2, -1), (*small)(5, 2, -1));
}

TEST(WignerD, RisboMatrixMatchesExplicitAtArbitraryBeta) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  for (int trial = 0; trial < 5; ++trial) {
    const double beta = angle(rng);
    for (int ell : {0, 1, 4, 9}) {
      const auto d = wigner_d_matrix(ell, beta);
      for (int mp = -ell; mp <= ell; ++mp)
        for (int m = -ell; m <= ell; ++m)
          ASSERT_NEAR(d(mp + ell, m + ell), wigner_d_explicit(ell, mp, m, beta), 1e-12);
    }
  }
}

TEST(WignerD, RecurrenceMatchesExplicit) {
  for (double beta : {0.3, 1.1, 2.9}) {
    for (auto [m, n] : {std::pair{0, 0}, {2, -1}, {-3, 3}, {5, 0}, {1, 4}}) {
      const auto d = wigner_d_recurrence(m, n, 15, beta);
      for (int ell = 0; ell <= 15; ++ell)
        ASSERT_NEAR(d[ell], wigner_d_explicit(ell, m, n, beta), 1e-11)
            << ell << " " << m << " " << n << " " << beta;
    }
  }
}

TEST(WignerD, FourierExpansionThroughDelta) {
  const int ell_max = 24;
  const DeltaTable delta(ell_max + 1);
  const std::complex<double> i(0.0, 1.0);
  for (double beta : {0.2, 1.3, 2.7}) {
    for (auto [m, n] : {std::pair{0, 0}, {3, -2}, {-1, 1}, {4, 0}, {-6, -5}}) {
      const auto ref = wigner_d_recurrence(m, n, ell_max, beta);
      for (int ell = std::max(std::abs(m), std::abs(n)); ell <= ell_max; ++ell) {
        std::complex<double> sum = 0.0;
        for (int mp = -ell; mp <= ell; ++mp)
          sum += delta(ell, mp, m) * delta(ell, mp, n) * std::exp(i * (mp * beta));
        sum *= std::pow(i, n - m);
        ASSERT_NEAR(sum.real(), ref[ell], 1e-11) << ell << " " << m << " " << n;
        ASSERT_NEAR(sum.imag(), 0.0, 1e-11);
      }
    }
  }
}

// Composite Simpson on [0, pi]; independent of the closed form.
std::complex<double> integrate_weight(int m) {
  const int n = 20000;
  const double h = kPi / n;
  std::complex<double> acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = k * h;
    const double c = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += c * std::polar(1.0, m * t) * std::sin(t);
  }
  return acc * (h / 3.0);
}

TEST(QuadratureWeight, MatchesNumericalIntegration) {
  // Values frozen from integrate_weight.
  EXPECT_NEAR(std::abs(quadrature_weight(0) - Complex(2.0, 0.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(quadrature_weight(1) - Complex(0.0, kPi / 2)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(quadrature_weight(3)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(quadrature_weight(2) - Complex(-2.0 / 3.0, 0.0)), 0.0, 1e-14);
  for (int m = -12; m <= 12; ++m)
    EXPECT_NEAR(std::abs(quadrature_weight(m) - integrate_weight(m)), 0.0, 1e-10) << m;
}

}  // namespace
}  // namespace sphsparse
