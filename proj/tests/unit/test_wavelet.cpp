#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sphsparse/dense_oracle.hpp"
#include "sphsparse/wavelet.hpp"

namespace sphsparse {

// Keeps gtest from dumping the raw bytes (including padding) into test names.
void PrintTo(const WaveletConfig& c, std::ostream* os) {
  *os << "{L=" << c.L << ", N=" << c.N << ", lambda=" << c.lambda << ", j_min=" << c.j_min << "}";
}

namespace {

Vector random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vector v(n);
  for (auto& x : v) x = Complex(g(rng), g(rng));
  return v;
}

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double dot_discrepancy(const Vector& Ax, const Vector& y, const Vector& x, const Vector& Aty) {
  return std::abs(Ax.dot(y) - x.dot(Aty)) / (Ax.norm() * y.norm());
}

// Band-limited map from random harmonic coefficients.
Vector random_map(int L, std::uint64_t seed) {
  return SphereTransform(L).inverse(random_vector(static_cast<Eigen::Index>(L) * L, seed));
}

TEST(WaveletConfig, DyadicBandLimits) {
  const WaveletConfig c{32, 1, 2.0, 0};
  EXPECT_EQ(c.j_max(), 5);
  const int expect[] = {2, 4, 8, 16, 32, 32};
  for (int j = 0; j <= 5; ++j) EXPECT_EQ(c.scale_L(j), expect[j]) << j;
  EXPECT_EQ(c.scaling_L(), 1);
  EXPECT_EQ((WaveletConfig{33, 1, 2.0, 0}.j_max()), 5);
  EXPECT_EQ((WaveletConfig{34, 1, 2.0, 0}.j_max()), 6);
  EXPECT_EQ((WaveletConfig{64, 4, 2.0, 2}.scaling_L()), 4);
  EXPECT_EQ((WaveletConfig{64, 4, 2.0, 2}.scale_N(0)), 2);
  EXPECT_EQ((WaveletConfig{64, 4, 2.0, 2}.scale_N(3)), 4);
}

TEST(WaveletConfig, RejectsInvalidSettings) {
  EXPECT_THROW((WaveletConfig{8, 1, 2.0, 4}.validate()), ConfigError);  // 2^4 > 8
  EXPECT_THROW((WaveletConfig{8, 1, 1.0, 0}.validate()), ConfigError);
  EXPECT_THROW((WaveletConfig{8, 9, 2.0, 0}.validate()), ConfigError);
  EXPECT_THROW((WaveletConfig{1, 1, 2.0, 0}.validate()), ConfigError);
  EXPECT_THROW(make_kernels(WaveletConfig{16, 1, 2.0, 5}), ConfigError);
  EXPECT_NO_THROW((WaveletConfig{8, 1, 2.0, 3}.validate()));
}

TEST(TilingProfile, Shape) {
  EXPECT_EQ(tiling_profile(0.0, 2.0), 1.0);
  EXPECT_EQ(tiling_profile(0.5, 2.0), 1.0);
  EXPECT_EQ(tiling_profile(1.0, 2.0), 0.0);
  double prev = 1.0;
  for (double t = 0.5; t <= 1.0; t += 0.01) {
    const double k = tiling_profile(t, 2.0);
    EXPECT_LE(k, prev + 1e-15);
    prev = k;
  }
  EXPECT_GT(tiling_profile(0.75, 2.0), 0.0);
  EXPECT_LT(tiling_profile(0.75, 2.0), 1.0);
}

std::string config_name(const ::testing::TestParamInfo<WaveletConfig>& info) {
  const WaveletConfig& c = info.param;
  std::string lambda = std::to_string(c.lambda);
  lambda.erase(lambda.find_last_not_of('0') + 1);
  if (lambda.back() == '.') lambda.pop_back();
  std::replace(lambda.begin(), lambda.end(), '.', 'p');
  return "L" + std::to_string(c.L) + "_N" + std::to_string(c.N) + "_lambda" + lambda + "_jmin" +
         std::to_string(c.j_min);
}

class KernelProperties : public ::testing::TestWithParam<WaveletConfig> {};

TEST_P(KernelProperties, PartitionOfUnity) {
  const WaveletKernels k(GetParam());
  const auto& c = k.config();
  for (int ell = 0; ell < c.L; ++ell) {
    double sum = k.phi(ell) * k.phi(ell);
    for (int j = c.j_min; j <= c.j_max(); ++j) sum += k.kappa(j, ell) * k.kappa(j, ell);
    EXPECT_NEAR(sum, 1.0, 1e-14) << ell;
  }
}

TEST_P(KernelProperties, HarmonicSupport) {
  const WaveletKernels k(GetParam());
  const auto& c = k.config();
  for (int ell = 0; ell < c.L; ++ell) {
    if (ell >= std::pow(c.lambda, c.j_min)) EXPECT_EQ(k.upsilon(ell), 0.0) << ell;
    for (int j = c.j_min; j <= c.j_max(); ++j) {
      const bool inside = ell > std::pow(c.lambda, j - 1) && ell < std::pow(c.lambda, j + 1);
      if (!inside) EXPECT_EQ(k.kappa(j, ell), 0.0) << j << " " << ell;
      if (ell >= c.scale_L(j)) EXPECT_EQ(k.kappa(j, ell), 0.0);
    }
  }
}

TEST_P(KernelProperties, DirectionalProfile) {
  const WaveletKernels k(GetParam());
  const auto& c = k.config();
  for (int ell = 0; ell < c.L; ++ell) {
    double norm = 0.0;
    for (int n = -(c.N - 1); n <= c.N - 1; ++n) {
      const Complex z = k.zeta(ell, n);
      norm += std::norm(z);
      if (std::abs(n) > ell) EXPECT_EQ(z, Complex{});
      if ((n - (c.N - 1)) % 2 != 0) EXPECT_EQ(z, Complex{});
      // Real-field symmetry zeta_{l,-n} = (-1)^n conj(zeta_ln).
      EXPECT_NEAR(std::abs(k.zeta(ell, -n) - (n % 2 ? -1.0 : 1.0) * std::conj(z)), 0.0, 1e-15);
    }
    const bool empty = c.N % 2 == 0 && ell == 0;
    EXPECT_NEAR(norm, empty ? 0.0 : 1.0, 1e-14) << ell;
  }
}

INSTANTIATE_TEST_SUITE_P(Configs, KernelProperties,
                         ::testing::Values(WaveletConfig{32, 1, 2.0, 0}, WaveletConfig{32, 3, 2.0, 2},
                                           WaveletConfig{40, 4, 1.5, 3}, WaveletConfig{27, 5, 3.0, 1}),
                         config_name);

TEST(WaveletKernels, AxisymmetricHasOnlyZeroDirection) {
  const WaveletKernels k(WaveletConfig{16, 1, 2.0, 0});
  for (int j = 0; j <= k.config().j_max(); ++j)
    for (int ell = 0; ell < 16; ++ell)
      for (int n = -3; n <= 3; ++n)
        if (n != 0) EXPECT_EQ(k.psi(j, ell, n), Complex{});
}

class WaveletIdentity : public ::testing::TestWithParam<WaveletConfig> {};

TEST_P(WaveletIdentity, SynthesisInvertsAnalysis) {
  const WaveletTransform t(GetParam());
  for (int trial = 0; trial < 2; ++trial) {
    const Vector x = random_map(GetParam().L, 10 + trial);
    EXPECT_LT(max_abs(t.inverse(t.forward(x)) - x), 1e-8);
  }
}

INSTANTIATE_TEST_SUITE_P(Configs, WaveletIdentity,
                         ::testing::Values(WaveletConfig{32, 3, 2.0, 0}, WaveletConfig{32, 1, 2.0, 2},
                                           WaveletConfig{16, 4, 2.0, 0}, WaveletConfig{20, 2, 1.6, 1},
                                           WaveletConfig{9, 9, 2.0, 1}),
                         config_name);

TEST(WaveletTransform, DotTests) {
  const WaveletTransform t(WaveletConfig{16, 3, 2.0, 0});
  for (int trial = 0; trial < 5; ++trial) {
    const Vector x = random_vector(t.n_samples(), 3 * trial + 1);
    const Vector a = random_vector(t.n_coeffs(), 3 * trial + 2);
    EXPECT_LT(dot_discrepancy(t.forward(x), a, x, t.forward_adjoint(a)), 1e-10);
    EXPECT_LT(dot_discrepancy(t.inverse(a), x, a, t.inverse_adjoint(x)), 1e-10);
  }
}

TEST(WaveletTransform, ZeroInZeroOut) {
  const WaveletTransform t(WaveletConfig{8, 2, 2.0, 0});
  EXPECT_EQ(max_abs(t.forward(Vector::Zero(t.n_samples()))), 0.0);
  EXPECT_EQ(max_abs(t.inverse(Vector::Zero(t.n_coeffs()))), 0.0);
  EXPECT_EQ(max_abs(t.forward_adjoint(Vector::Zero(t.n_coeffs()))), 0.0);
  EXPECT_EQ(max_abs(t.inverse_adjoint(Vector::Zero(t.n_samples()))), 0.0);
}

TEST(WaveletTransform, LowPassSignalLivesInScalingCoefficients) {
  const WaveletConfig c{32, 3, 2.0, 2};
  const WaveletTransform t(c);
  // ell <= lambda^(j_min - 1) sits below every wavelet's support.
  HarmonicCoeffs h(32);
  const Vector r = random_vector(9, 4);
  for (int i = 0; i < 9; ++i) h.data[i] = r[i];
  const Vector x = SphereTransform(32).inverse(h.data);
  const Vector alpha = t.forward(x);
  const auto& layout = t.layout();
  EXPECT_LT(max_abs(alpha.tail(alpha.size() - layout.block_size(0))), 1e-12);
  Vector only_scaling = Vector::Zero(alpha.size());
  only_scaling.head(layout.block_size(0)) = alpha.head(layout.block_size(0));
  EXPECT_LT(max_abs(t.inverse(only_scaling) - x), 1e-10);
}

TEST(WaveletTransform, ScaleCoefficientsAreBandLimited) {
  // Re-analysing w^j at a finer Wigner resolution finds nothing at ell >= L^j.
  const WaveletConfig c{16, 3, 2.0, 0};
  const WaveletTransform t(c);
  const WaveletCoeffs a = t.forward(SphericalMap(SphericalGrid(16), random_map(16, 5)));
  const int j = 2;
  const RotationMap& w = a.scale(j);
  const WignerTransform coarse(w.grid.L(), w.grid.N());
  const Vector hat = coarse.forward(w.samples);
  const WignerIndex small(w.grid.L(), w.grid.N());
  const WignerIndex big(w.grid.L() + 3, w.grid.N());
  Vector padded = Vector::Zero(static_cast<Eigen::Index>(big.size()));
  for (int ell = 0; ell < small.L(); ++ell)
    for (int m = -ell; m <= ell; ++m)
      for (int n = -small.n_max(ell); n <= small.n_max(ell); ++n)
        padded[big(ell, m, n)] = hat[small(ell, m, n)];
  const WignerTransform fine(big.L(), big.N());
  const Vector again = fine.forward(fine.inverse(padded));
  for (int ell = small.L(); ell < big.L(); ++ell)
    for (int m = -ell; m <= ell; ++m)
      for (int n = -big.n_max(ell); n <= big.n_max(ell); ++n)
        EXPECT_LT(std::abs(again[big(ell, m, n)]), 1e-12);
  EXPECT_LT(max_abs(coarse.inverse(hat) - w.samples), 1e-10);
}

TEST(WaveletTransform, RealMapGivesRealCoefficients) {
  const WaveletTransform t(WaveletConfig{16, 4, 2.0, 1});
  const Vector x = random_map(16, 6).real().cast<Complex>();
  // A real map is not band-limited in general; project it first.
  const Vector xb = SphereTransform(16).inverse(SphereTransform(16).forward(x));
  EXPECT_LT(max_abs(t.forward(xb).imag().cast<Complex>()), 1e-11);
}

TEST(WaveletCoeffs, FlattenRoundTrip) {
  const WaveletConfig c{16, 2, 2.0, 1};
  const WaveletLayout layout(c);
  const Vector v = random_vector(layout.size(), 9);
  const WaveletCoeffs a = WaveletCoeffs::unflatten(c, v);
  EXPECT_EQ(a.scales.size(), static_cast<std::size_t>(c.n_scales()));
  EXPECT_EQ(a.scale(c.j_max()).grid.L(), 16);
  EXPECT_EQ(a.flatten(), v);
  EXPECT_THROW(WaveletCoeffs::unflatten(c, Vector::Zero(3)), SizeError);
}

TEST(WaveletTransform, TypedInterface) {
  const WaveletKernels k(WaveletConfig{8, 2, 2.0, 0});
  const SphericalMap x(SphericalGrid(8), random_map(8, 12));
  const WaveletCoeffs a = wavelet_forward(x, k);
  EXPECT_LT(max_abs(wavelet_inverse(a, k).samples - x.samples), 1e-10);
  EXPECT_THROW((void)wavelet_forward(SphericalMap(SphericalGrid(9)), k), SizeError);
  const WaveletCoeffs other(WaveletConfig{8, 1, 2.0, 0});
  EXPECT_THROW((void)wavelet_inverse(other, k), SizeError);
  EXPECT_EQ(wavelet_inverse_adjoint(x, k).flatten().size(), WaveletLayout(k.config()).size());
  EXPECT_EQ(wavelet_forward_adjoint(a, k).samples.size(), x.samples.size());
}

// --- dense composition ----------------------------------------------------

struct DenseWavelet {
  Matrix analysis;   // H N W Y-tilde
  Matrix synthesis;  // Y W^dagger H-tilde
};

DenseWavelet dense_wavelet(const WaveletKernels& k) {
  const WaveletConfig& c = k.config();
  const WaveletLayout layout(c);
  const DenseSphereOracle sphere(c.L);
  const Matrix Yt = sphere.forward_matrix();
  const Matrix Y = sphere.inverse_matrix();
  const Eigen::Index n_x = Yt.cols();

  DenseWavelet out{Matrix::Zero(layout.size(), n_x), Matrix::Zero(n_x, layout.size())};
  // Scaling block.
  {
    const int Ls = c.scaling_L();
    const DenseSphereOracle s(Ls);
    Matrix S = Matrix::Zero(Ls * Ls, c.L * c.L);
    for (int ell = 0; ell < Ls; ++ell)
      for (int m = -ell; m <= ell; ++m)
        S(ell * ell + ell + m, ell * ell + ell + m) =
            std::sqrt(4 * kPi / (2 * ell + 1)) * k.upsilon(ell);
    out.analysis.block(0, 0, layout.block_size(0), n_x) = s.inverse_matrix() * S * Yt;
    out.synthesis.block(0, 0, n_x, layout.block_size(0)) = Y * S.adjoint() * s.forward_matrix();
  }
  for (int j = c.j_min; j <= c.j_max(); ++j) {
    const int b = j - c.j_min + 1;
    const WignerIndex idx(c.scale_L(j), c.scale_N(j));
    const DenseWignerOracle d(idx.L(), idx.N());
    Matrix W = Matrix::Zero(static_cast<Eigen::Index>(idx.size()), c.L * c.L);
    Matrix Nrm = Matrix::Zero(W.rows(), W.rows());
    for (int ell = 0; ell < idx.L(); ++ell)
      for (int m = -ell; m <= ell; ++m)
        for (int n = -idx.n_max(ell); n <= idx.n_max(ell); ++n) {
          const auto r = static_cast<Eigen::Index>(idx(ell, m, n));
          W(r, ell * ell + ell + m) = std::conj(k.psi(j, ell, n));
          Nrm(r, r) = 8 * kPi * kPi / (2 * ell + 1);
        }
    out.analysis.block(layout.block_offset(b), 0, layout.block_size(b), n_x) =
        d.inverse_matrix() * Nrm * W * Yt;
    out.synthesis.block(0, layout.block_offset(b), n_x, layout.block_size(b)) =
        Y * W.adjoint() * d.forward_matrix();
  }
  return out;
}

TEST(WaveletTransform, MatchesDenseComposition) {
  for (const WaveletConfig c : {WaveletConfig{8, 1, 2.0, 0}, WaveletConfig{8, 3, 2.0, 1}}) {
    const WaveletKernels k(c);
    const WaveletTransform t(std::make_shared<const WaveletKernels>(k));
    const DenseWavelet dense = dense_wavelet(k);
    for (int trial = 0; trial < 3; ++trial) {
      const Vector x = random_vector(t.n_samples(), 40 + trial);
      const Vector a = random_vector(t.n_coeffs(), 50 + trial);
      EXPECT_LT(max_abs(t.forward(x) - dense.analysis * x), 1e-10);
      EXPECT_LT(max_abs(t.inverse(a) - dense.synthesis * a), 1e-10);
      EXPECT_LT(max_abs(t.forward_adjoint(a) - dense.analysis.adjoint() * a), 1e-10);
      EXPECT_LT(max_abs(t.inverse_adjoint(x) - dense.synthesis.adjoint() * x), 1e-10);
    }
  }
}

}  // namespace
}  // namespace sphsparse
