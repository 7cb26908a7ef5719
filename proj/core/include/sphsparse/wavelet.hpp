#pragma once

#include <memory>
#include <vector>

#include "sphsparse/so3.hpp"
#include "sphsparse/sphere.hpp"

namespace sphsparse {

/// Scale-discretised wavelet parameters. Scales run over [j_min, j_max()] with
/// j_max = ceil(log_lambda(L - 1)); scale j lives at band-limits
/// (scale_L(j), scale_N(j)), the scaling coefficients at scaling_L().
struct WaveletConfig {
  int L = 32;
  int N = 1;  // azimuthal band-limit, 1 is axisymmetric
  double lambda = 2.0;
  int j_min = 0;

  /// Throws ConfigError on L < 2, N outside [1, L], lambda <= 1,
  /// j_min < 0, j_min > j_max or lambda^j_min > L.
  void validate() const;

  [[nodiscard]] int j_max() const;
  [[nodiscard]] int n_scales() const { return j_max() - j_min + 1; }
  [[nodiscard]] int scale_L(int j) const;
  [[nodiscard]] int scale_N(int j) const;
  [[nodiscard]] int scaling_L() const;

  friend bool operator==(const WaveletConfig&, const WaveletConfig&) = default;
};

/// ceil(lambda^p) for the band-limit rules, robust to lambda^p landing a few
/// ulps above an integer.
int ceil_power(double lambda, int p);

/// Smooth partition of unity generator: 1 on [0, 1/lambda], 0 on [1, inf),
/// C-infinity in between.
double tiling_profile(double t, double lambda);

/// Harmonic kernels Psi^j_{ell n} and Upsilon_{ell 0}.
///
///   Upsilon_l0 = sqrt((2l+1)/4pi) Phi(l),  Psi^j_ln = sqrt((2l+1)/8pi^2) kappa_j(l) zeta_ln
///
/// with Phi^2 + sum_j kappa_j^2 = 1 for ell < L and sum_n |zeta_ln|^2 = 1, which
/// makes analysis followed by synthesis the identity. zeta is real and even in n
/// for odd N and i times real for even N, so kernels describe real fields.
class WaveletKernels {
 public:
  explicit WaveletKernels(const WaveletConfig& config);

  [[nodiscard]] const WaveletConfig& config() const noexcept { return config_; }

  [[nodiscard]] double kappa(int j, int ell) const;
  [[nodiscard]] double phi(int ell) const { return phi_[ell]; }
  [[nodiscard]] Complex zeta(int ell, int n) const;

  /// Zero outside ell < scale_L(j), |n| <= min(N - 1, ell).
  [[nodiscard]] Complex psi(int j, int ell, int n) const;
  [[nodiscard]] double upsilon(int ell) const;

 private:
  WaveletConfig config_;
  std::vector<std::vector<double>> kappa_;  // [j - j_min][ell]
  std::vector<double> phi_;
  std::vector<Complex> zeta_;  // [ell][n + N - 1]
  int j_max_;
  std::vector<int> scale_L_;                // [j - j_min]
  std::vector<std::vector<Complex>> psi_;  // [j - j_min][ell][n + N - 1]
};

WaveletKernels make_kernels(const WaveletConfig& config);

/// Offsets of the blocks of the concatenated coefficient vector
/// alpha = [s; w^j_min; ...; w^j_max].
class WaveletLayout {
 public:
  explicit WaveletLayout(const WaveletConfig& config);

  [[nodiscard]] const WaveletConfig& config() const noexcept { return config_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return offsets_.back(); }
  [[nodiscard]] SphericalGrid scaling_grid() const { return SphericalGrid(config_.scaling_L()); }
  [[nodiscard]] RotationGrid scale_grid(int j) const {
    return {config_.scale_L(j), config_.scale_N(j)};
  }
  /// Block b = 0 is the scaling map, b = 1 + j - j_min the scale j.
  [[nodiscard]] Eigen::Index block_offset(int b) const { return offsets_[b]; }
  [[nodiscard]] Eigen::Index block_size(int b) const { return offsets_[b + 1] - offsets_[b]; }
  [[nodiscard]] int n_blocks() const { return static_cast<int>(offsets_.size()) - 1; }

 private:
  WaveletConfig config_;
  std::vector<Eigen::Index> offsets_;
};

struct WaveletCoeffs {
  WaveletConfig config;
  SphericalMap scaling;
  std::vector<RotationMap> scales;  // j_min .. j_max

  explicit WaveletCoeffs(const WaveletConfig& c);

  [[nodiscard]] RotationMap& scale(int j) { return scales[j - config.j_min]; }
  [[nodiscard]] const RotationMap& scale(int j) const { return scales[j - config.j_min]; }

  [[nodiscard]] Vector flatten() const;
  static WaveletCoeffs unflatten(const WaveletConfig& c, const Vector& alpha);
};

/// Wavelet analysis (Psi-tilde), synthesis (Psi) and their adjoints on flat
/// vectors: maps are SphericalGrid(L) samples, coefficients WaveletLayout vectors.
class WaveletTransform {
 public:
  explicit WaveletTransform(std::shared_ptr<const WaveletKernels> kernels,
                            Backend backend = Backend::fast);
  explicit WaveletTransform(const WaveletConfig& config, Backend backend = Backend::fast);

  [[nodiscard]] const WaveletKernels& kernels() const noexcept { return *kernels_; }
  [[nodiscard]] const WaveletConfig& config() const noexcept { return kernels_->config(); }
  [[nodiscard]] const WaveletLayout& layout() const noexcept { return layout_; }
  [[nodiscard]] Eigen::Index n_samples() const { return SphericalGrid(config().L).size(); }
  [[nodiscard]] Eigen::Index n_coeffs() const { return layout_.size(); }

  [[nodiscard]] Vector forward(const Vector& x) const;
  [[nodiscard]] Vector inverse(const Vector& alpha) const;
  [[nodiscard]] Vector forward_adjoint(const Vector& alpha) const;
  [[nodiscard]] Vector inverse_adjoint(const Vector& x) const;

  [[nodiscard]] WaveletCoeffs forward(const SphericalMap& x) const;
  [[nodiscard]] SphericalMap inverse(const WaveletCoeffs& alpha) const;
  [[nodiscard]] SphericalMap forward_adjoint(const WaveletCoeffs& alpha) const;
  [[nodiscard]] WaveletCoeffs inverse_adjoint(const SphericalMap& x) const;

 private:
  // Harmonic-space multiplications; `normalise` applies 8 pi^2/(2l+1) to the
  // wavelet blocks.
  [[nodiscard]] std::vector<Vector> multiply(const Vector& xhat, bool normalise) const;
  [[nodiscard]] Vector multiply_adjoint(const std::vector<Vector>& blocks, bool normalise) const;

  std::shared_ptr<const WaveletKernels> kernels_;
  WaveletLayout layout_;
  std::shared_ptr<const SphereTransform> sphere_;
  std::shared_ptr<const SphereTransform> scaling_sphere_;
  std::vector<std::shared_ptr<const WignerTransform>> wigner_;
};

WaveletCoeffs wavelet_forward(const SphericalMap& x, const WaveletKernels& kernels);
SphericalMap wavelet_inverse(const WaveletCoeffs& alpha, const WaveletKernels& kernels);
SphericalMap wavelet_forward_adjoint(const WaveletCoeffs& alpha, const WaveletKernels& kernels);
WaveletCoeffs wavelet_inverse_adjoint(const SphericalMap& x, const WaveletKernels& kernels);

}  // namespace sphsparse
