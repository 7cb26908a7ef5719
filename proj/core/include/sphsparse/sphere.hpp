#pragma once

#include <memory>

#include "sphsparse/so3.hpp"
#include "sphsparse/types.hpp"
#include "sphsparse/wigner_d.hpp"

namespace sphsparse {

/// Equiangular sphere sampling with L rings and 2L - 1 longitudes:
/// theta_t = (2t + 1) pi / (2L - 1), t < L (the last ring is the south pole),
/// phi_p = 2 pi p / (2L - 1). Samples are row-major in (t, p).
class SphericalGrid {
 public:
  explicit SphericalGrid(int L) : L_(BandLimit(L).value()) {}

  [[nodiscard]] int L() const noexcept { return L_; }
  [[nodiscard]] int n_theta() const noexcept { return L_; }
  [[nodiscard]] int n_phi() const noexcept { return 2 * L_ - 1; }
  [[nodiscard]] Eigen::Index size() const noexcept {
    return static_cast<Eigen::Index>(n_theta()) * n_phi();
  }
  [[nodiscard]] double theta(int t) const noexcept { return (2.0 * t + 1.0) * kPi / (2 * L_ - 1); }
  [[nodiscard]] double phi(int p) const noexcept { return 2.0 * kPi * p / (2 * L_ - 1); }
  [[nodiscard]] Eigen::Index index(int t, int p) const noexcept {
    return static_cast<Eigen::Index>(t) * n_phi() + p;
  }

  friend bool operator==(const SphericalGrid&, const SphericalGrid&) = default;

 private:
  int L_;
};

/// Spherical harmonic coefficients x_lm, 0 <= ell < L, at i = ell^2 + ell + m.
struct HarmonicCoeffs {
  int L;
  Vector data;
  /// Set when the coefficients describe a real field,
  /// x_{l,-m} = (-1)^m conj(x_lm).
  bool real_signal = false;

  explicit HarmonicCoeffs(int L_)
      : L(BandLimit(L_).value()), data(Vector::Zero(static_cast<Eigen::Index>(L_) * L_)) {}
  HarmonicCoeffs(int L_, Vector d, bool real = false)
      : L(BandLimit(L_).value()), data(std::move(d)), real_signal(real) {
    require_size(data.size(), static_cast<Eigen::Index>(L) * L, "HarmonicCoeffs");
  }

  static constexpr Eigen::Index index(int ell, int m) noexcept {
    return static_cast<Eigen::Index>(ell) * ell + ell + m;
  }
  [[nodiscard]] Complex& operator()(int ell, int m) { return data[index(ell, m)]; }
  [[nodiscard]] Complex operator()(int ell, int m) const { return data[index(ell, m)]; }

  /// Largest violation of the real-field symmetry.
  [[nodiscard]] double reality_defect() const;
};

struct SphericalMap {
  SphericalGrid grid;
  Vector samples;

  explicit SphericalMap(SphericalGrid g) : grid(g), samples(Vector::Zero(g.size())) {}
  SphericalMap(SphericalGrid g, Vector s) : grid(g), samples(std::move(s)) {
    require_size(samples.size(), grid.size(), "SphericalMap");
  }
};

/// Forward (Y-tilde) and inverse (Y) spherical harmonic transforms on
/// SphericalGrid and their adjoints. Harmonics are orthonormal with the
/// Condon-Shortley phase,
///   Y_lm(theta, phi) = sqrt((2l+1)/4pi) exp(i m phi) d^l_{m0}(theta).
/// forward(inverse(x)) == x for every coefficient vector.
class SphereTransform {
 public:
  explicit SphereTransform(int L, Backend backend = Backend::fast);
  ~SphereTransform();
  SphereTransform(SphereTransform&&) noexcept;
  SphereTransform& operator=(SphereTransform&&) noexcept;

  [[nodiscard]] int L() const noexcept { return L_; }
  [[nodiscard]] Backend backend() const noexcept { return backend_; }
  [[nodiscard]] SphericalGrid grid() const { return SphericalGrid(L_); }
  [[nodiscard]] Eigen::Index n_samples() const { return grid().size(); }
  [[nodiscard]] Eigen::Index n_coeffs() const { return static_cast<Eigen::Index>(L_) * L_; }

  [[nodiscard]] Vector forward(const Vector& samples) const;
  [[nodiscard]] Vector inverse(const Vector& coeffs) const;
  [[nodiscard]] Vector forward_adjoint(const Vector& coeffs) const;
  [[nodiscard]] Vector inverse_adjoint(const Vector& samples) const;

  [[nodiscard]] HarmonicCoeffs forward(const SphericalMap& map) const;
  [[nodiscard]] SphericalMap inverse(const HarmonicCoeffs& coeffs) const;
  [[nodiscard]] SphericalMap forward_adjoint(const HarmonicCoeffs& coeffs) const;
  [[nodiscard]] HarmonicCoeffs inverse_adjoint(const SphericalMap& map) const;

  static std::shared_ptr<const SphereTransform> cached(int L, Backend backend = Backend::fast);

  class Engine;

 private:
  int L_;
  Backend backend_;
  std::unique_ptr<Engine> engine_;
};

HarmonicCoeffs sht_forward(const SphericalMap& map);
SphericalMap sht_inverse(const HarmonicCoeffs& coeffs);
SphericalMap sht_forward_adjoint(const HarmonicCoeffs& coeffs);
HarmonicCoeffs sht_inverse_adjoint(const SphericalMap& map);

/// Coefficients truncated (or zero-padded) to band-limit L.
HarmonicCoeffs truncate(const HarmonicCoeffs& coeffs, int L);

}  // namespace sphsparse
