#pragma once

#include <memory>
#include <vector>

#include "sphsparse/types.hpp"

namespace sphsparse {

/// How a transform is evaluated: the O(N L^3) Fourier route, or the dense
/// oracle (direct quadrature matrices, O(N L^4)); the latter exists for
/// verification and small problems.
enum class Backend { fast, dense };

/// Flat layout of Wigner coefficients f^ell_mn for 0 <= ell < L, |m| <= ell,
/// |n| <= min(N - 1, ell); ell-major, then m, then n.
class WignerIndex {
 public:
  WignerIndex(int L, int N);

  [[nodiscard]] int L() const noexcept { return L_; }
  [[nodiscard]] int N() const noexcept { return N_; }
  [[nodiscard]] int n_max(int ell) const noexcept { return ell < N_ - 1 ? ell : N_ - 1; }
  [[nodiscard]] std::size_t offset(int ell) const noexcept { return offsets_[ell]; }
  [[nodiscard]] std::size_t size() const noexcept { return offsets_.back(); }
  [[nodiscard]] std::size_t operator()(int ell, int m, int n) const noexcept {
    const int nm = n_max(ell);
    return offsets_[ell] + static_cast<std::size_t>(m + ell) * (2 * nm + 1) + (n + nm);
  }

 private:
  int L_;
  int N_;
  std::vector<std::size_t> offsets_;
};

/// Equiangular sampling of SO(3) in zyz Euler angles (alpha, beta, gamma):
/// alpha_a = 2 pi a / (2L - 1), beta_b = (2b + 1) pi / (2L - 1),
/// gamma_g = 2 pi g / (2N - 1). Samples are row-major in (a, b, g).
class RotationGrid {
 public:
  RotationGrid(int L, int N);

  [[nodiscard]] int L() const noexcept { return L_; }
  [[nodiscard]] int N() const noexcept { return N_; }
  [[nodiscard]] int n_alpha() const noexcept { return 2 * L_ - 1; }
  [[nodiscard]] int n_beta() const noexcept { return L_; }
  [[nodiscard]] int n_gamma() const noexcept { return 2 * N_ - 1; }
  [[nodiscard]] Eigen::Index size() const noexcept {
    return static_cast<Eigen::Index>(n_alpha()) * n_beta() * n_gamma();
  }
  [[nodiscard]] double alpha(int a) const noexcept { return 2.0 * kPi * a / n_alpha(); }
  [[nodiscard]] double beta(int b) const noexcept { return (2.0 * b + 1.0) * kPi / (2 * L_ - 1); }
  [[nodiscard]] double gamma(int g) const noexcept { return 2.0 * kPi * g / n_gamma(); }
  [[nodiscard]] Eigen::Index index(int a, int b, int g) const noexcept {
    return (static_cast<Eigen::Index>(a) * n_beta() + b) * n_gamma() + g;
  }

  friend bool operator==(const RotationGrid&, const RotationGrid&) = default;

 private:
  int L_;
  int N_;
};

struct RotationMap {
  RotationGrid grid;
  Vector samples;

  explicit RotationMap(RotationGrid g) : grid(g), samples(Vector::Zero(g.size())) {}
  RotationMap(RotationGrid g, Vector s) : grid(g), samples(std::move(s)) {
    require_size(samples.size(), grid.size(), "RotationMap");
  }
};

struct WignerCoeffs {
  int L;
  int N;
  Vector data;

  WignerCoeffs(int L_, int N_);
  WignerCoeffs(int L_, int N_, Vector d);

  [[nodiscard]] Complex& operator()(int ell, int m, int n);
  [[nodiscard]] Complex operator()(int ell, int m, int n) const;
};

/// Forward (D-tilde) and inverse (D) Wigner transforms at band-limits (L, N),
/// and their adjoints.
///
///   inverse:  f(rho) = sum_{ell m n} (2 ell + 1) / (8 pi^2) f^ell_mn D^ell*_mn(rho)
///   forward:  f^ell_mn = int_SO(3) f(rho) D^ell_mn(rho) d rho
///
/// The forward transform is exact for band-limited samples, so
/// forward(inverse(c)) == c. inverse(forward(f)) is not the identity on
/// arbitrary sample vectors, and the adjoints differ from the inverses.
class WignerTransform {
 public:
  WignerTransform(int L, int N, Backend backend = Backend::fast);
  ~WignerTransform();
  WignerTransform(WignerTransform&&) noexcept;
  WignerTransform& operator=(WignerTransform&&) noexcept;

  [[nodiscard]] int L() const noexcept { return L_; }
  [[nodiscard]] int N() const noexcept { return N_; }
  [[nodiscard]] Backend backend() const noexcept { return backend_; }
  [[nodiscard]] RotationGrid grid() const { return {L_, N_}; }
  [[nodiscard]] Eigen::Index n_samples() const { return grid().size(); }
  [[nodiscard]] Eigen::Index n_coeffs() const;

  [[nodiscard]] Vector forward(const Vector& samples) const;
  [[nodiscard]] Vector inverse(const Vector& coeffs) const;
  [[nodiscard]] Vector forward_adjoint(const Vector& coeffs) const;
  [[nodiscard]] Vector inverse_adjoint(const Vector& samples) const;

  [[nodiscard]] WignerCoeffs forward(const RotationMap& map) const;
  [[nodiscard]] RotationMap inverse(const WignerCoeffs& coeffs) const;
  [[nodiscard]] RotationMap forward_adjoint(const WignerCoeffs& coeffs) const;
  [[nodiscard]] WignerCoeffs inverse_adjoint(const RotationMap& map) const;

  /// Shared instance per (L, N, backend).
  static std::shared_ptr<const WignerTransform> cached(int L, int N,
                                                       Backend backend = Backend::fast);

  class Engine;

 private:
  int L_;
  int N_;
  Backend backend_;
  std::unique_ptr<Engine> engine_;
};

WignerCoeffs wigner_forward(const RotationMap& map);
RotationMap wigner_inverse(const WignerCoeffs& coeffs);
RotationMap wigner_forward_adjoint(const WignerCoeffs& coeffs);
WignerCoeffs wigner_inverse_adjoint(const RotationMap& map);

}  // namespace sphsparse
