#pragma once

#include <vector>

#include "sphsparse/types.hpp"

namespace sphsparse {

/// Reference transforms that share no code with the fast route.
///
/// Wigner d-functions come from the three-term recurrence in ell (not from
/// Delta tables), the azimuthal sums are naive DFTs, and the colatitude
/// quadrature integrates the band-limited interpolant of the ring samples
/// with Gauss-Legendre nodes. Cost is O(N L^4) per transform plus an
/// O(N L^4) set-up, so these are meant for L <~ 64.
class DenseWignerOracle {
 public:
  DenseWignerOracle(int L, int N);

  [[nodiscard]] int L() const noexcept { return L_; }
  [[nodiscard]] int N() const noexcept { return N_; }
  [[nodiscard]] Eigen::Index n_samples() const noexcept { return n_samples_; }
  [[nodiscard]] Eigen::Index n_coeffs() const noexcept { return n_coeffs_; }

  [[nodiscard]] Vector forward(const Vector& samples) const;
  [[nodiscard]] Vector inverse(const Vector& coeffs) const;
  [[nodiscard]] Vector forward_adjoint(const Vector& coeffs) const;
  [[nodiscard]] Vector inverse_adjoint(const Vector& samples) const;

  /// Explicit matrices (n_coeffs x n_samples and n_samples x n_coeffs).
  [[nodiscard]] Matrix forward_matrix() const;
  [[nodiscard]] Matrix inverse_matrix() const;

 private:
  struct Block {
    int m;
    int n;
    int ell0;
    Eigen::MatrixXd analysis;   // (L - ell0) x L: coeff_ell = sum_b A(ell, b) F(beta_b)
    Eigen::MatrixXd synthesis;  // L x (L - ell0): F(beta_b) = sum_ell S(b, ell) c_ell
  };

  [[nodiscard]] std::size_t coeff_index(int ell, int m, int n) const;
  void rings_from_samples(const Vector& samples, std::vector<Complex>& rings) const;
  void samples_from_rings(const std::vector<Complex>& rings, Vector& samples) const;

  int L_;
  int N_;
  Eigen::Index n_samples_;
  Eigen::Index n_coeffs_;
  std::vector<std::size_t> offsets_;
  std::vector<Block> blocks_;
};

/// Dense reference for the sphere transforms at band-limit L. Same
/// construction as DenseWignerOracle with N = 1 and the harmonic
/// normalisation sqrt((2 ell + 1) / 4 pi).
class DenseSphereOracle {
 public:
  explicit DenseSphereOracle(int L);

  [[nodiscard]] int L() const noexcept { return L_; }

  [[nodiscard]] Vector forward(const Vector& samples) const;
  [[nodiscard]] Vector inverse(const Vector& coeffs) const;
  [[nodiscard]] Vector forward_adjoint(const Vector& coeffs) const;
  [[nodiscard]] Vector inverse_adjoint(const Vector& samples) const;

  [[nodiscard]] Matrix forward_matrix() const;
  [[nodiscard]] Matrix inverse_matrix() const;

  /// Harmonic coefficients from samples by least squares against Y_lm
  /// evaluated at every grid point, one azimuthal order at a time.
  [[nodiscard]] Vector solve_coefficients(const Vector& samples) const;

 private:
  int L_;
  DenseWignerOracle inner_;
};

}  // namespace sphsparse
