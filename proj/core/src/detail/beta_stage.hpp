#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "sphsparse/so3.hpp"
#include "sphsparse/wigner_d.hpp"

namespace sphsparse::detail {

/// The colatitude part shared by the sphere and rotation-group transforms.
///
/// Works on per-(m, n) ring data F_mn(beta_b), b in [0, L), laid out
/// [pair][b] with pair = (m + L - 1) * (2N - 1) + (n + N - 1), and on Wigner
/// coefficients in the WignerIndex layout. Uses
///   d^ell_mn(beta) = i^(n-m) sum_m' Delta^ell_{m'm} Delta^ell_{m'n} exp(i m' beta).
///
/// F_mn extends to a 2 pi periodic function with parity p = (-1)^(m+n), so its
/// Fourier series is even or odd in m' and only m' >= 0 is kept ("folded"
/// spectra). The map from the L samples to the folded spectrum, including the
/// exact weights w(u) = int_0^pi exp(i u beta) sin(beta) dbeta, is a fixed
/// L x L matrix per parity. It equals c_p R_p with R_p real and c_p = 1 or i,
/// so all four directions are real matrix products on the (re, im) columns.
class BetaStage {
 public:
  BetaStage(int L, int N);

  [[nodiscard]] int L() const noexcept { return L_; }
  [[nodiscard]] int N() const noexcept { return N_; }
  [[nodiscard]] int n_pairs() const noexcept { return (2 * L_ - 1) * (2 * N_ - 1); }
  [[nodiscard]] int pair(int m, int n) const noexcept {
    return (m + L_ - 1) * (2 * N_ - 1) + (n + N_ - 1);
  }
  [[nodiscard]] std::size_t ring_size() const noexcept {
    return static_cast<std::size_t>(n_pairs()) * L_;
  }
  [[nodiscard]] const WignerIndex& index() const noexcept { return index_; }

  /// coeff^ell_mn = int_0^pi F_mn(beta) d^ell_mn(beta) sin(beta) dbeta (exact for
  /// band-limited F).
  void analysis(const Complex* rings, Complex* coeffs) const;
  void analysis_adjoint(const Complex* coeffs, Complex* rings) const;

  /// F_mn(beta_b) = sum_ell coeff^ell_mn d^ell_mn(beta_b).
  void synthesis(const Complex* coeffs, Complex* rings) const;
  void synthesis_adjoint(const Complex* rings, Complex* coeffs) const;

 private:
  using Columns = std::array<Eigen::MatrixXd, 2>;  // per parity, (re, im) column pairs

  [[nodiscard]] Columns make_columns() const;
  void gather(const Complex* rings, Columns& cols) const;
  void scatter(const Columns& cols, Complex* rings) const;

  // coeff^ell = phase * sum_{m' >= 0} Delta Delta spectrum_{m'}, for every pair.
  void delta_reduce(const Columns& spectra, Complex* coeffs, bool adjoint) const;
  // spectrum_{m'} = phase * sum_ell Delta Delta coeff^ell, for every pair.
  void delta_expand(const Complex* coeffs, Columns& spectra, bool adjoint) const;

  int L_;
  int N_;
  WignerIndex index_;
  std::shared_ptr<const DeltaTable> delta_;
  std::vector<int> slot_;          // pair -> column pair within its parity block
  std::array<int, 2> count_{};     // pairs per parity (0 even, 1 odd)
  std::array<Eigen::MatrixXd, 2> quadrature_;  // samples -> folded spectrum
  std::array<Eigen::MatrixXd, 2> expansion_;   // folded spectrum -> samples
};

}  // namespace sphsparse::detail
