#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "sphsparse/types.hpp"

namespace sphsparse {

/// Wigner small-d functions evaluated at beta = pi/2 for every 0 <= ell < L,
/// written Delta^ell_{m' m} = d^ell_{m' m}(pi/2).
///
/// Built with Risbo's recursion, which couples the (ell - 1/2) matrix with a
/// spin-1/2 rotation; entries stay bounded by one so no renormalisation is
/// needed at any band-limit. Storage is transposed per ell so that, for fixed
/// m, the values over m' = -ell..ell are contiguous.
class DeltaTable {
 public:
  explicit DeltaTable(int L);

  [[nodiscard]] int band_limit() const noexcept { return L_; }

  [[nodiscard]] double operator()(int ell, int mp, int m) const {
    return data_[offset(ell) + static_cast<std::size_t>(m + ell) * (2 * ell + 1) + (mp + ell)];
  }

  /// Pointer to Delta^ell_{-ell, m}; the next 2 ell entries run over m'.
  [[nodiscard]] const double* column(int ell, int m) const {
    return data_.data() + offset(ell) + static_cast<std::size_t>(m + ell) * (2 * ell + 1);
  }

  /// Process-wide cached table covering at least band-limit L.
  static std::shared_ptr<const DeltaTable> shared(int L);

 private:
  static std::size_t offset(int ell) {
    const auto l = static_cast<std::size_t>(ell);
    return l * (4 * l * l - 1) / 3;
  }

  int L_;
  std::vector<double> data_;
};

/// Full d^ell matrix at arbitrary beta from Risbo's recursion.
/// Entry (m' + ell, m + ell) holds d^ell_{m' m}(beta).
Eigen::MatrixXd wigner_d_matrix(int ell, double beta);

/// d^ell_{m n}(beta) from the explicit factorial sum in extended precision.
/// Suffers cancellation for large ell; intended for ell <~ 20 and for seeding
/// the ell recurrence below.
double wigner_d_explicit(int ell, int m, int n, double beta);

/// d^ell_{m n}(beta) for ell = 0 .. ell_max via the three-term recurrence in
/// ell at fixed (m, n). Entries with ell < max(|m|, |n|) are zero.
std::vector<double> wigner_d_recurrence(int m, int n, int ell_max, double beta);

/// Exact quadrature weight w(m) = int_0^pi exp(i m theta) sin(theta) dtheta.
Complex quadrature_weight(int m);

}  // namespace sphsparse
