#include "detail/beta_stage.hpp"

#include <algorithm>
#include <cmath>

namespace sphsparse::detail {

namespace {

int parity_of(int m, int n) { return std::abs(m + n) % 2; }

// i^k for integer k.
Complex i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

BetaStage::BetaStage(int L, int N)
    : L_(L), N_(N), index_(L, N), delta_(DeltaTable::shared(L)), slot_(n_pairs()) {
  for (int m = -(L - 1); m <= L - 1; ++m)
    for (int n = -(N - 1); n <= N - 1; ++n) slot_[pair(m, n)] = count_[parity_of(m, n)]++;

  const int P = 2 * L - 1;
  auto theta = [P](int b) { return (2 * b + 1) * kPi / P; };
  std::vector<Complex> w(4 * L - 3);  // w(u), u = -(2L-2)..2L-2
  for (int u = -(2 * L - 2); u <= 2 * L - 2; ++u) w[u + 2 * L - 2] = quadrature_weight(u);
  auto weight = [&](int u) { return w[u + 2 * L - 2]; };

  for (int p = 0; p < 2; ++p) {
    const double sign = p == 0 ? 1.0 : -1.0;
    // Fourier coefficients of the extended samples at theta_b and 2 pi - theta_b
    // (beta = pi is its own mirror).
    Eigen::MatrixXcd fourier(P, L);
    for (int k = -(L - 1); k <= L - 1; ++k)
      for (int b = 0; b < L; ++b) {
        Complex v = std::polar(1.0, -k * theta(b));
        if (b < L - 1) v += sign * std::polar(1.0, k * theta(b));
        fourier(k + L - 1, b) = v / static_cast<double>(P);
      }
    // Convolution with w, then fold m' and -m'.
    Eigen::MatrixXcd fold(L, P);
    for (int k = -(L - 1); k <= L - 1; ++k) {
      fold(0, k + L - 1) = weight(k);
      for (int mp = 1; mp < L; ++mp)
        fold(mp, k + L - 1) = weight(mp + k) + sign * weight(k - mp);
    }
    const Eigen::MatrixXcd q = fold * fourier;
    // Even parity gives a real matrix, odd parity i times a real matrix. The
    // odd m' = 0 row meets Delta_{0m} Delta_{0n} = 0 and is dropped.
    quadrature_[p] = p == 0 ? Eigen::MatrixXd(q.real()) : Eigen::MatrixXd(q.imag());
    if (p == 1) quadrature_[p].row(0).setZero();

    Eigen::MatrixXd& e = expansion_[p];
    e.resize(L, L);
    for (int b = 0; b < L; ++b) {
      e(b, 0) = p == 0 ? 1.0 : 0.0;
      for (int mp = 1; mp < L; ++mp)
        e(b, mp) = 2.0 * (p == 0 ? std::cos(mp * theta(b)) : std::sin(mp * theta(b)));
    }
  }
}

BetaStage::Columns BetaStage::make_columns() const {
  return {Eigen::MatrixXd(L_, 2 * count_[0]), Eigen::MatrixXd(L_, 2 * count_[1])};
}

void BetaStage::gather(const Complex* rings, Columns& cols) const {
  for (int m = -(L_ - 1); m <= L_ - 1; ++m)
    for (int n = -(N_ - 1); n <= N_ - 1; ++n) {
      const int id = pair(m, n);
      const Complex* f = rings + static_cast<std::size_t>(id) * L_;
      auto& c = cols[parity_of(m, n)];
      double* re = c.col(2 * slot_[id]).data();
      double* im = c.col(2 * slot_[id] + 1).data();
      for (int b = 0; b < L_; ++b) {
        re[b] = f[b].real();
        im[b] = f[b].imag();
      }
    }
}

void BetaStage::scatter(const Columns& cols, Complex* rings) const {
  for (int m = -(L_ - 1); m <= L_ - 1; ++m)
    for (int n = -(N_ - 1); n <= N_ - 1; ++n) {
      const int id = pair(m, n);
      Complex* f = rings + static_cast<std::size_t>(id) * L_;
      const auto& c = cols[parity_of(m, n)];
      const double* re = c.col(2 * slot_[id]).data();
      const double* im = c.col(2 * slot_[id] + 1).data();
      for (int b = 0; b < L_; ++b) f[b] = Complex(re[b], im[b]);
    }
}

void BetaStage::delta_reduce(const Columns& spectra, Complex* coeffs, bool adjoint) const {
  for (int m = -(L_ - 1); m <= L_ - 1; ++m)
    for (int n = -(N_ - 1); n <= N_ - 1; ++n) {
      const int ell_start = std::max(std::abs(m), std::abs(n));
      if (ell_start > L_ - 1) continue;
      const int p = parity_of(m, n);
      const int s = slot_[pair(m, n)];
      const double* re = spectra[p].col(2 * s).data();
      const double* im = spectra[p].col(2 * s + 1).data();
      const Complex phase = adjoint ? std::conj(i_pow(n - m + p)) : i_pow(n - m + p);
      for (int ell = ell_start; ell < L_; ++ell) {
        const double* a = delta_->column(ell, m) + ell;
        const double* b = delta_->column(ell, n) + ell;
        double sr = 0.0;
        double si = 0.0;
        for (int mp = 0; mp <= ell; ++mp) {
          const double ab = a[mp] * b[mp];
          sr += ab * re[mp];
          si += ab * im[mp];
        }
        coeffs[index_(ell, m, n)] = mul(phase, Complex(sr, si));
      }
    }
}

void BetaStage::delta_expand(const Complex* coeffs, Columns& spectra, bool adjoint) const {
  spectra[0].setZero();
  spectra[1].setZero();
  for (int m = -(L_ - 1); m <= L_ - 1; ++m)
    for (int n = -(N_ - 1); n <= N_ - 1; ++n) {
      const int ell_start = std::max(std::abs(m), std::abs(n));
      if (ell_start > L_ - 1) continue;
      const int p = parity_of(m, n);
      const int s = slot_[pair(m, n)];
      double* re = spectra[p].col(2 * s).data();
      double* im = spectra[p].col(2 * s + 1).data();
      const Complex phase = adjoint ? std::conj(i_pow(n - m + p)) : i_pow(n - m + p);
      for (int ell = ell_start; ell < L_; ++ell) {
        const Complex c = mul(phase, coeffs[index_(ell, m, n)]);
        const double cr = c.real();
        const double ci = c.imag();
        const double* a = delta_->column(ell, m) + ell;
        const double* b = delta_->column(ell, n) + ell;
        for (int mp = 0; mp <= ell; ++mp) {
          const double ab = a[mp] * b[mp];
          re[mp] += ab * cr;
          im[mp] += ab * ci;
        }
      }
    }
}

void BetaStage::analysis(const Complex* rings, Complex* coeffs) const {
  Columns samples = make_columns();
  Columns spectra = make_columns();
  gather(rings, samples);
  for (int p = 0; p < 2; ++p) spectra[p].noalias() = quadrature_[p] * samples[p];
  delta_reduce(spectra, coeffs, false);
}

void BetaStage::analysis_adjoint(const Complex* coeffs, Complex* rings) const {
  Columns spectra = make_columns();
  Columns samples = make_columns();
  delta_expand(coeffs, spectra, true);
  for (int p = 0; p < 2; ++p) samples[p].noalias() = quadrature_[p].transpose() * spectra[p];
  scatter(samples, rings);
}

void BetaStage::synthesis(const Complex* coeffs, Complex* rings) const {
  Columns spectra = make_columns();
  Columns samples = make_columns();
  delta_expand(coeffs, spectra, false);
  for (int p = 0; p < 2; ++p) samples[p].noalias() = expansion_[p] * spectra[p];
  scatter(samples, rings);
}

void BetaStage::synthesis_adjoint(const Complex* rings, Complex* coeffs) const {
  Columns samples = make_columns();
  Columns spectra = make_columns();
  gather(rings, samples);
  for (int p = 0; p < 2; ++p) spectra[p].noalias() = expansion_[p].transpose() * samples[p];
  delta_reduce(spectra, coeffs, true);
}

}  // namespace sphsparse::detail
