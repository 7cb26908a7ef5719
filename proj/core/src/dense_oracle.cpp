#include "sphsparse/dense_oracle.hpp"

#include <cmath>

#include <Eigen/QR>

#include "sphsparse/wigner_d.hpp"

namespace sphsparse {

namespace {

int wrap(int k, int n) {
  const int r = k % n;
  return r < 0 ? r + n : r;
}

// Gauss-Legendre nodes and weights on [0, pi].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = 0.5 * kPi * (1.0 - z);
    w[i] = 0.5 * kPi * 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Periodic Dirichlet kernel of period 2L-1 and degree L-1.
double dirichlet(double x, int L) {
  const int P = 2 * L - 1;
  const double s = std::sin(0.5 * x);
  if (std::abs(s) < 1e-14) return 1.0;  // P is odd
  return std::sin(0.5 * P * x) / (P * s);
}

}  // namespace

DenseWignerOracle::DenseWignerOracle(int L, int N) : L_(L), N_(N) {
  if (L < 1 || N < 1 || N > L) throw ConfigError("DenseWignerOracle: need 1 <= N <= L");
  n_samples_ = static_cast<Eigen::Index>(2 * L - 1) * L * (2 * N - 1);
  offsets_.resize(L + 1, 0);
  for (int ell = 0; ell < L; ++ell) {
    const int nm = std::min(N - 1, ell);
    offsets_[ell + 1] = offsets_[ell] + static_cast<std::size_t>(2 * ell + 1) * (2 * nm + 1);
  }
  n_coeffs_ = static_cast<Eigen::Index>(offsets_.back());

  const int P = 2 * L - 1;
  std::vector<double> beta(L);
  for (int b = 0; b < L; ++b) beta[b] = (2.0 * b + 1.0) * kPi / P;

  // The integrand K * d * sin has trigonometric degree <= 2L - 1; Gauss-Legendre
  // resolves such frequencies on [0, pi] once the node count exceeds ~pi L.
  std::vector<double> nodes;
  std::vector<double> weights;
  gauss_legendre(4 * L + 32, nodes, weights);
  const int Q = static_cast<int>(nodes.size());

  // Interpolation kernels at the nodes, for even and odd (m + n).
  Eigen::MatrixXd kern_even(Q, L);
  Eigen::MatrixXd kern_odd(Q, L);
  for (int q = 0; q < Q; ++q) {
    for (int b = 0; b < L; ++b) {
      const double direct = dirichlet(nodes[q] - beta[b], L);
      const double mirror = b < L - 1 ? dirichlet(nodes[q] + beta[b], L) : 0.0;
      // The mirror sample of beta_b sits at 2 pi - beta_b, i.e. at -beta_b.
      kern_even(q, b) = direct + mirror;
      kern_odd(q, b) = direct - mirror;
    }
  }

  for (int m = -(L - 1); m <= L - 1; ++m) {
    for (int n = -(N - 1); n <= N - 1; ++n) {
      Block blk;
      blk.m = m;
      blk.n = n;
      blk.ell0 = std::max(std::abs(m), std::abs(n));
      const int nl = L - blk.ell0;
      Eigen::MatrixXd dq(Q, nl);
      for (int q = 0; q < Q; ++q) {
        const auto d = wigner_d_recurrence(m, n, L - 1, nodes[q]);
        const double ws = weights[q] * std::sin(nodes[q]);
        for (int i = 0; i < nl; ++i) dq(q, i) = d[blk.ell0 + i] * ws;
      }
      const auto& kern = ((m + n) % 2 == 0) ? kern_even : kern_odd;
      blk.analysis = dq.transpose() * kern;
      blk.synthesis.resize(L, nl);
      for (int b = 0; b < L; ++b) {
        const auto d = wigner_d_recurrence(m, n, L - 1, beta[b]);
        for (int i = 0; i < nl; ++i) blk.synthesis(b, i) = d[blk.ell0 + i];
      }
      blocks_.push_back(std::move(blk));
    }
  }
}

std::size_t DenseWignerOracle::coeff_index(int ell, int m, int n) const {
  const int nm = std::min(N_ - 1, ell);
  return offsets_[ell] + static_cast<std::size_t>(m + ell) * (2 * nm + 1) + (n + nm);
}

// rings[block][b] = sum_{a,g} f(a,b,g) exp(-i (m alpha_a + n gamma_g)); the
// reverse map carries exp(+i ...) and is its exact adjoint.
void DenseWignerOracle::rings_from_samples(const Vector& samples,
                                           std::vector<Complex>& rings) const {
  const int A = 2 * L_ - 1;
  const int G = 2 * N_ - 1;
  const double sgn = -1.0;
  rings.assign(blocks_.size() * L_, Complex{});
  std::vector<Complex> ea(A);
  std::vector<Complex> eg(G);
  std::size_t k = 0;
  for (const auto& blk : blocks_) {
    for (int a = 0; a < A; ++a) ea[a] = std::polar(1.0, sgn * 2.0 * kPi * wrap(blk.m * a, A) / A);
    for (int g = 0; g < G; ++g) eg[g] = std::polar(1.0, sgn * 2.0 * kPi * wrap(blk.n * g, G) / G);
    for (int b = 0; b < L_; ++b) {
      Complex acc{};
      for (int a = 0; a < A; ++a) {
        Complex inner{};
        const Complex* f = samples.data() + (static_cast<std::size_t>(a) * L_ + b) * G;
        for (int g = 0; g < G; ++g) inner += f[g] * eg[g];
        acc += inner * ea[a];
      }
      rings[k * L_ + b] = acc;
    }
    ++k;
  }
}

void DenseWignerOracle::samples_from_rings(const std::vector<Complex>& rings,
                                           Vector& samples) const {
  const int A = 2 * L_ - 1;
  const int G = 2 * N_ - 1;
  const double sgn = 1.0;
  samples = Vector::Zero(n_samples_);
  std::vector<Complex> ea(A);
  std::vector<Complex> eg(G);
  std::size_t k = 0;
  for (const auto& blk : blocks_) {
    for (int a = 0; a < A; ++a) ea[a] = std::polar(1.0, sgn * 2.0 * kPi * wrap(blk.m * a, A) / A);
    for (int g = 0; g < G; ++g) eg[g] = std::polar(1.0, sgn * 2.0 * kPi * wrap(blk.n * g, G) / G);
    for (int a = 0; a < A; ++a) {
      for (int b = 0; b < L_; ++b) {
        const Complex v = rings[k * L_ + b] * ea[a];
        Complex* f = samples.data() + (static_cast<std::size_t>(a) * L_ + b) * G;
        for (int g = 0; g < G; ++g) f[g] += v * eg[g];
      }
    }
    ++k;
  }
}

Vector DenseWignerOracle::forward(const Vector& samples) const {
  require_size(samples.size(), n_samples_, "DenseWignerOracle::forward");
  std::vector<Complex> rings;
  rings_from_samples(samples, rings);
  const double scale = 4.0 * kPi * kPi / ((2.0 * L_ - 1.0) * (2.0 * N_ - 1.0));
  Vector out = Vector::Zero(n_coeffs_);
  std::size_t k = 0;
  for (const auto& blk : blocks_) {
    const Eigen::Map<const Vector> ring(rings.data() + k * L_, L_);
    const Vector c = blk.analysis.cast<Complex>() * ring * scale;
    for (int i = 0; i < c.size(); ++i) out[coeff_index(blk.ell0 + i, blk.m, blk.n)] = c[i];
    ++k;
  }
  return out;
}

Vector DenseWignerOracle::inverse(const Vector& coeffs) const {
  require_size(coeffs.size(), n_coeffs_, "DenseWignerOracle::inverse");
  std::vector<Complex> rings(blocks_.size() * L_);
  std::size_t k = 0;
  for (const auto& blk : blocks_) {
    Vector c(L_ - blk.ell0);
    for (int i = 0; i < c.size(); ++i) {
      const int ell = blk.ell0 + i;
      c[i] = coeffs[coeff_index(ell, blk.m, blk.n)] * ((2.0 * ell + 1.0) / (8.0 * kPi * kPi));
    }
    Eigen::Map<Vector>(rings.data() + k * L_, L_) = blk.synthesis.cast<Complex>() * c;
    ++k;
  }
  Vector out;
  samples_from_rings(rings, out);
  return out;
}

Vector DenseWignerOracle::forward_adjoint(const Vector& coeffs) const {
  require_size(coeffs.size(), n_coeffs_, "DenseWignerOracle::forward_adjoint");
  const double scale = 4.0 * kPi * kPi / ((2.0 * L_ - 1.0) * (2.0 * N_ - 1.0));
  std::vector<Complex> rings(blocks_.size() * L_);
  std::size_t k = 0;
  for (const auto& blk : blocks_) {
    Vector c(L_ - blk.ell0);
    for (int i = 0; i < c.size(); ++i) c[i] = coeffs[coeff_index(blk.ell0 + i, blk.m, blk.n)];
    Eigen::Map<Vector>(rings.data() + k * L_, L_) =
        blk.analysis.transpose().cast<Complex>() * c * scale;
    ++k;
  }
  Vector out;
  samples_from_rings(rings, out);
  return out;
}

Vector DenseWignerOracle::inverse_adjoint(const Vector& samples) const {
  require_size(samples.size(), n_samples_, "DenseWignerOracle::inverse_adjoint");
  std::vector<Complex> rings;
  rings_from_samples(samples, rings);
  Vector out = Vector::Zero(n_coeffs_);
  std::size_t k = 0;
  for (const auto& blk : blocks_) {
    const Eigen::Map<const Vector> ring(rings.data() + k * L_, L_);
    const Vector c = blk.synthesis.transpose().cast<Complex>() * ring;
    for (int i = 0; i < c.size(); ++i) {
      const int ell = blk.ell0 + i;
      out[coeff_index(ell, blk.m, blk.n)] = c[i] * ((2.0 * ell + 1.0) / (8.0 * kPi * kPi));
    }
    ++k;
  }
  return out;
}

Matrix DenseWignerOracle::forward_matrix() const {
  Matrix out(n_coeffs_, n_samples_);
  for (Eigen::Index j = 0; j < n_samples_; ++j) out.col(j) = forward(Vector::Unit(n_samples_, j));
  return out;
}

Matrix DenseWignerOracle::inverse_matrix() const {
  Matrix out(n_samples_, n_coeffs_);
  for (Eigen::Index j = 0; j < n_coeffs_; ++j) out.col(j) = inverse(Vector::Unit(n_coeffs_, j));
  return out;
}

// The sphere grid (t, p) and the N = 1 rotation grid (a, b) are transposes of
// each other; the coefficient layouts coincide.
namespace {

Vector sphere_to_rotation(const Vector& x, int L) {
  const int P = 2 * L - 1;
  Vector out(x.size());
  for (int t = 0; t < L; ++t)
    for (int p = 0; p < P; ++p) out[static_cast<Eigen::Index>(p) * L + t] = x[t * P + p];
  return out;
}

Vector rotation_to_sphere(const Vector& x, int L) {
  const int P = 2 * L - 1;
  Vector out(x.size());
  for (int t = 0; t < L; ++t)
    for (int p = 0; p < P; ++p) out[t * P + p] = x[static_cast<Eigen::Index>(p) * L + t];
  return out;
}

RealVector ell_factors(int L, double (*f)(int)) {
  RealVector out(static_cast<Eigen::Index>(L) * L);
  for (int ell = 0; ell < L; ++ell)
    for (int m = -ell; m <= ell; ++m) out[ell * ell + ell + m] = f(ell);
  return out;
}

// With N = 1 the gamma integral contributes 2 pi, so
//   x_lm = sqrt((2l+1)/4pi) / (2 pi) * f^l_m0
//   inverse_sphere(x) = inverse_wigner(c), c = 8 pi^2 / (2l+1) * sqrt((2l+1)/4pi) x.
double forward_factor(int ell) { return std::sqrt((2.0 * ell + 1.0) / (4.0 * kPi)) / (2.0 * kPi); }
double inverse_factor(int ell) {
  return 8.0 * kPi * kPi / (2.0 * ell + 1.0) * std::sqrt((2.0 * ell + 1.0) / (4.0 * kPi));
}

}  // namespace

DenseSphereOracle::DenseSphereOracle(int L) : L_(L), inner_(L, 1) {}

Vector DenseSphereOracle::forward(const Vector& samples) const {
  require_size(samples.size(), static_cast<Eigen::Index>(L_) * (2 * L_ - 1),
               "DenseSphereOracle::forward");
  const Vector c = inner_.forward(sphere_to_rotation(samples, L_));
  return (c.array() * ell_factors(L_, forward_factor).cast<Complex>().array()).matrix();
}

Vector DenseSphereOracle::inverse(const Vector& coeffs) const {
  require_size(coeffs.size(), static_cast<Eigen::Index>(L_) * L_, "DenseSphereOracle::inverse");
  const Vector c = (coeffs.array() * ell_factors(L_, inverse_factor).cast<Complex>().array()).matrix();
  return rotation_to_sphere(inner_.inverse(c), L_);
}

Vector DenseSphereOracle::forward_adjoint(const Vector& coeffs) const {
  require_size(coeffs.size(), static_cast<Eigen::Index>(L_) * L_,
               "DenseSphereOracle::forward_adjoint");
  const Vector c = (coeffs.array() * ell_factors(L_, forward_factor).cast<Complex>().array()).matrix();
  return rotation_to_sphere(inner_.forward_adjoint(c), L_);
}

Vector DenseSphereOracle::inverse_adjoint(const Vector& samples) const {
  require_size(samples.size(), static_cast<Eigen::Index>(L_) * (2 * L_ - 1),
               "DenseSphereOracle::inverse_adjoint");
  const Vector c = inner_.inverse_adjoint(sphere_to_rotation(samples, L_));
  return (c.array() * ell_factors(L_, inverse_factor).cast<Complex>().array()).matrix();
}

Matrix DenseSphereOracle::forward_matrix() const {
  const Eigen::Index ns = static_cast<Eigen::Index>(L_) * (2 * L_ - 1);
  Matrix out(static_cast<Eigen::Index>(L_) * L_, ns);
  for (Eigen::Index j = 0; j < ns; ++j) out.col(j) = forward(Vector::Unit(ns, j));
  return out;
}

Matrix DenseSphereOracle::inverse_matrix() const {
  const Eigen::Index nc = static_cast<Eigen::Index>(L_) * L_;
  Matrix out(static_cast<Eigen::Index>(L_) * (2 * L_ - 1), nc);
  for (Eigen::Index j = 0; j < nc; ++j) out.col(j) = inverse(Vector::Unit(nc, j));
  return out;
}

Vector DenseSphereOracle::solve_coefficients(const Vector& samples) const {
  const int P = 2 * L_ - 1;
  require_size(samples.size(), static_cast<Eigen::Index>(L_) * P,
               "DenseSphereOracle::solve_coefficients");
  Vector out = Vector::Zero(static_cast<Eigen::Index>(L_) * L_);
  for (int m = -(L_ - 1); m <= L_ - 1; ++m) {
    const int ell0 = std::abs(m);
    const int nl = L_ - ell0;
    // Rows: every grid point; columns: Y_lm for ell >= |m|.
    Matrix Y(static_cast<Eigen::Index>(L_) * P, nl);
    for (int t = 0; t < L_; ++t) {
      const double theta = (2.0 * t + 1.0) * kPi / P;
      const auto d = wigner_d_recurrence(m, 0, L_ - 1, theta);
      for (int p = 0; p < P; ++p) {
        const Complex e = std::polar(1.0, 2.0 * kPi * wrap(m * p, P) / P);
        for (int i = 0; i < nl; ++i) {
          const int ell = ell0 + i;
          Y(t * P + p, i) = std::sqrt((2.0 * ell + 1.0) / (4.0 * kPi)) * d[ell] * e;
        }
      }
    }
    // Project out the other orders: they are orthogonal over p to this one,
    // so solving the full least-squares problem per m is exact for
    // band-limited input.
    const Vector c = Y.colPivHouseholderQr().solve(samples);
    for (int i = 0; i < nl; ++i) {
      const int ell = ell0 + i;
      out[ell * ell + ell + m] = c[i];
    }
  }
  return out;
}

}  // namespace sphsparse
