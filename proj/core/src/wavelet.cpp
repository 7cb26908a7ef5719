#include "sphsparse/wavelet.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/binomial.hpp>

namespace sphsparse {

namespace {

double bump(double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; }

double integrate_profile(double lo, double hi, double lambda) {
  if (hi <= lo) return 0.0;
  const auto f = [lambda](double u) {
    const double s = bump(2.0 * lambda / (lambda - 1.0) * (u - 1.0 / lambda) - 1.0);
    return s * s / u;
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 10, 1e-12);
}

}  // namespace

int ceil_power(double lambda, int p) {
  const double v = std::pow(lambda, p);
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-10 * std::max(1.0, v)) return static_cast<int>(r);
  return static_cast<int>(std::ceil(v));
}

void WaveletConfig::validate() const {
  if (L < 2) throw ConfigError("wavelets need L >= 2");
  if (N < 1 || N > L) throw ConfigError("azimuthal band-limit N must lie in [1, L]");
  if (!(lambda > 1.0)) throw ConfigError("lambda must exceed 1");
  if (j_min < 0) throw ConfigError("j_min must be >= 0");
  if (std::pow(lambda, j_min) > L * (1.0 + 1e-12))
    throw ConfigError("lambda^j_min exceeds the band-limit");
  if (j_min > j_max()) throw ConfigError("j_min exceeds j_max");
}

int WaveletConfig::j_max() const {
  // Smallest J with lambda^J >= L - 1.
  int J = 0;
  while (std::pow(lambda, J) < (L - 1) * (1.0 - 1e-12)) ++J;
  return J;
}

int WaveletConfig::scale_L(int j) const { return std::min(ceil_power(lambda, j + 1), L); }
int WaveletConfig::scale_N(int j) const { return std::min(N, scale_L(j)); }
int WaveletConfig::scaling_L() const { return std::min(ceil_power(lambda, j_min), L); }

double tiling_profile(double t, double lambda) {
  if (t <= 1.0 / lambda) return 1.0;
  if (t >= 1.0) return 0.0;
  static thread_local double cached_lambda = 0.0;
  static thread_local double norm = 0.0;
  if (cached_lambda != lambda) {
    norm = integrate_profile(1.0 / lambda, 1.0, lambda);
    cached_lambda = lambda;
  }
  return std::clamp(integrate_profile(t, 1.0, lambda) / norm, 0.0, 1.0);
}

WaveletKernels::WaveletKernels(const WaveletConfig& config)
    : config_(config), j_max_((config.validate(), config.j_max())) {
  const int L = config_.L;
  const int N = config_.N;
  const double lambda = config_.lambda;

  // k(ell / lambda^p) for every p needed, shared by neighbouring scales.
  auto profile = [&](int ell, int p) { return tiling_profile(ell / std::pow(lambda, p), lambda); };

  phi_.resize(L);
  for (int ell = 0; ell < L; ++ell) phi_[ell] = std::sqrt(profile(ell, config_.j_min));

  const int jmax = j_max_;
  kappa_.assign(jmax - config_.j_min + 1, std::vector<double>(L, 0.0));
  std::vector<double> below(L);
  for (int ell = 0; ell < L; ++ell) below[ell] = profile(ell, config_.j_min);
  for (int j = config_.j_min; j <= jmax; ++j) {
    for (int ell = 0; ell < L; ++ell) {
      const double above = profile(ell, j + 1);
      kappa_[j - config_.j_min][ell] = std::sqrt(std::max(0.0, above - below[ell]));
      below[ell] = above;
    }
  }

  // Binomial directional profile over n with parity of N - 1.
  zeta_.assign(static_cast<std::size_t>(L) * (2 * N - 1), Complex{});
  const bool odd = (N - 1) % 2 == 1;
  for (int ell = 0; ell < L; ++ell) {
    int g = std::min(N - 1, ell);
    if ((g % 2 == 1) != odd) --g;
    if (g < 0) continue;
    for (int n = -g; n <= g; n += 2) {
      const double a = std::sqrt(boost::math::binomial_coefficient<double>(g, (g - n) / 2) /
                                 std::ldexp(1.0, g));
      zeta_[static_cast<std::size_t>(ell) * (2 * N - 1) + (n + N - 1)] =
          odd ? Complex(0.0, a) : Complex(a, 0.0);
    }
  }

  const int width = 2 * N - 1;
  for (int j = config_.j_min; j <= jmax; ++j) {
    const int Lj = config_.scale_L(j);
    scale_L_.push_back(Lj);
    std::vector<Complex> table(static_cast<std::size_t>(Lj) * width);
    for (int ell = 0; ell < Lj; ++ell)
      for (int n = -std::min(N - 1, ell); n <= std::min(N - 1, ell); ++n)
        table[static_cast<std::size_t>(ell) * width + (n + N - 1)] =
            std::sqrt((2.0 * ell + 1.0) / (8.0 * kPi * kPi)) * kappa_[j - config_.j_min][ell] *
            zeta(ell, n);
    psi_.push_back(std::move(table));
  }
}

double WaveletKernels::kappa(int j, int ell) const {
  if (j < config_.j_min || j > j_max_ || ell < 0 || ell >= config_.L) return 0.0;
  return kappa_[j - config_.j_min][ell];
}

Complex WaveletKernels::zeta(int ell, int n) const {
  const int N = config_.N;
  if (ell < 0 || ell >= config_.L || std::abs(n) > N - 1) return {};
  return zeta_[static_cast<std::size_t>(ell) * (2 * N - 1) + (n + N - 1)];
}

Complex WaveletKernels::psi(int j, int ell, int n) const {
  if (j < config_.j_min || j > j_max_ || ell < 0) return {};
  const int k = j - config_.j_min;
  if (ell >= scale_L_[k] || std::abs(n) > std::min(config_.N - 1, ell)) return {};
  return psi_[k][static_cast<std::size_t>(ell) * (2 * config_.N - 1) + (n + config_.N - 1)];
}

double WaveletKernels::upsilon(int ell) const {
  if (ell < 0 || ell >= config_.scaling_L()) return 0.0;
  return std::sqrt((2.0 * ell + 1.0) / (4.0 * kPi)) * phi_[ell];
}

WaveletKernels make_kernels(const WaveletConfig& config) { return WaveletKernels(config); }

// --- layout ------------------------------------------------------------------

WaveletLayout::WaveletLayout(const WaveletConfig& config) : config_(config) {
  config_.validate();
  offsets_.push_back(0);
  offsets_.push_back(SphericalGrid(config_.scaling_L()).size());
  for (int j = config_.j_min; j <= config_.j_max(); ++j)
    offsets_.push_back(offsets_.back() + scale_grid(j).size());
}

WaveletCoeffs::WaveletCoeffs(const WaveletConfig& c)
    : config(c), scaling(SphericalGrid(c.scaling_L())) {
  for (int j = c.j_min; j <= c.j_max(); ++j)
    scales.emplace_back(RotationGrid(c.scale_L(j), c.scale_N(j)));
}

Vector WaveletCoeffs::flatten() const {
  const WaveletLayout layout(config);
  Vector alpha(layout.size());
  alpha.segment(0, layout.block_size(0)) = scaling.samples;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    const int b = static_cast<int>(k) + 1;
    alpha.segment(layout.block_offset(b), layout.block_size(b)) = scales[k].samples;
  }
  return alpha;
}

WaveletCoeffs WaveletCoeffs::unflatten(const WaveletConfig& c, const Vector& alpha) {
  const WaveletLayout layout(c);
  require_size(alpha.size(), layout.size(), "WaveletCoeffs");
  WaveletCoeffs out(c);
  out.scaling.samples = alpha.segment(0, layout.block_size(0));
  for (std::size_t k = 0; k < out.scales.size(); ++k) {
    const int b = static_cast<int>(k) + 1;
    out.scales[k].samples = alpha.segment(layout.block_offset(b), layout.block_size(b));
  }
  return out;
}

// --- transform ---------------------------------------------------------------

WaveletTransform::WaveletTransform(std::shared_ptr<const WaveletKernels> kernels, Backend backend)
    : kernels_(std::move(kernels)),
      layout_(kernels_->config()),
      sphere_(SphereTransform::cached(config().L, backend)),
      scaling_sphere_(SphereTransform::cached(config().scaling_L(), backend)) {
  for (int j = config().j_min; j <= config().j_max(); ++j)
    wigner_.push_back(
        WignerTransform::cached(config().scale_L(j), config().scale_N(j), backend));
}

WaveletTransform::WaveletTransform(const WaveletConfig& config, Backend backend)
    : WaveletTransform(std::make_shared<const WaveletKernels>(config), backend) {}

std::vector<Vector> WaveletTransform::multiply(const Vector& xhat, bool normalise) const {
  const WaveletConfig& c = config();
  std::vector<Vector> blocks;
  const int Ls = c.scaling_L();
  Vector s = Vector::Zero(static_cast<Eigen::Index>(Ls) * Ls);
  for (int ell = 0; ell < Ls; ++ell) {
    const double f = std::sqrt(4.0 * kPi / (2.0 * ell + 1.0)) * kernels_->upsilon(ell);
    for (int m = -ell; m <= ell; ++m)
      s[HarmonicCoeffs::index(ell, m)] = f * xhat[HarmonicCoeffs::index(ell, m)];
  }
  blocks.push_back(std::move(s));
  for (int j = c.j_min; j <= c.j_max(); ++j) {
    const WignerIndex idx(c.scale_L(j), c.scale_N(j));
    Vector w(static_cast<Eigen::Index>(idx.size()));
    for (int ell = 0; ell < idx.L(); ++ell) {
      const double norm = normalise ? 8.0 * kPi * kPi / (2.0 * ell + 1.0) : 1.0;
      for (int m = -ell; m <= ell; ++m) {
        const Complex x = norm * xhat[HarmonicCoeffs::index(ell, m)];
        for (int n = -idx.n_max(ell); n <= idx.n_max(ell); ++n)
          w[idx(ell, m, n)] = x * std::conj(kernels_->psi(j, ell, n));
      }
    }
    blocks.push_back(std::move(w));
  }
  return blocks;
}

Vector WaveletTransform::multiply_adjoint(const std::vector<Vector>& blocks, bool normalise) const {
  const WaveletConfig& c = config();
  Vector xhat = Vector::Zero(static_cast<Eigen::Index>(c.L) * c.L);
  for (int ell = 0; ell < c.scaling_L(); ++ell) {
    const double f = std::sqrt(4.0 * kPi / (2.0 * ell + 1.0)) * kernels_->upsilon(ell);
    for (int m = -ell; m <= ell; ++m)
      xhat[HarmonicCoeffs::index(ell, m)] += f * blocks[0][HarmonicCoeffs::index(ell, m)];
  }
  for (int j = c.j_min; j <= c.j_max(); ++j) {
    const WignerIndex idx(c.scale_L(j), c.scale_N(j));
    const Vector& w = blocks[j - c.j_min + 1];
    for (int ell = 0; ell < idx.L(); ++ell) {
      const double norm = normalise ? 8.0 * kPi * kPi / (2.0 * ell + 1.0) : 1.0;
      for (int m = -ell; m <= ell; ++m) {
        Complex acc{};
        for (int n = -idx.n_max(ell); n <= idx.n_max(ell); ++n)
          acc += kernels_->psi(j, ell, n) * w[idx(ell, m, n)];
        xhat[HarmonicCoeffs::index(ell, m)] += norm * acc;
      }
    }
  }
  return xhat;
}

Vector WaveletTransform::forward(const Vector& x) const {
  require_size(x.size(), n_samples(), "wavelet_forward");
  const auto blocks = multiply(sphere_->forward(x), true);
  Vector alpha(layout_.size());
  alpha.segment(0, layout_.block_size(0)) = scaling_sphere_->inverse(blocks[0]);
  for (int b = 1; b < layout_.n_blocks(); ++b)
    alpha.segment(layout_.block_offset(b), layout_.block_size(b)) =
        wigner_[b - 1]->inverse(blocks[b]);
  return alpha;
}

Vector WaveletTransform::inverse(const Vector& alpha) const {
  require_size(alpha.size(), n_coeffs(), "wavelet_inverse");
  std::vector<Vector> blocks;
  blocks.push_back(scaling_sphere_->forward(alpha.segment(0, layout_.block_size(0))));
  for (int b = 1; b < layout_.n_blocks(); ++b)
    blocks.push_back(
        wigner_[b - 1]->forward(alpha.segment(layout_.block_offset(b), layout_.block_size(b))));
  return sphere_->inverse(multiply_adjoint(blocks, false));
}

Vector WaveletTransform::forward_adjoint(const Vector& alpha) const {
  require_size(alpha.size(), n_coeffs(), "wavelet_forward_adjoint");
  std::vector<Vector> blocks;
  blocks.push_back(scaling_sphere_->inverse_adjoint(alpha.segment(0, layout_.block_size(0))));
  for (int b = 1; b < layout_.n_blocks(); ++b)
    blocks.push_back(wigner_[b - 1]->inverse_adjoint(
        alpha.segment(layout_.block_offset(b), layout_.block_size(b))));
  return sphere_->forward_adjoint(multiply_adjoint(blocks, true));
}

Vector WaveletTransform::inverse_adjoint(const Vector& x) const {
  require_size(x.size(), n_samples(), "wavelet_inverse_adjoint");
  const auto blocks = multiply(sphere_->inverse_adjoint(x), false);
  Vector alpha(layout_.size());
  alpha.segment(0, layout_.block_size(0)) = scaling_sphere_->forward_adjoint(blocks[0]);
  for (int b = 1; b < layout_.n_blocks(); ++b)
    alpha.segment(layout_.block_offset(b), layout_.block_size(b)) =
        wigner_[b - 1]->forward_adjoint(blocks[b]);
  return alpha;
}

namespace {

void require_config(const WaveletConfig& have, const WaveletConfig& want, const char* what) {
  if (!(have == want)) throw SizeError(std::string(what) + ": coefficient/kernel config mismatch");
}

}  // namespace

WaveletCoeffs WaveletTransform::forward(const SphericalMap& x) const {
  if (x.grid.L() != config().L) throw SizeError("wavelet_forward: map band-limit mismatch");
  return WaveletCoeffs::unflatten(config(), forward(x.samples));
}

SphericalMap WaveletTransform::inverse(const WaveletCoeffs& alpha) const {
  require_config(alpha.config, config(), "wavelet_inverse");
  return {SphericalGrid(config().L), inverse(alpha.flatten())};
}

SphericalMap WaveletTransform::forward_adjoint(const WaveletCoeffs& alpha) const {
  require_config(alpha.config, config(), "wavelet_forward_adjoint");
  return {SphericalGrid(config().L), forward_adjoint(alpha.flatten())};
}

WaveletCoeffs WaveletTransform::inverse_adjoint(const SphericalMap& x) const {
  if (x.grid.L() != config().L) throw SizeError("wavelet_inverse_adjoint: map band-limit mismatch");
  return WaveletCoeffs::unflatten(config(), inverse_adjoint(x.samples));
}

WaveletCoeffs wavelet_forward(const SphericalMap& x, const WaveletKernels& kernels) {
  return WaveletTransform(std::make_shared<const WaveletKernels>(kernels)).forward(x);
}

SphericalMap wavelet_inverse(const WaveletCoeffs& alpha, const WaveletKernels& kernels) {
  return WaveletTransform(std::make_shared<const WaveletKernels>(kernels)).inverse(alpha);
}

SphericalMap wavelet_forward_adjoint(const WaveletCoeffs& alpha, const WaveletKernels& kernels) {
  return WaveletTransform(std::make_shared<const WaveletKernels>(kernels)).forward_adjoint(alpha);
}

WaveletCoeffs wavelet_inverse_adjoint(const SphericalMap& x, const WaveletKernels& kernels) {
  return WaveletTransform(std::make_shared<const WaveletKernels>(kernels)).inverse_adjoint(x);
}

}  // namespace sphsparse
