#include "sphsparse/sphere.hpp"

#include <map>
#include <mutex>

#include "detail/beta_stage.hpp"
#include "detail/fft.hpp"
#include "sphsparse/dense_oracle.hpp"

namespace sphsparse {

double HarmonicCoeffs::reality_defect() const {
  double worst = 0.0;
  for (int ell = 0; ell < L; ++ell)
    for (int m = 1; m <= ell; ++m) {
      const Complex mirror = (m % 2 == 0 ? 1.0 : -1.0) * std::conj((*this)(ell, m));
      worst = std::max(worst, std::abs((*this)(ell, -m) - mirror));
    }
  for (int ell = 0; ell < L; ++ell) worst = std::max(worst, std::abs((*this)(ell, 0).imag()));
  return worst;
}

class SphereTransform::Engine {
 public:
  virtual ~Engine() = default;
  virtual Vector forward(const Vector& x) const = 0;
  virtual Vector inverse(const Vector& x) const = 0;
  virtual Vector forward_adjoint(const Vector& x) const = 0;
  virtual Vector inverse_adjoint(const Vector& x) const = 0;
};

namespace {

int wrap(int k, int n) {
  const int r = k % n;
  return r < 0 ? r + n : r;
}

// The sphere transform is the N = 1 colatitude stage with per-ell factor
// sqrt((2l+1)/4pi) on both sides and a 1-D FFT along each ring.
class FastEngine final : public SphereTransform::Engine {
 public:
  explicit FastEngine(int L)
      : L_(L),
        stage_(L, 1),
        fwd_(detail::FftPlan::rows(2 * L - 1, L, detail::FftPlan::Direction::forward)),
        bwd_(detail::FftPlan::rows(2 * L - 1, L, detail::FftPlan::Direction::backward)),
        norm_(static_cast<Eigen::Index>(L) * L) {
    for (int ell = 0; ell < L; ++ell)
      for (int m = -ell; m <= ell; ++m)
        norm_[HarmonicCoeffs::index(ell, m)] = std::sqrt((2.0 * ell + 1.0) / (4.0 * kPi));
  }

  Vector forward(const Vector& x) const override {
    detail::AlignedBuffer work(x.data(), x.data() + x.size());
    fwd_.execute(work.data());
    std::vector<Complex> rings(stage_.ring_size());
    gather(work, rings, 2.0 * kPi / (2 * L_ - 1));
    Vector out(norm_.size());
    stage_.analysis(rings.data(), out.data());
    return (out.array() * norm_.array()).matrix();
  }

  Vector inverse(const Vector& c) const override {
    const Vector scaled = (c.array() * norm_.array()).matrix();
    std::vector<Complex> rings(stage_.ring_size());
    stage_.synthesis(scaled.data(), rings.data());
    detail::AlignedBuffer out(static_cast<std::size_t>(L_) * (2 * L_ - 1));
    scatter(rings, out, 1.0);
    bwd_.execute(out.data());
    return Eigen::Map<const Vector>(out.data(), static_cast<Eigen::Index>(out.size()));
  }

  Vector forward_adjoint(const Vector& c) const override {
    const Vector scaled = (c.array() * norm_.array()).matrix();
    std::vector<Complex> rings(stage_.ring_size());
    stage_.analysis_adjoint(scaled.data(), rings.data());
    detail::AlignedBuffer out(static_cast<std::size_t>(L_) * (2 * L_ - 1));
    scatter(rings, out, 2.0 * kPi / (2 * L_ - 1));
    bwd_.execute(out.data());
    return Eigen::Map<const Vector>(out.data(), static_cast<Eigen::Index>(out.size()));
  }

  Vector inverse_adjoint(const Vector& x) const override {
    detail::AlignedBuffer work(x.data(), x.data() + x.size());
    fwd_.execute(work.data());
    std::vector<Complex> rings(stage_.ring_size());
    gather(work, rings, 1.0);
    Vector out(norm_.size());
    stage_.synthesis_adjoint(rings.data(), out.data());
    return (out.array() * norm_.array()).matrix();
  }

 private:
  // Ring layout is [m][t]; samples are [t][p] after the FFT along p.
  void gather(const detail::AlignedBuffer& spectrum, std::vector<Complex>& rings, double scale) const {
    const int P = 2 * L_ - 1;
    for (int m = -(L_ - 1); m <= L_ - 1; ++m) {
      Complex* r = rings.data() + static_cast<std::size_t>(stage_.pair(m, 0)) * L_;
      const int col = wrap(m, P);
      for (int t = 0; t < L_; ++t) r[t] = scale * spectrum[static_cast<Eigen::Index>(t) * P + col];
    }
  }

  void scatter(const std::vector<Complex>& rings, detail::AlignedBuffer& spectrum, double scale) const {
    const int P = 2 * L_ - 1;
    for (int m = -(L_ - 1); m <= L_ - 1; ++m) {
      const Complex* r = rings.data() + static_cast<std::size_t>(stage_.pair(m, 0)) * L_;
      const int col = wrap(m, P);
      for (int t = 0; t < L_; ++t) spectrum[static_cast<Eigen::Index>(t) * P + col] = scale * r[t];
    }
  }

  int L_;
  detail::BetaStage stage_;
  detail::FftPlan fwd_;
  detail::FftPlan bwd_;
  Vector norm_;
};

class DenseEngine final : public SphereTransform::Engine {
 public:
  explicit DenseEngine(int L) : oracle_(L) {}
  Vector forward(const Vector& x) const override { return oracle_.forward(x); }
  Vector inverse(const Vector& x) const override { return oracle_.inverse(x); }
  Vector forward_adjoint(const Vector& x) const override { return oracle_.forward_adjoint(x); }
  Vector inverse_adjoint(const Vector& x) const override { return oracle_.inverse_adjoint(x); }

 private:
  DenseSphereOracle oracle_;
};

}  // namespace

SphereTransform::SphereTransform(int L, Backend backend)
    : L_(BandLimit(L).value()), backend_(backend) {
  if (backend == Backend::fast)
    engine_ = std::make_unique<FastEngine>(L);
  else
    engine_ = std::make_unique<DenseEngine>(L);
}

SphereTransform::~SphereTransform() = default;
SphereTransform::SphereTransform(SphereTransform&&) noexcept = default;
SphereTransform& SphereTransform::operator=(SphereTransform&&) noexcept = default;

Vector SphereTransform::forward(const Vector& samples) const {
  require_size(samples.size(), n_samples(), "sht_forward");
  return engine_->forward(samples);
}

Vector SphereTransform::inverse(const Vector& coeffs) const {
  require_size(coeffs.size(), n_coeffs(), "sht_inverse");
  return engine_->inverse(coeffs);
}

Vector SphereTransform::forward_adjoint(const Vector& coeffs) const {
  require_size(coeffs.size(), n_coeffs(), "sht_forward_adjoint");
  return engine_->forward_adjoint(coeffs);
}

Vector SphereTransform::inverse_adjoint(const Vector& samples) const {
  require_size(samples.size(), n_samples(), "sht_inverse_adjoint");
  return engine_->inverse_adjoint(samples);
}

HarmonicCoeffs SphereTransform::forward(const SphericalMap& map) const {
  if (!(map.grid == grid())) throw SizeError("sht_forward: map grid does not match transform");
  return {L_, forward(map.samples)};
}

SphericalMap SphereTransform::inverse(const HarmonicCoeffs& coeffs) const {
  if (coeffs.L != L_) throw SizeError("sht_inverse: band-limit mismatch");
  return {grid(), inverse(coeffs.data)};
}

SphericalMap SphereTransform::forward_adjoint(const HarmonicCoeffs& coeffs) const {
  if (coeffs.L != L_) throw SizeError("sht_forward_adjoint: band-limit mismatch");
  return {grid(), forward_adjoint(coeffs.data)};
}

HarmonicCoeffs SphereTransform::inverse_adjoint(const SphericalMap& map) const {
  if (!(map.grid == grid())) throw SizeError("sht_inverse_adjoint: map grid does not match transform");
  return {L_, inverse_adjoint(map.samples)};
}

std::shared_ptr<const SphereTransform> SphereTransform::cached(int L, Backend backend) {
  static std::mutex mutex;
  static std::map<std::pair<int, Backend>, std::shared_ptr<const SphereTransform>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{L, backend}];
  if (!slot) slot = std::make_shared<const SphereTransform>(L, backend);
  return slot;
}

HarmonicCoeffs sht_forward(const SphericalMap& map) {
  return SphereTransform::cached(map.grid.L())->forward(map);
}

SphericalMap sht_inverse(const HarmonicCoeffs& coeffs) {
  return SphereTransform::cached(coeffs.L)->inverse(coeffs);
}

SphericalMap sht_forward_adjoint(const HarmonicCoeffs& coeffs) {
  return SphereTransform::cached(coeffs.L)->forward_adjoint(coeffs);
}

HarmonicCoeffs sht_inverse_adjoint(const SphericalMap& map) {
  return SphereTransform::cached(map.grid.L())->inverse_adjoint(map);
}

HarmonicCoeffs truncate(const HarmonicCoeffs& coeffs, int L) {
  HarmonicCoeffs out(L);
  const Eigen::Index n = std::min(out.data.size(), coeffs.data.size());
  out.data.head(n) = coeffs.data.head(n);
  out.real_signal = coeffs.real_signal;
  return out;
}

}  // namespace sphsparse
