#include "sphsparse/so3.hpp"

#include <map>
#include <mutex>
#include <tuple>

#include "detail/beta_stage.hpp"
#include "detail/fft.hpp"
#include "sphsparse/dense_oracle.hpp"

namespace sphsparse {

namespace {

void check_band_limits(int L, int N) {
  (void)BandLimit{L};
  if (N < 1 || N > L)
    throw ConfigError("directional band-limit N must satisfy 1 <= N <= L, got N=" +
                      std::to_string(N) + ", L=" + std::to_string(L));
}

int wrap(int k, int n) {
  const int r = k % n;
  return r < 0 ? r + n : r;
}

}  // namespace

WignerIndex::WignerIndex(int L, int N) : L_(L), N_(N), offsets_(L + 1, 0) {
  check_band_limits(L, N);
  for (int ell = 0; ell < L; ++ell) {
    const int nm = n_max(ell);
    offsets_[ell + 1] = offsets_[ell] + static_cast<std::size_t>(2 * ell + 1) * (2 * nm + 1);
  }
}

RotationGrid::RotationGrid(int L, int N) : L_(L), N_(N) { check_band_limits(L, N); }

WignerCoeffs::WignerCoeffs(int L_, int N_)
    : L(L_), N(N_), data(Vector::Zero(static_cast<Eigen::Index>(WignerIndex(L_, N_).size()))) {}

WignerCoeffs::WignerCoeffs(int L_, int N_, Vector d) : L(L_), N(N_), data(std::move(d)) {
  require_size(data.size(), static_cast<Eigen::Index>(WignerIndex(L_, N_).size()), "WignerCoeffs");
}

Complex& WignerCoeffs::operator()(int ell, int m, int n) { return data[WignerIndex(L, N)(ell, m, n)]; }

Complex WignerCoeffs::operator()(int ell, int m, int n) const {
  return data[WignerIndex(L, N)(ell, m, n)];
}

class WignerTransform::Engine {
 public:
  virtual ~Engine() = default;
  virtual Vector forward(const Vector& x) const = 0;
  virtual Vector inverse(const Vector& x) const = 0;
  virtual Vector forward_adjoint(const Vector& x) const = 0;
  virtual Vector inverse_adjoint(const Vector& x) const = 0;
};

namespace {

class FastEngine final : public WignerTransform::Engine {
 public:
  FastEngine(int L, int N)
      : L_(L),
        N_(N),
        stage_(L, N),
        // One 2-D (alpha, gamma) transform per beta ring, in the (a, b, g) layout.
        fwd_(detail::FftPlan::strided_2d(2 * L - 1, L * (2 * N - 1), 2 * N - 1, 1, L, 2 * N - 1,
                                         detail::FftPlan::Direction::forward)),
        bwd_(detail::FftPlan::strided_2d(2 * L - 1, L * (2 * N - 1), 2 * N - 1, 1, L, 2 * N - 1,
                                         detail::FftPlan::Direction::backward)),
        ell_scale_(stage_.index().size()) {
    const auto& idx = stage_.index();
    for (int ell = 0; ell < L; ++ell) {
      const double s = (2.0 * ell + 1.0) / (8.0 * kPi * kPi);
      for (std::size_t i = idx.offset(ell); i < idx.offset(ell + 1); ++i)
        ell_scale_[i] = s;
    }
  }

  Vector forward(const Vector& x) const override {
    detail::AlignedBuffer work(x.data(), x.data() + x.size());
    fwd_.execute(work.data());
    std::vector<Complex> rings(stage_.ring_size());
    gather(work, rings, grid_scale());
    Vector out(static_cast<Eigen::Index>(stage_.index().size()));
    stage_.analysis(rings.data(), out.data());
    return out;
  }

  Vector inverse(const Vector& c) const override {
    Vector scaled = c;
    for (Eigen::Index i = 0; i < scaled.size(); ++i) scaled[i] *= ell_scale_[i];
    std::vector<Complex> rings(stage_.ring_size());
    stage_.synthesis(scaled.data(), rings.data());
    detail::AlignedBuffer out(static_cast<std::size_t>(n_samples()));
    scatter(rings, out, 1.0);
    bwd_.execute(out.data());
    return Eigen::Map<const Vector>(out.data(), n_samples());
  }

  Vector forward_adjoint(const Vector& c) const override {
    std::vector<Complex> rings(stage_.ring_size());
    stage_.analysis_adjoint(c.data(), rings.data());
    detail::AlignedBuffer out(static_cast<std::size_t>(n_samples()));
    scatter(rings, out, grid_scale());
    bwd_.execute(out.data());
    return Eigen::Map<const Vector>(out.data(), n_samples());
  }

  Vector inverse_adjoint(const Vector& x) const override {
    detail::AlignedBuffer work(x.data(), x.data() + x.size());
    fwd_.execute(work.data());
    std::vector<Complex> rings(stage_.ring_size());
    gather(work, rings, 1.0);
    Vector out(static_cast<Eigen::Index>(stage_.index().size()));
    stage_.synthesis_adjoint(rings.data(), out.data());
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] *= ell_scale_[i];
    return out;
  }

 private:
  [[nodiscard]] Eigen::Index n_samples() const {
    return static_cast<Eigen::Index>(2 * L_ - 1) * L_ * (2 * N_ - 1);
  }
  [[nodiscard]] double grid_scale() const {
    return 4.0 * kPi * kPi / ((2.0 * L_ - 1.0) * (2.0 * N_ - 1.0));
  }
  [[nodiscard]] std::size_t sample_index(int m, int b, int n) const {
    return (static_cast<std::size_t>(wrap(m, 2 * L_ - 1)) * L_ + b) * (2 * N_ - 1) +
           wrap(n, 2 * N_ - 1);
  }

  void gather(const detail::AlignedBuffer& spectrum, std::vector<Complex>& rings, double scale) const {
    for (int m = -(L_ - 1); m <= L_ - 1; ++m)
      for (int n = -(N_ - 1); n <= N_ - 1; ++n) {
        Complex* r = rings.data() + static_cast<std::size_t>(stage_.pair(m, n)) * L_;
        for (int b = 0; b < L_; ++b) r[b] = scale * spectrum[sample_index(m, b, n)];
      }
  }

  void scatter(const std::vector<Complex>& rings, detail::AlignedBuffer& spectrum, double scale) const {
    for (int m = -(L_ - 1); m <= L_ - 1; ++m)
      for (int n = -(N_ - 1); n <= N_ - 1; ++n) {
        const Complex* r = rings.data() + static_cast<std::size_t>(stage_.pair(m, n)) * L_;
        for (int b = 0; b < L_; ++b) spectrum[sample_index(m, b, n)] = scale * r[b];
      }
  }

  int L_;
  int N_;
  detail::BetaStage stage_;
  detail::FftPlan fwd_;
  detail::FftPlan bwd_;
  std::vector<double> ell_scale_;
};

class DenseEngine final : public WignerTransform::Engine {
 public:
  DenseEngine(int L, int N) : oracle_(L, N) {}
  Vector forward(const Vector& x) const override { return oracle_.forward(x); }
  Vector inverse(const Vector& x) const override { return oracle_.inverse(x); }
  Vector forward_adjoint(const Vector& x) const override { return oracle_.forward_adjoint(x); }
  Vector inverse_adjoint(const Vector& x) const override { return oracle_.inverse_adjoint(x); }

 private:
  DenseWignerOracle oracle_;
};

}  // namespace

WignerTransform::WignerTransform(int L, int N, Backend backend)
    : L_(L), N_(N), backend_(backend) {
  check_band_limits(L, N);
  if (backend == Backend::fast)
    engine_ = std::make_unique<FastEngine>(L, N);
  else
    engine_ = std::make_unique<DenseEngine>(L, N);
}

WignerTransform::~WignerTransform() = default;
WignerTransform::WignerTransform(WignerTransform&&) noexcept = default;
WignerTransform& WignerTransform::operator=(WignerTransform&&) noexcept = default;

Eigen::Index WignerTransform::n_coeffs() const {
  return static_cast<Eigen::Index>(WignerIndex(L_, N_).size());
}

Vector WignerTransform::forward(const Vector& samples) const {
  require_size(samples.size(), n_samples(), "wigner_forward");
  return engine_->forward(samples);
}

Vector WignerTransform::inverse(const Vector& coeffs) const {
  require_size(coeffs.size(), n_coeffs(), "wigner_inverse");
  return engine_->inverse(coeffs);
}

Vector WignerTransform::forward_adjoint(const Vector& coeffs) const {
  require_size(coeffs.size(), n_coeffs(), "wigner_forward_adjoint");
  return engine_->forward_adjoint(coeffs);
}

Vector WignerTransform::inverse_adjoint(const Vector& samples) const {
  require_size(samples.size(), n_samples(), "wigner_inverse_adjoint");
  return engine_->inverse_adjoint(samples);
}

WignerCoeffs WignerTransform::forward(const RotationMap& map) const {
  if (!(map.grid == grid())) throw SizeError("wigner_forward: map grid does not match transform");
  return {L_, N_, forward(map.samples)};
}

RotationMap WignerTransform::inverse(const WignerCoeffs& coeffs) const {
  if (coeffs.L != L_ || coeffs.N != N_) throw SizeError("wigner_inverse: band-limit mismatch");
  return {grid(), inverse(coeffs.data)};
}

RotationMap WignerTransform::forward_adjoint(const WignerCoeffs& coeffs) const {
  if (coeffs.L != L_ || coeffs.N != N_)
    throw SizeError("wigner_forward_adjoint: band-limit mismatch");
  return {grid(), forward_adjoint(coeffs.data)};
}

WignerCoeffs WignerTransform::inverse_adjoint(const RotationMap& map) const {
  if (!(map.grid == grid()))
    throw SizeError("wigner_inverse_adjoint: map grid does not match transform");
  return {L_, N_, inverse_adjoint(map.samples)};
}

std::shared_ptr<const WignerTransform> WignerTransform::cached(int L, int N, Backend backend) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, Backend>, std::shared_ptr<const WignerTransform>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{L, N, backend}];
  if (!slot) slot = std::make_shared<const WignerTransform>(L, N, backend);
  return slot;
}

WignerCoeffs wigner_forward(const RotationMap& map) {
  return WignerTransform::cached(map.grid.L(), map.grid.N())->forward(map);
}

RotationMap wigner_inverse(const WignerCoeffs& coeffs) {
  return WignerTransform::cached(coeffs.L, coeffs.N)->inverse(coeffs);
}

RotationMap wigner_forward_adjoint(const WignerCoeffs& coeffs) {
  return WignerTransform::cached(coeffs.L, coeffs.N)->forward_adjoint(coeffs);
}

WignerCoeffs wigner_inverse_adjoint(const RotationMap& map) {
  return WignerTransform::cached(map.grid.L(), map.grid.N())->inverse_adjoint(map);
}

}  // namespace sphsparse
