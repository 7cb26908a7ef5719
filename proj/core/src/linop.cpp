#include "sphsparse/linop.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "sphsparse/sphere.hpp"
#include "sphsparse/wavelet.hpp"

namespace sphsparse {

namespace {

Vector random_probe(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (auto& x : v) x = Complex(g(rng), g(rng));
  return v;
}

}  // namespace

LinearOperator::LinearOperator(Eigen::Index in_size, Eigen::Index out_size, Fn apply, Fn adjoint,
                               std::string name, Structure structure, double scale)
    : in_(in_size),
      out_(out_size),
      apply_(std::make_shared<const Fn>(std::move(apply))),
      adjoint_(std::make_shared<const Fn>(std::move(adjoint))),
      name_(std::move(name)),
      structure_(structure),
      scale_(scale) {
#ifndef NDEBUG
  if (in_ > 0 && out_ > 0 && dot_test(*this) > 1e-10)
    throw Error("operator '" + name_ + "' fails the dot-test");
#endif
}

Vector LinearOperator::apply(const Vector& x) const {
  require_size(x.size(), in_, name_.c_str());
  return (*apply_)(x);
}

Vector LinearOperator::adjoint(const Vector& y) const {
  require_size(y.size(), out_, name_.c_str());
  return (*adjoint_)(y);
}

std::vector<Eigen::Index> MaskSpec::indices() const {
  const Eigen::Index n = SphericalGrid(L).size();
  if (M < 0 || M > n)
    throw ConfigError("mask: M = " + std::to_string(M) + " outside [0, " + std::to_string(n) + "]");
  // Partial Fisher-Yates: the first M entries are a uniform draw without replacement.
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  for (Eigen::Index i = 0; i < M; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(static_cast<std::size_t>(M));
  std::sort(pool.begin(), pool.end());
  return pool;
}

LinearOperator op_identity(Eigen::Index n, double scale) {
  return {n,
          n,
          [scale](const Vector& x) -> Vector { return scale * x; },
          [scale](const Vector& y) -> Vector { return scale * y; },
          "identity",
          LinearOperator::Structure::scaled_identity,
          scale};
}

LinearOperator op_inpaint(const std::vector<Eigen::Index>& indices, Eigen::Index n_samples) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= n_samples) throw SizeError("mask index out of range");
    if (i > 0 && indices[i] <= indices[i - 1])
      throw SizeError("mask indices must be strictly increasing");
  }
  auto idx = std::make_shared<const std::vector<Eigen::Index>>(indices);
  const auto M = static_cast<Eigen::Index>(indices.size());
  return {n_samples,
          M,
          [idx, M](const Vector& x) -> Vector {
            Vector y(M);
            for (Eigen::Index i = 0; i < M; ++i) y[i] = x[(*idx)[i]];
            return y;
          },
          [idx, M, n_samples](const Vector& y) -> Vector {
            Vector x = Vector::Zero(n_samples);
            for (Eigen::Index i = 0; i < M; ++i) x[(*idx)[i]] = y[i];
            return x;
          },
          "inpaint",
          LinearOperator::Structure::selection};
}

LinearOperator op_inpaint(const MaskSpec& mask) {
  return op_inpaint(mask.indices(), SphericalGrid(mask.L).size());
}

LinearOperator op_beam(const BeamSpec& beam, int L, Backend backend) {
  auto sht = SphereTransform::cached(L, backend);
  auto gains = std::make_shared<RealVector>(static_cast<Eigen::Index>(L) * L);
  for (int ell = 0; ell < L; ++ell)
    for (int m = -ell; m <= ell; ++m) (*gains)[HarmonicCoeffs::index(ell, m)] = beam.gain(ell);
  const Eigen::Index n = sht->n_samples();
  return {n, n,
          [sht, gains](const Vector& x) -> Vector {
            return sht->inverse((gains->array() * sht->forward(x).array()).matrix());
          },
          [sht, gains](const Vector& y) -> Vector {
            return sht->forward_adjoint(
                (gains->array() * sht->inverse_adjoint(y).array()).matrix());
          },
          "beam"};
}

LinearOperator op_compose(const LinearOperator& a, const LinearOperator& b) {
  if (a.in_size() != b.out_size())
    throw SizeError("compose: " + a.name() + " takes " + std::to_string(a.in_size()) + ", " +
                    b.name() + " gives " + std::to_string(b.out_size()));
  return {b.in_size(), a.out_size(),
          [a, b](const Vector& x) -> Vector { return a.apply(b.apply(x)); },
          [a, b](const Vector& y) -> Vector { return b.adjoint(a.adjoint(y)); },
          a.name() + "*" + b.name()};
}

LinearOperator op_sht_forward(int L, Backend backend) {
  auto t = SphereTransform::cached(L, backend);
  return {t->n_samples(), t->n_coeffs(),
          [t](const Vector& x) -> Vector { return t->forward(x); },
          [t](const Vector& c) -> Vector { return t->forward_adjoint(c); }, "sht_forward"};
}

LinearOperator op_sht_inverse(int L, Backend backend) {
  auto t = SphereTransform::cached(L, backend);
  return {t->n_coeffs(), t->n_samples(),
          [t](const Vector& c) -> Vector { return t->inverse(c); },
          [t](const Vector& x) -> Vector { return t->inverse_adjoint(x); }, "sht_inverse"};
}

LinearOperator op_wigner_forward(int L, int N, Backend backend) {
  auto t = WignerTransform::cached(L, N, backend);
  return {t->n_samples(), t->n_coeffs(),
          [t](const Vector& x) -> Vector { return t->forward(x); },
          [t](const Vector& c) -> Vector { return t->forward_adjoint(c); }, "wigner_forward"};
}

LinearOperator op_wigner_inverse(int L, int N, Backend backend) {
  auto t = WignerTransform::cached(L, N, backend);
  return {t->n_coeffs(), t->n_samples(),
          [t](const Vector& c) -> Vector { return t->inverse(c); },
          [t](const Vector& x) -> Vector { return t->inverse_adjoint(x); }, "wigner_inverse"};
}

LinearOperator op_wavelet_analysis(std::shared_ptr<const WaveletTransform> t) {
  return {t->n_samples(), t->n_coeffs(),
          [t](const Vector& x) -> Vector { return t->forward(x); },
          [t](const Vector& a) -> Vector { return t->forward_adjoint(a); }, "wavelet_analysis"};
}

LinearOperator op_wavelet_synthesis(std::shared_ptr<const WaveletTransform> t) {
  return {t->n_coeffs(), t->n_samples(),
          [t](const Vector& a) -> Vector { return t->inverse(a); },
          [t](const Vector& x) -> Vector { return t->inverse_adjoint(x); }, "wavelet_synthesis"};
}

double dot_test(const LinearOperator& op, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Vector x = random_probe(op.in_size(), rng);
    const Vector y = random_probe(op.out_size(), rng);
    const Vector Ax = op.apply(x);
    const double scale = Ax.norm() * y.norm();
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(Ax.dot(y) - x.dot(op.adjoint(y))) / scale);
  }
  return worst;
}

PowerMethodResult power_method(const LinearOperator& op, double tol, int max_iter,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector v = random_probe(op.in_size(), rng);
  v /= v.norm();
  PowerMethodResult out;
  double prev = 0.0;
  for (int k = 1; k <= max_iter; ++k) {
    const Vector w = op.adjoint(op.apply(v));
    const double lambda = w.norm();  // ||A^dagger A v|| with ||v|| = 1
    out.iterations = k;
    out.norm = std::sqrt(lambda);
    out.history.push_back(out.norm);
    if (lambda == 0.0) {
      out.converged = true;
      break;
    }
    v = w / lambda;
    if (k > 1 && std::abs(out.norm - prev) <= tol * out.norm) {
      out.converged = true;
      break;
    }
    prev = out.norm;
  }
  return out;
}

}  // namespace sphsparse
