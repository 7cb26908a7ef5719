#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sphsparse/so3.hpp"
#include "sphsparse/types.hpp"

namespace sphsparse {

class WaveletTransform;

/// A linear map C^n -> C^m with its adjoint. Handles are cheap to copy and
/// immutable; apply/adjoint are re-entrant.
class LinearOperator {
 public:
  using Fn = std::function<Vector(const Vector&)>;

  /// What is known about A A^dagger, used for closed-form projections.
  enum class Structure {
    general,
    scaled_identity,  // A = c I
    selection,        // rows are distinct unit vectors, A A^dagger = I
  };

  LinearOperator(Eigen::Index in_size, Eigen::Index out_size, Fn apply, Fn adjoint,
                 std::string name = "op", Structure structure = Structure::general,
                 double scale = 1.0);

  [[nodiscard]] Eigen::Index in_size() const noexcept { return in_; }
  [[nodiscard]] Eigen::Index out_size() const noexcept { return out_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] Structure structure() const noexcept { return structure_; }
  /// c for scaled_identity, 1 otherwise.
  [[nodiscard]] double scale() const noexcept { return scale_; }

  [[nodiscard]] Vector apply(const Vector& x) const;
  [[nodiscard]] Vector adjoint(const Vector& y) const;

 private:
  Eigen::Index in_;
  Eigen::Index out_;
  std::shared_ptr<const Fn> apply_;
  std::shared_ptr<const Fn> adjoint_;
  std::string name_;
  Structure structure_;
  double scale_;
};

/// Uniformly random selection of M distinct samples of the L grid, drawn
/// from `seed`; the indices are regenerated from (seed, M, L).
struct MaskSpec {
  std::uint64_t seed = 0;
  Eigen::Index M = 0;
  int L = 1;

  /// Sorted sample indices. Throws ConfigError if M exceeds the grid size.
  [[nodiscard]] std::vector<Eigen::Index> indices() const;
};

/// Gaussian beam G_l = exp(-l^2 sigma^2).
struct BeamSpec {
  double sigma = 0.0;

  static BeamSpec standard(int L) { return {kPi / L}; }
  [[nodiscard]] double gain(int ell) const { return std::exp(-double(ell) * ell * sigma * sigma); }
};

LinearOperator op_identity(Eigen::Index n, double scale = 1.0);
LinearOperator op_inpaint(const MaskSpec& mask);
LinearOperator op_inpaint(const std::vector<Eigen::Index>& indices, Eigen::Index n_samples);
/// Y G Y-tilde on SphericalGrid(L) samples.
LinearOperator op_beam(const BeamSpec& beam, int L, Backend backend = Backend::fast);
/// a after b.
LinearOperator op_compose(const LinearOperator& a, const LinearOperator& b);

LinearOperator op_sht_forward(int L, Backend backend = Backend::fast);
LinearOperator op_sht_inverse(int L, Backend backend = Backend::fast);
LinearOperator op_wigner_forward(int L, int N, Backend backend = Backend::fast);
LinearOperator op_wigner_inverse(int L, int N, Backend backend = Backend::fast);
/// Psi-tilde (map -> coefficients) and Psi (coefficients -> map).
LinearOperator op_wavelet_analysis(std::shared_ptr<const WaveletTransform> t);
LinearOperator op_wavelet_synthesis(std::shared_ptr<const WaveletTransform> t);

/// Largest relative discrepancy |<Ax, y> - <x, A^dagger y>| / (|Ax| |y|) over
/// `trials` random complex probes.
double dot_test(const LinearOperator& op, int trials = 10, std::uint64_t seed = 1);

struct PowerMethodResult {
  double norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // estimate after each iteration
};

/// ||A||_2 by power iteration on A^dagger A from a fixed-seed start vector.
/// Stops once successive estimates agree to `tol` relative; otherwise
/// returns the last estimate with converged = false.
PowerMethodResult power_method(const LinearOperator& op, double tol = 1e-6, int max_iter = 200,
                               std::uint64_t seed = 12345);

}  // namespace sphsparse
