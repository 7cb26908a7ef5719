#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "sphsparse/linop.hpp"
#include "sphsparse/wavelet.hpp"

namespace sphsparse {

/// Per-coefficient l1 weights over the WaveletLayout of alpha.
struct WeightVector {
  RealVector values;
  double eta = 0.0;
};

/// Scale-dependent weights: for wavelet sample p of scale j
///   v = lambda^(j eta) / sum_ln |Psi^j_ln|^2 * 4 pi^3 sin(beta_p) / (n_alpha n_beta n_gamma)
/// and for scaling sample p
///   u = 1 / sum_l |Upsilon_l0|^2 * 2 pi^2 sin(theta_p) / (n_phi n_theta),
/// each at the block's own resolution. The theta = pi ring gives zero, so all
/// weights are floored at 1e-12 of the largest.
WeightVector compute_weights(const WaveletKernels& kernels, double eta);

/// sigma sqrt(Q(percentile)) with Q the chi^2_M quantile.
double select_epsilon(double sigma, Eigen::Index M, double percentile = 0.99);

/// argmin_v tau ||v||_{1,w} + 1/2 ||v - z||^2: magnitude soft-threshold
/// keeping the phase.
Vector prox_weighted_l1(const Vector& z, const RealVector& weights, double tau);

struct ProjectionOptions {
  double tol = 1e-6;
  /// Budget of A^dagger A applications for the iterative path.
  int max_iter = 500;
  /// ||A||^2; estimated with the power method when not given.
  std::optional<double> norm_sq;
};

struct ProjectionResult {
  Vector x;
  int iterations = 0;
  bool converged = true;
};

/// Projection of z onto {v : ||y - A v|| <= eps}. Closed form for scaled
/// identities and selections. Otherwise the Lagrange multiplier mu is found by
/// a safeguarded secant search, each step solving (I + mu A^dagger A) v =
/// z + mu A^dagger y by conjugate gradients; it stops once
/// | ||y - A v|| - eps | <= tol eps. `dual` (length A.out_size(), or empty)
/// warm-starts and returns u = mu (A v - y), for which v = z - A^dagger u.
ProjectionResult project_l2_ball(const Vector& z, const Vector& y, double eps,
                                 const LinearOperator& A, const ProjectionOptions& opts = {},
                                 Vector* dual = nullptr);

enum class Setting { synthesis, analysis };

std::string to_string(Setting s);
Setting setting_from_string(const std::string& s);

struct ProblemSpec {
  Setting setting = Setting::synthesis;
  LinearOperator phi;
  Vector y;
  double epsilon = 0.0;
  WeightVector weights;
  std::shared_ptr<const WaveletTransform> wavelets;
};

struct IterationInfo {
  int iteration = 0;
  double change = 0.0;     // ||x_k - x_{k-1}|| / ||x_k||
  double objective = 0.0;  // weighted l1 of the current iterate
};

struct SolveOptions {
  /// Prox scale relative to the data: the l1 prox uses
  /// gamma ||Psi-tilde Phi^dagger y|| / ||w||.
  double gamma = 1.0;
  double relaxation = 1.0;
  int max_iter = 300;
  double tol = 1e-4;
  /// Dual forward-backward for the analysis prox.
  int inner_max = 50;
  double inner_tol = 1e-6;
  /// Data-fidelity projection when A has no closed form.
  int projection_max = 30;
  double projection_tol = 1e-6;
  /// Budget for the accurate projection that produces the returned iterate.
  /// Convergence is only reported when it reaches the ball.
  int final_projection_max = 3000;
  /// Called after every outer iteration when set.
  std::function<void(const IterationInfo&)> monitor;
};

struct SolutionReport {
  Vector x;                      // recovered map samples
  std::optional<Vector> alpha;   // synthesis only
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;        // ||alpha||_{1,w} or ||Psi-tilde x||_{1,w}
  double residual = 0.0;         // ||y - Phi x||
  double epsilon = 0.0;
  std::optional<double> snr_db;  // filled by callers that know the truth
  double wall_seconds = 0.0;

  [[nodiscard]] bool feasible(double slack = 1e-3) const {
    return residual <= epsilon * (1.0 + slack) + 1e-300;
  }
  /// Single JSON object.
  [[nodiscard]] std::string to_json() const;
};

/// Douglas-Rachford on min ||.||_{1,w} subject to the l2 data ball.
/// Synthesis iterates on alpha with A = Phi Psi and returns x = Psi alpha;
/// analysis iterates on x. Starts from Psi^dagger Phi^dagger y or
/// Phi^dagger y; y inside the ball returns zero.
SolutionReport solve(const ProblemSpec& problem, const SolveOptions& opts = {});

}  // namespace sphsparse
