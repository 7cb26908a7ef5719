#include "sphsparse/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>
#include <json.hpp>

namespace sphsparse {

WeightVector compute_weights(const WaveletKernels& kernels, double eta) {
  const WaveletConfig& c = kernels.config();
  const WaveletLayout layout(c);
  WeightVector out{RealVector(layout.size()), eta};

  {
    const SphericalGrid g = layout.scaling_grid();
    double energy = 0.0;
    for (int ell = 0; ell < c.scaling_L(); ++ell) energy += kernels.upsilon(ell) * kernels.upsilon(ell);
    const double base = 2.0 * kPi * kPi / (energy * g.n_phi() * g.n_theta());
    for (int t = 0; t < g.n_theta(); ++t)
      for (int p = 0; p < g.n_phi(); ++p) out.values[g.index(t, p)] = base * std::sin(g.theta(t));
  }
  for (int j = c.j_min; j <= c.j_max(); ++j) {
    const RotationGrid g = layout.scale_grid(j);
    double energy = 0.0;
    for (int ell = 0; ell < g.L(); ++ell)
      for (int n = -(c.N - 1); n <= c.N - 1; ++n) energy += std::norm(kernels.psi(j, ell, n));
    const double base = std::pow(c.lambda, j * eta) / energy * 4.0 * kPi * kPi * kPi /
                        (double(g.n_alpha()) * g.n_beta() * g.n_gamma());
    const Eigen::Index off = layout.block_offset(j - c.j_min + 1);
    for (int a = 0; a < g.n_alpha(); ++a)
      for (int b = 0; b < g.n_beta(); ++b)
        for (int k = 0; k < g.n_gamma(); ++k)
          out.values[off + g.index(a, b, k)] = base * std::sin(g.beta(b));
  }
  const double floor = 1e-12 * out.values.maxCoeff();
  out.values = out.values.cwiseMax(floor);
  return out;
}

double select_epsilon(double sigma, Eigen::Index M, double percentile) {
  if (!(percentile > 0.0 && percentile < 1.0)) throw ConfigError("percentile must lie in (0, 1)");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (M < 1) throw ConfigError("need at least one measurement");
  const boost::math::chi_squared_distribution<double> chi2(static_cast<double>(M));
  return sigma * std::sqrt(boost::math::quantile(chi2, percentile));
}

Vector prox_weighted_l1(const Vector& z, const RealVector& weights, double tau) {
  require_size(weights.size(), z.size(), "prox_weighted_l1");
  Vector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double mag = std::abs(z[i]);
    const double t = tau * weights[i];
    out[i] = mag > t ? z[i] * ((mag - t) / mag) : Complex{};
  }
  return out;
}

namespace {

// Nearest point of the ball {u : ||u - y|| <= eps}.
Vector ball(const Vector& u, const Vector& y, double eps) {
  const Vector d = u - y;
  const double n = d.norm();
  return n <= eps ? u : Vector(y + d * (eps / n));
}

// Solves (I + mu A^dagger A) x = b by conjugate gradients from the given x.
// Returns the number of operator applications.
int conjugate_gradient(const LinearOperator& A, double mu, const Vector& b, Vector& x, double tol,
                       int max_iter) {
  auto normal = [&](const Vector& p) -> Vector { return p + mu * A.adjoint(A.apply(p)); };
  Vector r = b - normal(x);
  const double stop = tol * b.norm();
  double rr = r.squaredNorm();
  if (std::sqrt(rr) <= stop) return 1;
  Vector p = r;
  int k = 1;
  for (; k <= max_iter; ++k) {
    const Vector q = normal(p);
    const double alpha = rr / p.dot(q).real();
    x += alpha * p;
    r -= alpha * q;
    const double rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= stop) break;
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return k + 1;
}

}  // namespace

ProjectionResult project_l2_ball(const Vector& z, const Vector& y, double eps,
                                 const LinearOperator& A, const ProjectionOptions& opts,
                                 Vector* dual) {
  if (eps < 0.0) throw ConfigError("epsilon must be >= 0");
  require_size(y.size(), A.out_size(), "project_l2_ball");
  const Vector Az = A.apply(z);
  if ((y - Az).norm() <= eps) return {z, 0, true};

  switch (A.structure()) {
    case LinearOperator::Structure::scaled_identity: {
      const double c = A.scale();
      return {ball(Az, y, eps) / c, 0, true};
    }
    case LinearOperator::Structure::selection:
      return {z + A.adjoint(ball(Az, y, eps) - Az), 0, true};
    case LinearOperator::Structure::general:
      break;
  }

  // The projection is v(mu) = (I + mu A^dagger A)^{-1} (z + mu A^dagger y) with the
  // multiplier mu > 0 fixed by ||A v(mu) - y|| = eps. The dual vector returned
  // is u = mu (A v - y), so that v = z - A^dagger u at the solution.
  const double norm_sq = opts.norm_sq ? *opts.norm_sq : std::pow(power_method(A).norm, 2);
  if (eps == 0.0) {
    // Affine constraint: take a very stiff penalty instead of the limit.
    ProjectionResult out{z, 0, false};
    out.iterations = conjugate_gradient(A, 1e10 / norm_sq, z + (1e10 / norm_sq) * A.adjoint(y),
                                        out.x, 1e-3 * opts.tol, opts.max_iter);
    out.converged = (A.apply(out.x) - y).norm() <= opts.tol * y.norm();
    return out;
  }
  const double cg_tol = 0.1 * opts.tol;
  const Vector Aty = A.adjoint(y);

  const bool warm = dual && dual->size() == y.size() && dual->norm() > 0.0;
  ProjectionResult out{z, 0, false};
  Vector v = warm ? Vector(z - A.adjoint(*dual)) : z;
  auto residual_at = [&](double mu) {
    out.iterations += conjugate_gradient(A, mu, z + mu * Aty, v, cg_tol,
                                         std::max(1, opts.max_iter - out.iterations));
    return (A.apply(v) - y).norm();
  };

  // Secant on h(mu) = 1/||r(mu)|| - 1/eps, which is increasing and close to
  // linear, safeguarded by bisection once the root is bracketed.
  double mu_a = 0.0;
  double h_a = 1.0 / (Az - y).norm() - 1.0 / eps;
  double mu = warm ? dual->norm() / eps : 1.0 / norm_sq;
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  double g = residual_at(mu);
  for (int k = 0; k < 200 && out.iterations < opts.max_iter; ++k) {
    if (std::abs(g - eps) <= opts.tol * eps) {
      out.converged = true;
      break;
    }
    const double h = 1.0 / g - 1.0 / eps;
    (h < 0.0 ? lo : hi) = mu;
    double next = h == h_a ? 2.0 * mu : mu - h * (mu - mu_a) / (h - h_a);
    if (std::isinf(hi)) {
      // Empty constraint set: the least-squares residual itself exceeds eps.
      if (mu > 1e12 / norm_sq) break;
      next = std::clamp(next, 1.5 * mu, 100.0 * mu);
    } else if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    mu_a = mu;
    h_a = h;
    mu = next;
    g = residual_at(mu);
  }
  out.x = v;
  if (dual) {
    // Scaled to length mu eps so that a truncated search still hands over mu.
    const Vector r = A.apply(v) - y;
    *dual = (mu * eps / r.norm()) * r;
  }
  return out;
}

std::string to_string(Setting s) { return s == Setting::synthesis ? "synthesis" : "analysis"; }

Setting setting_from_string(const std::string& s) {
  if (s == "synthesis") return Setting::synthesis;
  if (s == "analysis") return Setting::analysis;
  throw ConfigError("unknown setting '" + s + "'");
}

std::string SolutionReport::to_json() const {
  nlohmann::ordered_json j;
  j["iterations"] = iterations;
  j["converged"] = converged;
  j["objective"] = objective;
  j["residual"] = residual;
  j["epsilon"] = epsilon;
  j["feasible"] = feasible();
  if (snr_db) j["snr_db"] = *snr_db;
  j["wall_seconds"] = wall_seconds;
  return j.dump();
}

namespace {

double weighted_l1(const Vector& a, const RealVector& w) {
  return (a.cwiseAbs().array() * w.array()).sum();
}

// argmin_x gamma ||Psi-tilde x||_{1,w} + 1/2 ||x - v||^2 by forward-backward on
// the dual; `u` carries the dual between calls.
Vector analysis_prox(const Vector& v, const LinearOperator& analysis, const RealVector& w,
                     double gamma, double mu, const SolveOptions& opts, Vector& u) {
  const RealVector bound = gamma * w;
  Vector x = v - analysis.adjoint(u);
  for (int i = 0; i < opts.inner_max; ++i) {
    Vector q = u + mu * analysis.apply(x);
    for (Eigen::Index k = 0; k < q.size(); ++k) {
      const double mag = std::abs(q[k]);
      if (mag > bound[k]) q[k] *= bound[k] / mag;
    }
    u = std::move(q);
    const Vector next = v - analysis.adjoint(u);
    const double change = (next - x).norm();
    x = next;
    if (change <= opts.inner_tol * x.norm()) break;
  }
  return x;
}

}  // namespace

SolutionReport solve(const ProblemSpec& problem, const SolveOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  if (!problem.wavelets) throw ConfigError("solve: wavelet transform missing");
  if (problem.epsilon < 0.0) throw ConfigError("solve: epsilon must be >= 0");
  const LinearOperator& phi = problem.phi;
  require_size(problem.y.size(), phi.out_size(), "solve: measurements");
  require_size(phi.in_size(), problem.wavelets->n_samples(), "solve: operator input");
  require_size(problem.weights.values.size(), problem.wavelets->n_coeffs(), "solve: weights");
  if ((problem.weights.values.array() <= 0.0).any())
    throw ConfigError("solve: weights must be positive");

  const LinearOperator psi = op_wavelet_synthesis(problem.wavelets);
  const LinearOperator psi_t = op_wavelet_analysis(problem.wavelets);
  const RealVector& w = problem.weights.values;
  const double eps = problem.epsilon;

  SolutionReport report;
  report.epsilon = eps;
  auto finish = [&](SolutionReport& r) {
    r.residual = (problem.y - phi.apply(r.x)).norm();
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  };

  if (problem.y.norm() <= eps) {
    report.x = Vector::Zero(phi.in_size());
    if (problem.setting == Setting::synthesis) report.alpha = Vector::Zero(psi.in_size());
    report.converged = true;
    return finish(report);
  }

  const bool synthesis = problem.setting == Setting::synthesis;
  const LinearOperator A = synthesis ? op_compose(phi, psi) : phi;
  ProjectionOptions popts{opts.projection_tol, opts.projection_max, std::nullopt};
  if (A.structure() == LinearOperator::Structure::general)
    popts.norm_sq = std::pow(power_method(A).norm, 2);
  const double mu_analysis = synthesis ? 0.0 : 1.0 / std::pow(power_method(psi_t).norm, 2);

  // The prox scale is relative to the data, so that scaling y and eps scales
  // every iterate.
  const double gamma = opts.gamma * psi_t.apply(phi.adjoint(problem.y)).norm() / w.norm();

  Vector z = synthesis ? psi.adjoint(phi.adjoint(problem.y)) : phi.adjoint(problem.y);
  Vector projection_dual;
  Vector prox_dual = synthesis ? Vector() : Vector(Vector::Zero(psi_t.out_size()));
  Vector x_prev;
  Vector x;
  bool settled = false;
  for (int k = 1; k <= opts.max_iter; ++k) {
    x = project_l2_ball(z, problem.y, eps, A, popts, &projection_dual).x;
    const Vector reflected = 2.0 * x - z;
    const Vector r = synthesis ? prox_weighted_l1(reflected, w, gamma)
                               : analysis_prox(reflected, psi_t, w, gamma, mu_analysis, opts,
                                               prox_dual);
    z += opts.relaxation * (r - x);
    report.iterations = k;
    const double change = k > 1 ? (x - x_prev).norm() / x.norm() : 1.0;
    if (opts.monitor)
      opts.monitor({k, change, weighted_l1(synthesis ? x : psi_t.apply(x), w)});
    if (k > 1 && change <= opts.tol) {
      settled = true;
      break;
    }
    x_prev = x;
  }

  // The inner projections may have been truncated; finish with an accurate one.
  ProjectionOptions final_opts = popts;
  final_opts.max_iter = opts.final_projection_max;
  const ProjectionResult last = project_l2_ball(z, problem.y, eps, A, final_opts, &projection_dual);
  x = last.x;
  report.converged = settled && last.converged;

  if (synthesis) {
    report.alpha = x;
    report.objective = weighted_l1(x, w);
    report.x = psi.apply(x);
  } else {
    report.objective = weighted_l1(psi_t.apply(x), w);
    report.x = x;
  }
  return finish(report);
}

}  // namespace sphsparse
