#include "sphsparse/wigner_d.hpp"

#include <cmath>
#include <mutex>

namespace sphsparse {

namespace {

// One Risbo step: d^{(n-1)/2} (n x n, row-major) -> d^{n/2} ((n+1) x (n+1)).
// Index i = j + m', k = j + m with j = n/2.
void risbo_step(const std::vector<double>& prev, int n, double p, double q,
                const std::vector<double>& sqrt_int, std::vector<double>& next) {
  const int np = n;  // size of prev
  const int nn = n + 1;
  next.assign(static_cast<std::size_t>(nn) * nn, 0.0);
  const double inv_n = 1.0 / n;
  for (int i = 0; i < nn; ++i) {
    for (int k = 0; k < nn; ++k) {
      double v = 0.0;
      if (i < np && k < np) v += sqrt_int[n - i] * sqrt_int[n - k] * p * prev[i * np + k];
      if (i > 0 && k < np) v -= sqrt_int[i] * sqrt_int[n - k] * q * prev[(i - 1) * np + k];
      if (i < np && k > 0) v += sqrt_int[n - i] * sqrt_int[k] * q * prev[i * np + k - 1];
      if (i > 0 && k > 0) v += sqrt_int[i] * sqrt_int[k] * p * prev[(i - 1) * np + k - 1];
      next[static_cast<std::size_t>(i) * nn + k] = v * inv_n;
    }
  }
}

// Runs the recursion up to ell_max, calling sink(ell, matrix) at every integer ell.
template <typename Sink>
void risbo_sweep(int ell_max, double beta, Sink&& sink) {
  const double p = std::cos(0.5 * beta);
  const double q = std::sin(0.5 * beta);
  std::vector<double> sqrt_int(2 * ell_max + 2);
  for (std::size_t i = 0; i < sqrt_int.size(); ++i) sqrt_int[i] = std::sqrt(static_cast<double>(i));

  std::vector<double> cur{1.0};
  std::vector<double> half;
  sink(0, cur);
  for (int ell = 1; ell <= ell_max; ++ell) {
    risbo_step(cur, 2 * ell - 1, p, q, sqrt_int, half);
    risbo_step(half, 2 * ell, p, q, sqrt_int, cur);
    sink(ell, cur);
  }
}

long double log_factorial(int n) { return std::lgamma(static_cast<long double>(n) + 1.0L); }

}  // namespace

DeltaTable::DeltaTable(int L) : L_(L) {
  if (L < 1) throw ConfigError("DeltaTable: band-limit must be >= 1");
  data_.resize(offset(L));
  risbo_sweep(L - 1, 0.5 * kPi, [this](int ell, const std::vector<double>& d) {
    const int w = 2 * ell + 1;
    double* dst = data_.data() + offset(ell);
    // d is indexed [m' + ell][m + ell]; store transposed.
    for (int i = 0; i < w; ++i)
      for (int k = 0; k < w; ++k) dst[k * w + i] = d[static_cast<std::size_t>(i) * w + k];
  });
}

std::shared_ptr<const DeltaTable> DeltaTable::shared(int L) {
  static std::mutex mutex;
  static std::shared_ptr<const DeltaTable> cached;
  std::lock_guard lock(mutex);
  if (!cached || cached->band_limit() < L) cached = std::make_shared<const DeltaTable>(L);
  return cached;
}

Eigen::MatrixXd wigner_d_matrix(int ell, double beta) {
  if (ell < 0) throw ConfigError("wigner_d_matrix: ell must be >= 0");
  Eigen::MatrixXd out(2 * ell + 1, 2 * ell + 1);
  risbo_sweep(ell, beta, [&](int l, const std::vector<double>& d) {
    if (l != ell) return;
    const int w = 2 * ell + 1;
    for (int i = 0; i < w; ++i)
      for (int k = 0; k < w; ++k) out(i, k) = d[static_cast<std::size_t>(i) * w + k];
  });
  return out;
}

double wigner_d_explicit(int ell, int m, int n, double beta) {
  if (std::abs(m) > ell || std::abs(n) > ell) return 0.0;
  const long double c = std::cos(0.5L * beta);
  const long double s = std::sin(0.5L * beta);
  const long double log_pref =
      0.5L * (log_factorial(ell + m) + log_factorial(ell - m) + log_factorial(ell + n) +
              log_factorial(ell - n));
  long double sum = 0.0L;
  const int k_min = std::max(0, n - m);
  const int k_max = std::min(ell + n, ell - m);
  for (int k = k_min; k <= k_max; ++k) {
    const long double log_den = log_factorial(ell + n - k) + log_factorial(k) +
                                log_factorial(m - n + k) + log_factorial(ell - m - k);
    const int cpow = 2 * ell + n - m - 2 * k;
    const int spow = m - n + 2 * k;
    long double term = std::exp(log_pref - log_den);
    term *= std::pow(c, cpow) * std::pow(s, spow);
    if ((m - n + k) % 2 != 0) term = -term;
    sum += term;
  }
  return static_cast<double>(sum);
}

std::vector<double> wigner_d_recurrence(int m, int n, int ell_max, double beta) {
  std::vector<double> d(static_cast<std::size_t>(std::max(ell_max, 0)) + 1, 0.0);
  const int ell0 = std::max(std::abs(m), std::abs(n));
  if (ell0 > ell_max) return d;
  const double cb = std::cos(beta);
  d[ell0] = wigner_d_explicit(ell0, m, n, beta);
  int start = ell0;
  if (ell0 == 0) {
    if (ell_max >= 1) d[1] = cb;
    start = 1;
  }
  const double mn = static_cast<double>(m) * n;
  for (int ell = start; ell < ell_max; ++ell) {
    const double l = ell;
    const double lp1 = ell + 1;
    const double a = std::sqrt((lp1 * lp1 - m * m) * (lp1 * lp1 - n * n));
    const double b = std::sqrt((l * l - m * m) * (l * l - n * n));
    const double prev = ell >= 1 ? d[ell - 1] : 0.0;
    d[ell + 1] = ((2 * l + 1) * (l * lp1 * cb - mn) * d[ell] - lp1 * b * prev) / (l * a);
  }
  return d;
}

Complex quadrature_weight(int m) {
  if (m == 1) return {0.0, 0.5 * kPi};
  if (m == -1) return {0.0, -0.5 * kPi};
  if (m % 2 != 0) return {0.0, 0.0};
  return {2.0 / (1.0 - static_cast<double>(m) * m), 0.0};
}

}  // namespace sphsparse
