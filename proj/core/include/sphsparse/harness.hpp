#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sphsparse/solver.hpp"
#include "sphsparse/sphere.hpp"

namespace sphsparse {

enum class ExperimentKind { inpaint, deconvolve, inpaint_deconvolve, denoise };

std::string to_string(ExperimentKind k);
/// "inpaint", "deconvolve", "inpaint+deconvolve" or "denoise".
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::inpaint;
  int L = 32;
  int N = 1;
  Setting setting = Setting::synthesis;
  double eta = 2.5;
  /// Input SNR in dB; +infinity adds no noise.
  double input_snr_db = 46.0;
  /// M = round(n_m L^2) measured samples for the inpainting kinds.
  double n_m = 1.0;
  int realisations = 1;
  std::uint64_t seed = 0;

  double lambda = 2.0;
  int j_min = 0;
  double percentile = 0.99;
  /// Overrides the chi^2 radius when set (e.g. 0 for exact data).
  std::optional<double> epsilon;
  /// Beam width; pi / L when unset.
  std::optional<double> beam_sigma;
  Backend backend = Backend::fast;
  SolveOptions solver;

  /// Throws ConfigError on out-of-range values, including n_m L^2 above the
  /// number of grid samples.
  void validate() const;
  [[nodiscard]] Eigen::Index measurements() const;
  /// Default eta for the kind: 3 for denoising, 2.5 otherwise.
  static double default_eta(ExperimentKind k) { return k == ExperimentKind::denoise ? 3.0 : 2.5; }
};

/// Reads a JSON object whose keys mirror ExperimentSpec (kind, L, N, setting,
/// eta, snr_db, n_m, realisations, seed, lambda, j_min, percentile, epsilon,
/// beam_sigma, and a "solver" object with gamma, relaxation, max_iter, tol,
/// projection_max, final_projection_max). Unknown keys are rejected.
ExperimentSpec experiment_from_json(const std::string& text);
std::string experiment_to_json(const ExperimentSpec& spec);

/// sigma = ||x_hat|| 10^(-snr/20).
double noise_sigma(double snr_db, const HarmonicCoeffs& truth);

/// y plus i.i.d. real Gaussian noise of the standard deviation above. An
/// infinite snr_db returns y unchanged. Throws ConfigError on NaN.
Vector add_noise(const Vector& y, double snr_db, const HarmonicCoeffs& truth, std::uint64_t seed);

/// 20 log10(||truth|| / ||estimate - truth||); +infinity when they agree.
double compute_snr(const HarmonicCoeffs& estimate, const HarmonicCoeffs& truth);

struct SnrReport {
  std::vector<double> snr_db;

  [[nodiscard]] double mean() const;
  /// Sample standard deviation; 0 for a single realisation.
  [[nodiscard]] double spread() const;
};

/// Real band-limited Gaussian field with unit-variance coefficients.
HarmonicCoeffs make_noise_testmap(int L, std::uint64_t seed);
/// Coefficients from an SSMAP1 file (harmonic kind, or samples which are
/// transformed at their own band-limit), truncated to L. FormatError when the
/// file is shorter than L.
HarmonicCoeffs make_ingested_testmap(const std::filesystem::path& path, int L);

struct TestMapSpec {
  enum class Kind { noise, ingested };
  Kind kind = Kind::noise;
  std::uint64_t seed = 0;         // noise
  std::filesystem::path path;     // ingested
};

HarmonicCoeffs make_testmap(const TestMapSpec& map, int L);

/// What `sphere-sparse run` reads: the ExperimentSpec keys plus
///   "map": {"kind": "noise", "seed": s} or {"kind": "ingested", "path": p}
/// and "n_m" given either as a number or as a list to sweep.
struct RunConfig {
  ExperimentSpec spec;
  TestMapSpec map;
  std::vector<double> n_m;
};

/// Relative map paths are tried against `base_dir`, then against the
/// directory named by SPHSPARSE_DATA_DIR.
RunConfig run_config_from_json(const std::string& text, const std::filesystem::path& base_dir = {});

struct RealisationResult {
  int index = 0;
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  double data_snr_db = 0.0;  // Phi^dagger y scored against the truth
  SolutionReport report;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<RealisationResult> realisations;
  SnrReport snr;

  [[nodiscard]] bool all_converged() const;
};

struct EmitOptions {
  /// Directory for artifacts; nothing is written when empty.
  std::filesystem::path dir;
  /// File name prefix, useful when several runs share a directory.
  std::string prefix;
};

/// Runs spec.realisations independent problems on `truth`. Realisation r
/// derives its mask and noise seeds from (spec.seed, r). Non-convergence is
/// recorded, not thrown. With emit.dir set, writes truth.ssmap, data_<r> and
/// recon_<r> maps (SSMAP1 samples), snr.txt (one row per realisation) and
/// report.json.
ExperimentResult run_experiment(const ExperimentSpec& spec, const HarmonicCoeffs& truth,
                                const EmitOptions& emit = {});

struct SweepRow {
  double n_m = 0.0;
  double mean_snr_db = 0.0;
  double spread_db = 0.0;
  int converged = 0;
  int realisations = 0;
};

/// One experiment per n_m value; with emit.dir set, also writes plot.txt
/// (columns n_m, mean SNR, spread).
std::vector<SweepRow> run_sweep(const ExperimentSpec& spec, const std::vector<double>& n_m,
                                const HarmonicCoeffs& truth, const EmitOptions& emit = {},
                                std::vector<ExperimentResult>* results = nullptr);

}  // namespace sphsparse
