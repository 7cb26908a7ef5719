#include "sphsparse/harness.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sphsparse/io.hpp"

namespace sphsparse {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

bool measures_subset(ExperimentKind k) {
  return k == ExperimentKind::inpaint || k == ExperimentKind::inpaint_deconvolve;
}

bool blurs(ExperimentKind k) {
  return k == ExperimentKind::deconvolve || k == ExperimentKind::inpaint_deconvolve;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::inpaint: return "inpaint";
    case ExperimentKind::deconvolve: return "deconvolve";
    case ExperimentKind::inpaint_deconvolve: return "inpaint+deconvolve";
    case ExperimentKind::denoise: return "denoise";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::inpaint, ExperimentKind::deconvolve, ExperimentKind::inpaint_deconvolve,
                 ExperimentKind::denoise})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

void ExperimentSpec::validate() const {
  WaveletConfig{L, N, lambda, j_min}.validate();
  if (std::isnan(input_snr_db)) throw ConfigError("input SNR is NaN");
  if (realisations < 1) throw ConfigError("need at least one realisation");
  if (!(eta >= 0.0)) throw ConfigError("eta must be >= 0");
  if (!(percentile > 0.0 && percentile < 1.0)) throw ConfigError("percentile must lie in (0, 1)");
  if (epsilon && !(*epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (beam_sigma && !(*beam_sigma > 0.0)) throw ConfigError("beam sigma must be > 0");
  if (solver.max_iter < 1 || !(solver.tol > 0.0)) throw ConfigError("solver needs max_iter >= 1 and tol > 0");
  if (measures_subset(kind)) {
    if (!(n_m > 0.0)) throw ConfigError("n_m must be > 0");
    const Eigen::Index M = measurements();
    if (M < 1 || M > SphericalGrid(L).size())
      throw ConfigError("n_m L^2 = " + std::to_string(M) + " is outside [1, " +
                        std::to_string(SphericalGrid(L).size()) + "]");
  }
}

Eigen::Index ExperimentSpec::measurements() const {
  if (!measures_subset(kind)) return SphericalGrid(L).size();
  return static_cast<Eigen::Index>(std::llround(n_m * L * L));
}

// ---------------------------------------------------------------------------
// Config files

ExperimentSpec experiment_from_json(const std::string& text) {
  static const std::set<std::string> known{"kind",   "L",          "N",          "setting", "eta",
                                           "snr_db", "n_m",        "realisations", "seed", "lambda",
                                           "j_min",  "percentile", "epsilon",    "beam_sigma", "solver"};
  static const std::set<std::string> known_solver{"gamma",          "relaxation",     "max_iter",
                                                  "tol",            "inner_max",      "inner_tol",
                                                  "projection_max", "projection_tol", "final_projection_max"};
  ExperimentSpec s;
  try {
    const auto j = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
    if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
    for (const auto& [key, _] : j.items())
      if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
    s.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
    s.eta = ExperimentSpec::default_eta(s.kind);
    s.L = j.value("L", s.L);
    s.N = j.value("N", s.N);
    if (j.contains("setting")) s.setting = setting_from_string(j["setting"].get<std::string>());
    s.eta = j.value("eta", s.eta);
    if (j.contains("snr_db")) {
      const auto& v = j["snr_db"];
      if (v.is_null() || (v.is_string() && v.get<std::string>() == "inf"))
        s.input_snr_db = std::numeric_limits<double>::infinity();
      else
        s.input_snr_db = v.get<double>();
    }
    s.n_m = j.value("n_m", s.n_m);
    s.realisations = j.value("realisations", s.realisations);
    s.seed = j.value("seed", s.seed);
    s.lambda = j.value("lambda", s.lambda);
    s.j_min = j.value("j_min", s.j_min);
    s.percentile = j.value("percentile", s.percentile);
    if (j.contains("epsilon")) s.epsilon = j["epsilon"].get<double>();
    if (j.contains("beam_sigma")) s.beam_sigma = j["beam_sigma"].get<double>();
    if (j.contains("solver")) {
      const auto& o = j["solver"];
      for (const auto& [key, _] : o.items())
        if (!known_solver.count(key)) throw ConfigError("unknown solver key '" + key + "'");
      auto& so = s.solver;
      so.gamma = o.value("gamma", so.gamma);
      so.relaxation = o.value("relaxation", so.relaxation);
      so.max_iter = o.value("max_iter", so.max_iter);
      so.tol = o.value("tol", so.tol);
      so.inner_max = o.value("inner_max", so.inner_max);
      so.inner_tol = o.value("inner_tol", so.inner_tol);
      so.projection_max = o.value("projection_max", so.projection_max);
      so.projection_tol = o.value("projection_tol", so.projection_tol);
      so.final_projection_max = o.value("final_projection_max", so.final_projection_max);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  s.validate();
  return s;
}

std::string experiment_to_json(const ExperimentSpec& s) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(s.kind);
  j["L"] = s.L;
  j["N"] = s.N;
  j["setting"] = to_string(s.setting);
  j["eta"] = s.eta;
  if (std::isinf(s.input_snr_db))
    j["snr_db"] = "inf";
  else
    j["snr_db"] = s.input_snr_db;
  j["n_m"] = s.n_m;
  j["realisations"] = s.realisations;
  j["seed"] = s.seed;
  j["lambda"] = s.lambda;
  j["j_min"] = s.j_min;
  j["percentile"] = s.percentile;
  if (s.epsilon) j["epsilon"] = *s.epsilon;
  if (s.beam_sigma) j["beam_sigma"] = *s.beam_sigma;
  j["solver"] = {{"gamma", s.solver.gamma},
                 {"relaxation", s.solver.relaxation},
                 {"max_iter", s.solver.max_iter},
                 {"tol", s.solver.tol},
                 {"inner_max", s.solver.inner_max},
                 {"inner_tol", s.solver.inner_tol},
                 {"projection_max", s.solver.projection_max},
                 {"projection_tol", s.solver.projection_tol},
                 {"final_projection_max", s.solver.final_projection_max}};
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Noise and scoring

double noise_sigma(double snr_db, const HarmonicCoeffs& truth) {
  return truth.data.norm() * std::pow(10.0, -snr_db / 20.0);
}

Vector add_noise(const Vector& y, double snr_db, const HarmonicCoeffs& truth, std::uint64_t seed) {
  if (std::isnan(snr_db)) throw ConfigError("input SNR is NaN");
  if (std::isinf(snr_db) && snr_db > 0) return y;
  const double sigma = noise_sigma(snr_db, truth);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  Vector out = y;
  for (auto& v : out) v += g(rng);
  return out;
}

double compute_snr(const HarmonicCoeffs& estimate, const HarmonicCoeffs& truth) {
  if (estimate.L != truth.L)
    throw SizeError("SNR needs equal band-limits, got " + std::to_string(estimate.L) + " and " +
                    std::to_string(truth.L));
  const double err = (estimate.data - truth.data).norm();
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(truth.data.norm() / err);
}

double SnrReport::mean() const {
  if (snr_db.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double v : snr_db) s += v;
  return s / static_cast<double>(snr_db.size());
}

double SnrReport::spread() const {
  if (snr_db.size() < 2) return 0.0;
  const double m = mean();
  double s = 0.0;
  for (double v : snr_db) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(snr_db.size() - 1));
}

// ---------------------------------------------------------------------------
// Test maps

HarmonicCoeffs make_noise_testmap(int L, std::uint64_t seed) {
  HarmonicCoeffs c(L);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int ell = 0; ell < L; ++ell) {
    c(ell, 0) = g(rng);
    for (int m = 1; m <= ell; ++m) {
      const Complex v(g(rng) / std::sqrt(2.0), g(rng) / std::sqrt(2.0));
      c(ell, m) = v;
      c(ell, -m) = (m % 2 ? -1.0 : 1.0) * std::conj(v);
    }
  }
  c.real_signal = true;
  return c;
}

HarmonicCoeffs make_ingested_testmap(const std::filesystem::path& path, int L) {
  const io::MapRecord r = io::load_record(path);
  HarmonicCoeffs full(1);
  if (r.kind == io::MapKind::harmonic)
    full = io::as_harmonic(r);
  else if (r.kind == io::MapKind::sphere_samples)
    full = SphereTransform(r.L).forward(io::as_spherical_map(r));
  else
    throw FormatError(path.string() + ": expected sphere samples or harmonic coefficients");
  if (full.L < L)
    throw FormatError(path.string() + " has band-limit " + std::to_string(full.L) + ", below the requested " +
                      std::to_string(L));
  HarmonicCoeffs out = truncate(full, L);
  out.real_signal = out.reality_defect() <= 1e-12 * std::max(1.0, out.data.cwiseAbs().maxCoeff());
  return out;
}

HarmonicCoeffs make_testmap(const TestMapSpec& map, int L) {
  if (map.kind == TestMapSpec::Kind::noise) return make_noise_testmap(L, map.seed);
  return make_ingested_testmap(map.path, L);
}

RunConfig run_config_from_json(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");
    if (j.contains("map")) {
      const auto& m = j["map"];
      const std::string kind = m.at("kind").get<std::string>();
      if (kind == "noise") {
        c.map.kind = TestMapSpec::Kind::noise;
        c.map.seed = m.value("seed", std::uint64_t{0});
      } else if (kind == "ingested") {
        c.map.kind = TestMapSpec::Kind::ingested;
        std::filesystem::path p = m.at("path").get<std::string>();
        if (p.is_relative()) {
          const char* env = std::getenv("SPHSPARSE_DATA_DIR");
          if (std::filesystem::exists(base_dir / p))
            p = base_dir / p;
          else if (env && std::filesystem::exists(std::filesystem::path(env) / p))
            p = std::filesystem::path(env) / p;
        }
        c.map.path = p;
      } else {
        throw ConfigError("unknown map kind '" + kind + "'");
      }
      j.erase("map");
    }
    if (j.contains("n_m") && j["n_m"].is_array()) {
      c.n_m = j["n_m"].get<std::vector<double>>();
      if (c.n_m.empty()) throw ConfigError("n_m list is empty");
      j["n_m"] = c.n_m.front();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  c.spec = experiment_from_json(j.dump());
  if (c.n_m.empty()) c.n_m.push_back(c.spec.n_m);
  for (double v : c.n_m) {
    ExperimentSpec s = c.spec;
    s.n_m = v;
    s.validate();
  }
  return c;
}

// ---------------------------------------------------------------------------
// Experiments

bool ExperimentResult::all_converged() const {
  for (const auto& r : realisations)
    if (!r.report.converged) return false;
  return true;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const HarmonicCoeffs& truth,
                                const EmitOptions& emit) {
  spec.validate();
  if (truth.L != spec.L)
    throw SizeError("truth has band-limit " + std::to_string(truth.L) + ", experiment expects " +
                    std::to_string(spec.L));
  const int L = spec.L;
  const SphereTransform sht(L, spec.backend);
  Vector x = sht.inverse(truth.data);
  // Real fields are measured as real samples, matching the real noise.
  if (truth.real_signal) x = x.real().cast<Complex>();

  const WaveletConfig wc{L, spec.N, spec.lambda, spec.j_min};
  auto wavelets = std::make_shared<const WaveletTransform>(wc, spec.backend);
  const WeightVector weights = compute_weights(wavelets->kernels(), spec.eta);
  const Eigen::Index n_samples = SphericalGrid(L).size();
  const Eigen::Index M = spec.measurements();
  const BeamSpec beam{spec.beam_sigma.value_or(kPi / L)};

  const bool emitting = !emit.dir.empty();
  if (emitting) {
    std::filesystem::create_directories(emit.dir);
    io::save_record(emit.dir / (emit.prefix + "truth.ssmap"), io::to_record(SphericalMap(sht.grid(), x)));
  }

  ExperimentResult result;
  result.spec = spec;
  for (int r = 0; r < spec.realisations; ++r) {
    const std::uint64_t base = splitmix64(spec.seed ^ splitmix64(static_cast<std::uint64_t>(r) + 1));
    const MaskSpec mask{splitmix64(base ^ 1), M, L};

    LinearOperator phi = op_identity(n_samples);
    std::optional<LinearOperator> selection;
    if (measures_subset(spec.kind)) selection = op_inpaint(mask);
    if (blurs(spec.kind)) {
      const LinearOperator b = op_beam(beam, L, spec.backend);
      phi = selection ? op_compose(*selection, b) : b;
    } else if (selection) {
      phi = *selection;
    }

    const Vector y = add_noise(phi.apply(x), spec.input_snr_db, truth, splitmix64(base ^ 2));
    double eps = 0.0;
    if (spec.epsilon)
      eps = *spec.epsilon;
    else if (std::isfinite(spec.input_snr_db))
      eps = select_epsilon(noise_sigma(spec.input_snr_db, truth), M, spec.percentile);

    RealisationResult rr;
    rr.index = r;
    rr.seed = base;
    rr.report = solve({spec.setting, phi, y, eps, weights, wavelets}, spec.solver);
    rr.snr_db = compute_snr(HarmonicCoeffs(L, sht.forward(rr.report.x)), truth);
    rr.report.snr_db = rr.snr_db;
    const Vector data_map = selection ? selection->adjoint(y) : y;
    rr.data_snr_db = compute_snr(HarmonicCoeffs(L, sht.forward(data_map)), truth);
    result.snr.snr_db.push_back(rr.snr_db);

    if (emitting) {
      io::save_record(emit.dir / (emit.prefix + "data_" + std::to_string(r) + ".ssmap"),
                      io::to_record(SphericalMap(sht.grid(), data_map)));
      io::save_record(emit.dir / (emit.prefix + "recon_" + std::to_string(r) + ".ssmap"),
                      io::to_record(SphericalMap(sht.grid(), rr.report.x)));
      if (selection) {
        std::ofstream(emit.dir / (emit.prefix + "mask_" + std::to_string(r) + ".json")) << io::mask_to_json(mask)
                                                                                         << "\n";
      }
    }
    result.realisations.push_back(std::move(rr));
  }

  if (emitting) {
    std::ofstream t(emit.dir / (emit.prefix + "snr.txt"));
    t << "# realisation seed snr_db data_snr_db converged iterations objective residual epsilon wall_seconds\n";
    t << std::setprecision(10);
    for (const auto& rr : result.realisations) {
      const auto& rep = rr.report;
      t << rr.index << ' ' << rr.seed << ' ' << rr.snr_db << ' ' << rr.data_snr_db << ' ' << rep.converged << ' '
        << rep.iterations << ' ' << rep.objective << ' ' << rep.residual << ' ' << rep.epsilon << ' '
        << rep.wall_seconds << '\n';
    }
    t << "# mean " << result.snr.mean() << " spread " << result.snr.spread() << '\n';

    nlohmann::ordered_json j;
    j["spec"] = nlohmann::ordered_json::parse(experiment_to_json(spec));
    j["mean_snr_db"] = result.snr.mean();
    j["spread_db"] = result.snr.spread();
    j["all_converged"] = result.all_converged();
    auto& reps = j["realisations"] = nlohmann::ordered_json::array();
    for (const auto& rr : result.realisations) {
      auto e = nlohmann::ordered_json::parse(rr.report.to_json());
      e["data_snr_db"] = rr.data_snr_db;
      e["seed"] = rr.seed;
      reps.push_back(e);
    }
    std::ofstream(emit.dir / (emit.prefix + "report.json")) << j.dump(2) << "\n";
  }
  return result;
}

std::vector<SweepRow> run_sweep(const ExperimentSpec& spec, const std::vector<double>& n_m,
                                const HarmonicCoeffs& truth, const EmitOptions& emit,
                                std::vector<ExperimentResult>* results) {
  std::vector<SweepRow> rows;
  for (double v : n_m) {
    ExperimentSpec s = spec;
    s.n_m = v;
    EmitOptions e = emit;
    if (!emit.dir.empty() && n_m.size() > 1) {
      std::ostringstream p;
      p << emit.prefix << "nm" << v << "_";
      e.prefix = p.str();
    }
    ExperimentResult r = run_experiment(s, truth, e);
    SweepRow row{v, r.snr.mean(), r.snr.spread(), 0, static_cast<int>(r.realisations.size())};
    for (const auto& rr : r.realisations) row.converged += rr.report.converged ? 1 : 0;
    rows.push_back(row);
    if (results) results->push_back(std::move(r));
  }
  if (!emit.dir.empty()) {
    std::ofstream p(emit.dir / (emit.prefix + "plot.txt"));
    p << "# n_m mean_snr_db spread_db converged realisations\n" << std::setprecision(10);
    for (const auto& row : rows)
      p << row.n_m << ' ' << row.mean_snr_db << ' ' << row.spread_db << ' ' << row.converged << ' '
        << row.realisations << '\n';
  }
  return rows;
}

}  // namespace sphsparse
