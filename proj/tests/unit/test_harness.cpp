#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "sphsparse/harness.hpp"
#include "sphsparse/io.hpp"

namespace sphsparse {
namespace {

namespace fs = std::filesystem;

const fs::path kData = SPHSPARSE_TEST_DATA_DIR;

HarmonicCoeffs unit_truth() {
  HarmonicCoeffs c(4);
  c(0, 0) = 1.0;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sphsparse_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(Noise, InfiniteSnrLeavesDataAlone) {
  const Vector y = Vector::Constant(10, Complex(1.0, 2.0));
  EXPECT_EQ(add_noise(y, std::numeric_limits<double>::infinity(), unit_truth(), 1), y);
  EXPECT_THROW(add_noise(y, std::nan(""), unit_truth(), 1), ConfigError);
}

TEST(Noise, SigmaFollowsTheFormula) {
  EXPECT_NEAR(noise_sigma(46.0, unit_truth()), 5.0118723362727e-3, 1e-15);
  HarmonicCoeffs t = unit_truth();
  t.data *= 3.0;
  EXPECT_NEAR(noise_sigma(20.0, t), 0.3, 1e-15);
}

TEST(Noise, EmpiricalStandardDeviation) {
  const int n = 1000000;
  const Vector y = Vector::Zero(n);
  const Vector out = add_noise(y, 46.0, unit_truth(), 99);
  EXPECT_EQ(out.imag().norm(), 0.0);  // real noise
  const double mean = out.real().mean();
  const double sd = std::sqrt((out.real().array() - mean).square().sum() / (n - 1));
  EXPECT_NEAR(sd / noise_sigma(46.0, unit_truth()), 1.0, 0.01);
  EXPECT_EQ(add_noise(y.head(100), 46.0, unit_truth(), 5), add_noise(y.head(100), 46.0, unit_truth(), 5));
  EXPECT_NE(add_noise(y.head(100), 46.0, unit_truth(), 5), add_noise(y.head(100), 46.0, unit_truth(), 6));
}

TEST(Snr, Examples) {
  const HarmonicCoeffs t = unit_truth();
  HarmonicCoeffs e = t;
  e(1, 0) = 0.1;
  EXPECT_NEAR(compute_snr(e, t), 20.0, 1e-12);
  EXPECT_NEAR(compute_snr(HarmonicCoeffs(4), t), 0.0, 1e-15);
  EXPECT_EQ(compute_snr(t, t), std::numeric_limits<double>::infinity());
  EXPECT_THROW(compute_snr(HarmonicCoeffs(3), t), SizeError);
}

TEST(Snr, MatchesDirectNormComputation) {
  const HarmonicCoeffs a = make_noise_testmap(16, 1), b = make_noise_testmap(16, 2);
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < a.data.size(); ++i) {
    num += std::norm(b.data[i]);
    den += std::norm(a.data[i] - b.data[i]);
  }
  EXPECT_NEAR(compute_snr(a, b), 10.0 * std::log10(num / den), 1e-12);
}

TEST(Snr, ReportStatistics) {
  const SnrReport r{{1.0, 2.0, 3.0, 6.0}};
  EXPECT_DOUBLE_EQ(r.mean(), 3.0);
  EXPECT_NEAR(r.spread(), std::sqrt(14.0 / 3.0), 1e-15);
  EXPECT_EQ(SnrReport{{4.0}}.spread(), 0.0);
}

TEST(TestMap, NoiseMapIsRealAndBandLimited) {
  const HarmonicCoeffs c = make_noise_testmap(32, 4);
  EXPECT_EQ(c.L, 32);
  EXPECT_EQ(c.data.size(), 1024);
  EXPECT_EQ(c.reality_defect(), 0.0);
  EXPECT_GT(c.data.cwiseAbs().minCoeff(), 0.0);
  EXPECT_EQ(make_noise_testmap(32, 4).data, c.data);
  const Vector x = SphereTransform(32).inverse(c.data);
  EXPECT_LT(x.imag().cwiseAbs().maxCoeff(), 1e-12 * x.cwiseAbs().maxCoeff());
}

TEST(TestMap, IngestTruncatesAndReEmitsExactly) {
  const fs::path dir = scratch("ingest");
  const HarmonicCoeffs big(16, make_noise_testmap(16, 3).data);
  io::save_record(dir / "big.ssmap", io::to_record(big));

  const HarmonicCoeffs small = make_ingested_testmap(dir / "big.ssmap", 8);
  EXPECT_EQ(small.data, big.data.head(64));
  EXPECT_TRUE(small.real_signal);

  const HarmonicCoeffs same = make_ingested_testmap(dir / "big.ssmap", 16);
  io::save_record(dir / "again.ssmap", io::to_record(same));
  std::ifstream a(dir / "big.ssmap", std::ios::binary), b(dir / "again.ssmap", std::ios::binary);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());

  EXPECT_THROW(make_ingested_testmap(dir / "big.ssmap", 17), FormatError);
  EXPECT_THROW(make_ingested_testmap(dir / "missing.ssmap", 4), FormatError);
}

TEST(TestMap, EarthDataTruncatesTo1024LeadingCoefficients) {
  const io::MapRecord r = io::load_record(kData / "earth_L128.ssmap");
  ASSERT_EQ(r.kind, io::MapKind::harmonic);
  ASSERT_EQ(r.L, 128);
  const HarmonicCoeffs c = make_ingested_testmap(kData / "earth_L128.ssmap", 32);
  EXPECT_EQ(c.data, r.payload.head(1024));
}

TEST(ExperimentSpec, Validation) {
  ExperimentSpec s;
  s.L = 8;
  s.n_m = 1.0;
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.measurements(), 64);
  s.n_m = 1.875;  // exactly the 8 x 15 grid
  EXPECT_NO_THROW(s.validate());
  s.n_m = 1.9;
  EXPECT_THROW(s.validate(), ConfigError);
  s.n_m = 120.0 / 64.0 + 0.01;  // beyond the 8 x 15 grid
  EXPECT_THROW(s.validate(), ConfigError);
  s.kind = ExperimentKind::deconvolve;  // n_m is not used
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.measurements(), 120);
  s.input_snr_db = std::nan("");
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(ExperimentSpec, JsonConfig) {
  const ExperimentSpec s = experiment_from_json(R"({
    // comments are allowed
    "kind": "denoise", "L": 16, "N": 2, "setting": "analysis", "snr_db": "inf",
    "realisations": 3, "seed": 11, "solver": {"max_iter": 50, "gamma": 0.5}
  })");
  EXPECT_EQ(s.kind, ExperimentKind::denoise);
  EXPECT_EQ(s.eta, 3.0);
  EXPECT_EQ(s.N, 2);
  EXPECT_EQ(s.setting, Setting::analysis);
  EXPECT_TRUE(std::isinf(s.input_snr_db));
  EXPECT_EQ(s.solver.max_iter, 50);
  EXPECT_EQ(s.solver.gamma, 0.5);

  const ExperimentSpec again = experiment_from_json(experiment_to_json(s));
  EXPECT_EQ(experiment_to_json(again), experiment_to_json(s));

  EXPECT_EQ(experiment_from_json(R"({"kind": "inpaint"})").eta, 2.5);
  EXPECT_THROW(experiment_from_json(R"({"kind": "inpaint", "colour": 1})"), ConfigError);
  EXPECT_THROW(experiment_from_json(R"({"kind": "inpaint", "solver": {"speed": 1}})"), ConfigError);
  EXPECT_THROW(experiment_from_json(R"({"kind": "paint"})"), ConfigError);
  EXPECT_THROW(experiment_from_json(R"({"kind": "inpaint", "L": 8, "n_m": 2.0})"), ConfigError);
  EXPECT_THROW(experiment_from_json("[1, 2]"), ConfigError);
}

TEST(RunConfig, MapAndSweep) {
  const RunConfig c = run_config_from_json(
      R"({"kind": "inpaint", "L": 8, "n_m": [0.3, 1.0],
          "map": {"kind": "ingested", "path": "earth_L128.ssmap"}})",
      kData);
  EXPECT_EQ(c.n_m, (std::vector<double>{0.3, 1.0}));
  EXPECT_EQ(c.map.kind, TestMapSpec::Kind::ingested);
  EXPECT_TRUE(fs::exists(c.map.path));
  EXPECT_THROW(run_config_from_json(R"({"kind": "inpaint", "L": 8, "n_m": [0.3, 2.0]})"), ConfigError);
  EXPECT_THROW(run_config_from_json(R"({"kind": "inpaint", "map": {"kind": "photo"}})"), ConfigError);
}

TEST(Experiment, ExactDenoisingIsExact) {
  ExperimentSpec s;
  s.kind = ExperimentKind::denoise;
  s.L = 8;
  s.eta = 3.0;
  s.input_snr_db = std::numeric_limits<double>::infinity();
  s.epsilon = 0.0;
  for (Setting setting : {Setting::analysis, Setting::synthesis}) {
    s.setting = setting;
    const auto r = run_experiment(s, make_noise_testmap(8, 1));
    EXPECT_GE(r.snr.mean(), 100.0) << to_string(setting);
  }
}

TEST(Experiment, ReproducibleFromSeed) {
  ExperimentSpec s;
  s.L = 8;
  s.n_m = 0.8;
  s.realisations = 2;
  s.seed = 5;
  s.solver.max_iter = 30;
  const HarmonicCoeffs t = make_noise_testmap(8, 2);
  const auto a = run_experiment(s, t), b = run_experiment(s, t);
  ASSERT_EQ(a.snr.snr_db.size(), 2u);
  EXPECT_EQ(a.snr.snr_db, b.snr.snr_db);
  EXPECT_NE(a.snr.snr_db[0], a.snr.snr_db[1]);
  EXPECT_NE(a.realisations[0].seed, a.realisations[1].seed);
  s.seed = 6;
  EXPECT_NE(run_experiment(s, t).snr.snr_db, a.snr.snr_db);
}

TEST(Experiment, TruthMustMatchBandLimit) {
  ExperimentSpec s;
  s.L = 8;
  EXPECT_THROW(run_experiment(s, make_noise_testmap(9, 1)), SizeError);
}

TEST(Experiment, EmitsArtifacts) {
  const fs::path dir = scratch("emit");
  ExperimentSpec s;
  s.L = 8;
  s.realisations = 2;
  s.solver.max_iter = 10;
  const HarmonicCoeffs t = make_noise_testmap(8, 3);
  std::vector<ExperimentResult> results;
  const auto rows = run_sweep(s, {0.5, 1.0}, t, {dir, ""}, &results);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[1].mean_snr_db, results[1].snr.mean());
  for (const char* f : {"nm0.5_truth.ssmap", "nm0.5_data_0.ssmap", "nm0.5_recon_1.ssmap", "nm1_mask_0.json",
                        "nm1_snr.txt", "nm1_report.json", "plot.txt"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;

  const SphericalMap truth = io::as_spherical_map(io::load_record(dir / "nm1_truth.ssmap"));
  EXPECT_LT((SphereTransform(8).forward(truth.samples) - t.data).norm(), 1e-12 * t.data.norm());
  const MaskSpec m = io::mask_from_json([&] {
    std::ifstream in(dir / "nm1_mask_0.json");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }());
  EXPECT_EQ(m.M, 64);

  std::ifstream table(dir / "nm1_snr.txt");
  int rows_seen = 0;
  for (std::string line; std::getline(table, line);)
    if (!line.empty() && line[0] != '#') ++rows_seen;
  EXPECT_EQ(rows_seen, 2);
}

// Deconvolution has to beat the smoothed data it starts from.
TEST(Experiment, DeconvolutionImprovesOnSmoothedData) {
  ExperimentSpec s;
  s.kind = ExperimentKind::deconvolve;
  s.L = 16;
  s.realisations = 2;
  const auto r = run_experiment(s, make_ingested_testmap(kData / "earth_L128.ssmap", 16));
  for (const auto& rr : r.realisations) EXPECT_GT(rr.snr_db, rr.data_snr_db);
}

}  // namespace
}  // namespace sphsparse
