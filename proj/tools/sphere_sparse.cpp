// sphere-sparse: experiment runner and map utilities.
//
//   sphere-sparse run --config exp.json [--emit-dir out/] [--oracle] [--verbose]
//   sphere-sparse testmap --kind noise --L 32 --seed 1 --out map.ssmap
//   sphere-sparse convert --input samples.ssmap --to harmonic --lmax 128 --out coeffs.ssmap
//   sphere-sparse info map.ssmap
//
// `run` exits 0 when every solve converged and 2 when some did not.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sphsparse/harness.hpp"
#include "sphsparse/io.hpp"

namespace fs = std::filesystem;
using namespace sphsparse;

namespace {

constexpr int kExitPartial = 2;

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cmd_run(const fs::path& config_path, const fs::path& emit_dir, bool oracle, bool verbose) {
  RunConfig cfg = run_config_from_json(read_file(config_path), config_path.parent_path());
  if (oracle) cfg.spec.backend = Backend::dense;
  if (verbose) {
    cfg.spec.solver.monitor = [](const IterationInfo& it) {
      if (it.iteration % 25 == 0)
        std::cerr << "  iter " << it.iteration << " change " << it.change << " objective " << it.objective << "\n";
    };
  }
  const HarmonicCoeffs truth = make_testmap(cfg.map, cfg.spec.L);

  std::cout << "# " << to_string(cfg.spec.kind) << " " << to_string(cfg.spec.setting) << " L=" << cfg.spec.L
            << " N=" << cfg.spec.N << " eta=" << cfg.spec.eta << " snr_in=" << cfg.spec.input_snr_db << "\n";
  std::cout << "# n_m realisation snr_db data_snr_db converged iterations residual/epsilon seconds\n";
  std::vector<ExperimentResult> results;
  const auto rows = run_sweep(cfg.spec, cfg.n_m, truth, {emit_dir, ""}, &results);

  bool all = true;
  std::cout << std::fixed << std::setprecision(3);
  for (const auto& r : results) {
    for (const auto& rr : r.realisations) {
      const auto& rep = rr.report;
      std::cout << r.spec.n_m << ' ' << rr.index << ' ' << rr.snr_db << ' ' << rr.data_snr_db << ' '
                << (rep.converged ? "yes" : "no") << ' ' << rep.iterations << ' '
                << (rep.epsilon > 0 ? rep.residual / rep.epsilon : rep.residual) << ' ' << rep.wall_seconds << "\n";
    }
    all = all && r.all_converged();
  }
  std::cout << "# n_m mean_snr_db spread_db converged/realisations\n";
  for (const auto& row : rows)
    std::cout << "# " << row.n_m << ' ' << row.mean_snr_db << ' ' << row.spread_db << ' ' << row.converged << '/'
              << row.realisations << "\n";
  if (!all) std::cerr << "sphere-sparse: some solves stopped at max_iter without converging\n";
  return all ? 0 : kExitPartial;
}

int cmd_testmap(const std::string& kind, int L, std::uint64_t seed, const fs::path& input, const fs::path& out,
                bool samples) {
  TestMapSpec spec;
  spec.seed = seed;
  if (kind == "noise") {
    spec.kind = TestMapSpec::Kind::noise;
  } else if (kind == "ingested") {
    if (input.empty()) throw ConfigError("--kind ingested needs --input");
    spec.kind = TestMapSpec::Kind::ingested;
    spec.path = input;
  } else {
    throw ConfigError("unknown test map kind '" + kind + "'");
  }
  const HarmonicCoeffs c = make_testmap(spec, L);
  if (samples) {
    SphericalMap m = SphereTransform(L).inverse(c);
    if (c.real_signal) m.samples = m.samples.real().cast<Complex>();
    io::save_record(out, io::to_record(m));
  } else {
    io::save_record(out, io::to_record(c));
  }
  return 0;
}

int cmd_convert(const fs::path& input, const std::string& to, int lmax, const fs::path& out) {
  const io::MapRecord r = io::load_record(input);
  if (to == "harmonic") {
    HarmonicCoeffs c = r.kind == io::MapKind::harmonic ? io::as_harmonic(r)
                                                       : SphereTransform(r.L).forward(io::as_spherical_map(r));
    if (lmax > 0) c = truncate(c, lmax);
    io::save_record(out, io::to_record(c));
  } else if (to == "samples") {
    HarmonicCoeffs c = r.kind == io::MapKind::harmonic ? io::as_harmonic(r)
                                                       : SphereTransform(r.L).forward(io::as_spherical_map(r));
    if (lmax > 0) c = truncate(c, lmax);
    io::save_record(out, io::to_record(SphereTransform(c.L).inverse(c)));
  } else {
    throw ConfigError("--to must be harmonic or samples");
  }
  return 0;
}

int cmd_info(const fs::path& input) {
  const io::MapRecord r = io::load_record(input);
  static const char* kinds[] = {"sphere samples", "harmonic coefficients", "rotation samples",
                                "Wigner coefficients"};
  std::cout << input.string() << ": " << kinds[static_cast<int>(r.kind)] << ", L=" << r.L;
  if (r.kind == io::MapKind::rotation_samples || r.kind == io::MapKind::wigner) std::cout << ", N=" << r.N;
  std::cout << ", " << (r.real ? "real" : "complex") << ", " << r.payload.size() << " entries, norm "
            << r.payload.norm() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse regularisation of inverse problems on the sphere"};
  app.require_subcommand(1);

  fs::path config, emit_dir;
  bool oracle = false, verbose = false;
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--emit-dir", emit_dir, "Directory for maps, SNR table and report");
  run->add_flag("--oracle", oracle, "Use the dense oracle transforms (slow; small L only)");
  run->add_flag("-v,--verbose", verbose, "Print solver progress to stderr");

  std::string kind = "noise";
  int L = 32;
  std::uint64_t seed = 0;
  fs::path input, out;
  bool samples = false;
  auto* tm = app.add_subcommand("testmap", "Write a band-limited test map");
  tm->add_option("--kind", kind, "noise or ingested")->check(CLI::IsMember({"noise", "ingested"}));
  tm->add_option("--L", L, "Band-limit")->check(CLI::PositiveNumber);
  tm->add_option("--seed", seed, "Seed for noise maps");
  tm->add_option("--input", input, "SSMAP1 file to ingest")->check(CLI::ExistingFile);
  tm->add_option("--out", out, "Output SSMAP1 file")->required();
  tm->add_flag("--samples", samples, "Write sphere samples instead of harmonic coefficients");

  std::string to = "harmonic";
  int lmax = 0;
  fs::path cin, cout_path;
  auto* cv = app.add_subcommand("convert", "Convert between samples and harmonic coefficients");
  cv->add_option("--input", cin, "SSMAP1 input")->required()->check(CLI::ExistingFile);
  cv->add_option("--to", to, "harmonic or samples")->check(CLI::IsMember({"harmonic", "samples"}));
  cv->add_option("--lmax", lmax, "Truncate to this band-limit");
  cv->add_option("--out", cout_path, "SSMAP1 output")->required();

  fs::path info_path;
  auto* info = app.add_subcommand("info", "Describe an SSMAP1 file");
  info->add_option("file", info_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, emit_dir, oracle, verbose);
    if (*tm) return cmd_testmap(kind, L, seed, input, out, samples);
    if (*cv) return cmd_convert(cin, to, lmax, cout_path);
    if (*info) return cmd_info(info_path);
  } catch (const std::exception& e) {
    std::cerr << "sphere-sparse: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
