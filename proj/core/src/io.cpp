#include "sphsparse/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace sphsparse::io {
namespace {

constexpr std::array<char, 6> kMapMagic{'S', 'S', 'M', 'A', 'P', '1'};
constexpr std::array<char, 6> kWaveletMagic{'S', 'S', 'W', 'A', 'V', '1'};

// Files are little-endian whatever the host.
template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& out, double v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw FormatError(std::string("truncated header: ") + what);
  return to_little(v);
}

void check_magic(std::istream& in, const std::array<char, 6>& magic) {
  std::array<char, 6> got{};
  if (!in.read(got.data(), got.size()) || got != magic)
    throw FormatError("bad magic, expected " + std::string(magic.begin(), magic.end()));
}

bool has_direction(MapKind k) { return k == MapKind::rotation_samples || k == MapKind::wigner; }

}  // namespace

Eigen::Index MapRecord::expected_size() const {
  switch (kind) {
    case MapKind::sphere_samples: return SphericalGrid(L).size();
    case MapKind::harmonic: return static_cast<Eigen::Index>(L) * L;
    case MapKind::rotation_samples: return RotationGrid(L, N).size();
    case MapKind::wigner: return static_cast<Eigen::Index>(WignerIndex(L, N).size());
  }
  throw FormatError("unknown map kind");
}

bool is_real(const Vector& v) { return (v.imag().array() == 0.0).all(); }

void write_record(std::ostream& out, const MapRecord& r) {
  if (r.payload.size() != r.expected_size())
    throw FormatError("payload has " + std::to_string(r.payload.size()) + " entries, header implies " +
                      std::to_string(r.expected_size()));
  if (r.real && !is_real(r.payload)) throw FormatError("real flag set on a complex payload");
  out.write(kMapMagic.data(), kMapMagic.size());
  put_u32(out, static_cast<std::uint32_t>(r.L));
  put_u32(out, static_cast<std::uint32_t>(r.kind));
  put_u32(out, r.real ? 1u : 0u);
  if (has_direction(r.kind)) put_u32(out, static_cast<std::uint32_t>(r.N));
  for (const Complex& c : r.payload) {
    put_f64(out, c.real());
    if (!r.real) put_f64(out, c.imag());
  }
  if (!out) throw FormatError("write failed");
}

MapRecord read_record(std::istream& in) {
  check_magic(in, kMapMagic);
  MapRecord r;
  const std::uint32_t L = get_u32(in, "L");
  const std::uint32_t kind = get_u32(in, "kind");
  const std::uint32_t flag = get_u32(in, "real-flag");
  if (L < 1 || L > (1u << 15)) throw FormatError("implausible band-limit " + std::to_string(L));
  if (kind > 3) throw FormatError("unknown map kind " + std::to_string(kind));
  if (flag > 1) throw FormatError("real-flag must be 0 or 1, got " + std::to_string(flag));
  r.L = static_cast<int>(L);
  r.kind = static_cast<MapKind>(kind);
  r.real = flag == 1;
  if (has_direction(r.kind)) {
    const std::uint32_t N = get_u32(in, "N");
    if (N < 1 || N > L) throw FormatError("directional band-limit out of range: " + std::to_string(N));
    r.N = static_cast<int>(N);
  }
  const Eigen::Index n = r.expected_size();
  const std::size_t doubles = static_cast<std::size_t>(n) * (r.real ? 1 : 2);
  std::vector<double> raw(doubles);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(doubles * sizeof(double))))
    throw FormatError("truncated payload: expected " + std::to_string(doubles) + " doubles");
  for (double& d : raw) d = to_little(d);
  r.payload.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    r.payload[i] = r.real ? Complex(raw[i], 0.0) : Complex(raw[2 * i], raw[2 * i + 1]);
  return r;
}

void save_record(const std::filesystem::path& path, const MapRecord& record) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_record(out, record);
}

MapRecord load_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_record(in);
}

MapRecord to_record(const SphericalMap& map) {
  return {MapKind::sphere_samples, map.grid.L(), 1, is_real(map.samples), map.samples};
}

MapRecord to_record(const HarmonicCoeffs& coeffs) {
  return {MapKind::harmonic, coeffs.L, 1, is_real(coeffs.data), coeffs.data};
}

MapRecord to_record(const RotationMap& map) {
  return {MapKind::rotation_samples, map.grid.L(), map.grid.N(), is_real(map.samples), map.samples};
}

MapRecord to_record(const WignerCoeffs& coeffs) {
  return {MapKind::wigner, coeffs.L, coeffs.N, is_real(coeffs.data), coeffs.data};
}

namespace {
void expect_kind(const MapRecord& r, MapKind k) {
  if (r.kind != k)
    throw FormatError("expected map kind " + std::to_string(static_cast<int>(k)) + ", got " +
                      std::to_string(static_cast<int>(r.kind)));
}
}  // namespace

SphericalMap as_spherical_map(const MapRecord& r) {
  expect_kind(r, MapKind::sphere_samples);
  return {SphericalGrid(r.L), r.payload};
}

HarmonicCoeffs as_harmonic(const MapRecord& r) {
  expect_kind(r, MapKind::harmonic);
  HarmonicCoeffs c(r.L, r.payload);
  c.real_signal = c.reality_defect() == 0.0;
  return c;
}

RotationMap as_rotation_map(const MapRecord& r) {
  expect_kind(r, MapKind::rotation_samples);
  return {RotationGrid(r.L, r.N), r.payload};
}

WignerCoeffs as_wigner(const MapRecord& r) {
  expect_kind(r, MapKind::wigner);
  return {r.L, r.N, r.payload};
}

// ---------------------------------------------------------------------------
// Wavelet container

void write_wavelets(std::ostream& out, const WaveletCoeffs& coeffs) {
  const WaveletConfig& c = coeffs.config;
  nlohmann::json m;
  m["L"] = c.L;
  m["N"] = c.N;
  m["lambda"] = c.lambda;
  m["j_min"] = c.j_min;
  m["j_max"] = c.j_max();
  m["scaling_L"] = c.scaling_L();
  auto& scales = m["scales"] = nlohmann::json::array();
  for (int j = c.j_min; j <= c.j_max(); ++j) scales.push_back({{"j", j}, {"L", c.scale_L(j)}, {"N", c.scale_N(j)}});
  const std::string text = m.dump();
  out.write(kWaveletMagic.data(), kWaveletMagic.size());
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  write_record(out, to_record(coeffs.scaling));
  for (const RotationMap& s : coeffs.scales) write_record(out, to_record(s));
}

WaveletCoeffs read_wavelets(std::istream& in) {
  check_magic(in, kWaveletMagic);
  const std::uint32_t n = get_u32(in, "manifest length");
  if (n > (1u << 20)) throw FormatError("implausible manifest length");
  std::string text(n, '\0');
  if (!in.read(text.data(), n)) throw FormatError("truncated manifest");

  WaveletConfig c;
  try {
    const auto m = nlohmann::json::parse(text);
    c = {m.at("L").get<int>(), m.at("N").get<int>(), m.at("lambda").get<double>(), m.at("j_min").get<int>()};
    c.validate();
    if (m.at("j_max").get<int>() != c.j_max() || m.at("scaling_L").get<int>() != c.scaling_L())
      throw FormatError("wavelet manifest disagrees with its own parameters");
    const auto& scales = m.at("scales");
    if (!scales.is_array() || static_cast<int>(scales.size()) != c.n_scales())
      throw FormatError("wavelet manifest lists the wrong number of scales");
    for (int j = c.j_min; j <= c.j_max(); ++j) {
      const auto& e = scales[j - c.j_min];
      if (e.at("j").get<int>() != j || e.at("L").get<int>() != c.scale_L(j) || e.at("N").get<int>() != c.scale_N(j))
        throw FormatError("wavelet manifest entry for scale " + std::to_string(j) + " is inconsistent");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("wavelet manifest: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("wavelet manifest: ") + e.what());
  }

  WaveletCoeffs w(c);
  const MapRecord s = read_record(in);
  if (s.L != c.scaling_L()) throw FormatError("scaling record band-limit disagrees with manifest");
  w.scaling = as_spherical_map(s);
  for (int j = c.j_min; j <= c.j_max(); ++j) {
    const MapRecord r = read_record(in);
    if (r.L != c.scale_L(j) || r.N != c.scale_N(j))
      throw FormatError("record for scale " + std::to_string(j) + " disagrees with manifest");
    w.scale(j) = as_rotation_map(r);
  }
  return w;
}

void save_wavelets(const std::filesystem::path& path, const WaveletCoeffs& coeffs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_wavelets(out, coeffs);
}

WaveletCoeffs load_wavelets(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_wavelets(in);
}

// ---------------------------------------------------------------------------

std::string mask_to_json(const MaskSpec& mask) {
  return nlohmann::json{{"seed", mask.seed}, {"M", mask.M}, {"L", mask.L}}.dump();
}

MaskSpec mask_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    MaskSpec m{j.at("seed").get<std::uint64_t>(), j.at("M").get<Eigen::Index>(), j.at("L").get<int>()};
    if (m.L < 1 || m.M < 0) throw FormatError("mask: L must be >= 1 and M >= 0");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("mask: ") + e.what());
  }
}

}  // namespace sphsparse::io
