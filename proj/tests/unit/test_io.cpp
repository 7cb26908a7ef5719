#include <cstring>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "sphsparse/io.hpp"

namespace sphsparse {
namespace {

Vector random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vector v(n);
  for (auto& x : v) x = Complex(g(rng), g(rng));
  return v;
}

std::string bytes_of(const io::MapRecord& r) {
  std::ostringstream out;
  io::write_record(out, r);
  return out.str();
}

io::MapRecord parse(const std::string& bytes) {
  std::istringstream in(bytes);
  return io::read_record(in);
}

std::uint32_t u32_at(const std::string& s, std::size_t pos) {
  std::uint32_t v;
  std::memcpy(&v, s.data() + pos, 4);
  return v;
}

TEST(MapRecord, HeaderLayoutIsExact) {
  Vector v(SphericalGrid(2).size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = double(i) + 0.5;
  const std::string b = bytes_of(io::to_record(SphericalMap(SphericalGrid(2), v)));
  ASSERT_EQ(b.size(), 6u + 12u + 6u * 8u);
  EXPECT_EQ(b.substr(0, 6), "SSMAP1");
  EXPECT_EQ(u32_at(b, 6), 2u);   // L
  EXPECT_EQ(u32_at(b, 10), 0u);  // kind
  EXPECT_EQ(u32_at(b, 14), 1u);  // real
  double first, last;
  std::memcpy(&first, b.data() + 18, 8);
  std::memcpy(&last, b.data() + 18 + 5 * 8, 8);
  EXPECT_EQ(first, 0.5);
  EXPECT_EQ(last, 5.5);
}

TEST(MapRecord, ComplexPayloadIsInterleaved) {
  HarmonicCoeffs c(2);
  c.data << Complex(1, 2), Complex(3, 4), Complex(5, 6), Complex(7, 8);
  const std::string b = bytes_of(io::to_record(c));
  ASSERT_EQ(b.size(), 18u + 8u * 8u);
  EXPECT_EQ(u32_at(b, 10), 1u);
  EXPECT_EQ(u32_at(b, 14), 0u);
  double d[8];
  std::memcpy(d, b.data() + 18, sizeof d);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(d[i], i + 1.0);
}

TEST(MapRecord, RotationKindsCarryN) {
  const RotationGrid g(4, 2);
  const RotationMap m(g, random_vector(g.size(), 1));
  const std::string b = bytes_of(io::to_record(m));
  EXPECT_EQ(u32_at(b, 10), 2u);
  EXPECT_EQ(u32_at(b, 18), 2u);
  EXPECT_EQ(b.size(), 22u + std::size_t(g.size()) * 16u);
  const RotationMap back = io::as_rotation_map(parse(b));
  EXPECT_EQ(back.grid, g);
  EXPECT_EQ(back.samples, m.samples);

  const WignerCoeffs w(5, 3, random_vector(Eigen::Index(WignerIndex(5, 3).size()), 2));
  const WignerCoeffs wb = io::as_wigner(parse(bytes_of(io::to_record(w))));
  EXPECT_EQ(wb.L, 5);
  EXPECT_EQ(wb.N, 3);
  EXPECT_EQ(wb.data, w.data);
}

TEST(MapRecord, RoundTripIsBitExact) {
  for (int L : {1, 3, 16}) {
    const HarmonicCoeffs c(L, random_vector(Eigen::Index(L) * L, L));
    const HarmonicCoeffs back = io::as_harmonic(parse(bytes_of(io::to_record(c))));
    EXPECT_EQ(back.data, c.data);
    const SphericalMap m(SphericalGrid(L), random_vector(SphericalGrid(L).size(), 10 + L).real().cast<Complex>());
    const io::MapRecord r = io::to_record(m);
    EXPECT_TRUE(r.real);
    EXPECT_EQ(io::as_spherical_map(parse(bytes_of(r))).samples, m.samples);
  }
}

TEST(MapRecord, ReadThenWriteIsByteIdentical) {
  for (bool real : {false, true}) {
    Vector v = random_vector(SphericalGrid(8).size(), 3);
    if (real) v = v.real().cast<Complex>();
    const std::string b = bytes_of(io::to_record(SphericalMap(SphericalGrid(8), v)));
    EXPECT_EQ(bytes_of(parse(b)), b);
  }
  // A complex-flagged record stays complex even when its imaginary parts vanish.
  io::MapRecord r{io::MapKind::harmonic, 2, 1, false, Vector::Ones(4)};
  const std::string b = bytes_of(r);
  EXPECT_EQ(u32_at(b, 14), 0u);
  EXPECT_EQ(bytes_of(parse(b)), b);
}

TEST(MapRecord, WriterRejectsInconsistentRecords) {
  std::ostringstream out;
  EXPECT_THROW(io::write_record(out, {io::MapKind::harmonic, 2, 1, false, Vector::Ones(3)}), FormatError);
  Vector v = Vector::Ones(4);
  v[1] = Complex(0, 1);
  EXPECT_THROW(io::write_record(out, {io::MapKind::harmonic, 2, 1, true, v}), FormatError);
}

TEST(MapRecord, ReaderRejectsMalformedInput) {
  const std::string good = bytes_of(io::to_record(HarmonicCoeffs(2, random_vector(4, 1))));
  auto patched = [&](std::size_t pos, std::uint32_t v) {
    std::string s = good;
    std::memcpy(s.data() + pos, &v, 4);
    return s;
  };
  std::string bad_magic = good;
  bad_magic[5] = '2';
  EXPECT_THROW(parse(bad_magic), FormatError);
  EXPECT_THROW(parse(patched(10, 4)), FormatError);  // kind
  EXPECT_THROW(parse(patched(14, 2)), FormatError);  // real flag
  EXPECT_THROW(parse(patched(6, 0)), FormatError);   // L
  EXPECT_THROW(parse(good.substr(0, good.size() - 1)), FormatError);
  EXPECT_THROW(parse(good.substr(0, 12)), FormatError);
  EXPECT_THROW(parse(""), FormatError);

  std::string rot = bytes_of(io::to_record(RotationMap(RotationGrid(3, 2))));
  const std::uint32_t big_n = 4;
  std::memcpy(rot.data() + 18, &big_n, 4);
  EXPECT_THROW(parse(rot), FormatError);
}

TEST(MapRecord, KindMismatchIsAnError) {
  const io::MapRecord r = io::to_record(HarmonicCoeffs(4));
  EXPECT_THROW(io::as_spherical_map(r), FormatError);
  EXPECT_THROW(io::as_rotation_map(r), FormatError);
  EXPECT_NO_THROW(io::as_harmonic(r));
}

TEST(WaveletContainer, RoundTrip) {
  for (int N : {1, 3}) {
    const WaveletConfig cfg{16, N, 2.0, 1};
    const WaveletTransform t(cfg);
    const Vector alpha = random_vector(t.n_coeffs(), 7 + N);
    const WaveletCoeffs w = WaveletCoeffs::unflatten(cfg, alpha);
    std::stringstream buf;
    io::write_wavelets(buf, w);
    const WaveletCoeffs back = io::read_wavelets(buf);
    EXPECT_EQ(back.config, cfg);
    EXPECT_EQ(back.flatten(), alpha);
  }
}

TEST(WaveletContainer, ManifestIsCheckedAgainstRecords) {
  const WaveletConfig cfg{8, 1, 2.0, 0};
  std::stringstream buf;
  io::write_wavelets(buf, WaveletCoeffs(cfg));
  std::string s = buf.str();
  const auto pos = s.find("\"L\":8");
  ASSERT_NE(pos, std::string::npos);
  s.replace(pos, 5, "\"L\":9");
  std::istringstream in(s);
  EXPECT_THROW(io::read_wavelets(in), FormatError);

  std::string truncated = buf.str();
  truncated.resize(truncated.size() - 8);
  std::istringstream in2(truncated);
  EXPECT_THROW(io::read_wavelets(in2), FormatError);
}

TEST(MaskJson, RoundTripRegeneratesIndices) {
  const MaskSpec m{123456789012345ull, 300, 16};
  const MaskSpec back = io::mask_from_json(io::mask_to_json(m));
  EXPECT_EQ(back.seed, m.seed);
  EXPECT_EQ(back.M, m.M);
  EXPECT_EQ(back.L, m.L);
  EXPECT_EQ(back.indices(), m.indices());
  EXPECT_THROW(io::mask_from_json("{\"seed\": 1, \"M\": 2}"), FormatError);
  EXPECT_THROW(io::mask_from_json("not json"), FormatError);
}

}  // namespace
}  // namespace sphsparse
