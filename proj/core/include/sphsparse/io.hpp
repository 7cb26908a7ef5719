#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "sphsparse/linop.hpp"
#include "sphsparse/so3.hpp"
#include "sphsparse/sphere.hpp"
#include "sphsparse/wavelet.hpp"

namespace sphsparse::io {

/// SSMAP1 record layout (little-endian):
///   "SSMAP1" | u32 L | u32 kind | u32 real-flag | [u32 N for kinds 2, 3] | f64 payload
/// The payload holds one double per entry when real-flag is 1, interleaved
/// (re, im) pairs otherwise. Samples are row-major on their grid, harmonic
/// coefficients at ell^2 + ell + m, Wigner coefficients in WignerIndex order.
enum class MapKind : std::uint32_t {
  sphere_samples = 0,
  harmonic = 1,
  rotation_samples = 2,
  wigner = 3,
};

struct MapRecord {
  MapKind kind = MapKind::sphere_samples;
  int L = 1;
  int N = 1;  // kinds 2 and 3 only
  bool real = false;
  Vector payload;

  /// Entries expected for (kind, L, N).
  [[nodiscard]] Eigen::Index expected_size() const;
};

/// True when every imaginary part is exactly zero.
bool is_real(const Vector& v);

/// Throws FormatError if the payload size does not match the header or if
/// `real` is set on a payload with imaginary parts.
void write_record(std::ostream& out, const MapRecord& record);
/// Throws FormatError on a bad magic, unknown kind, bad flag or short payload.
MapRecord read_record(std::istream& in);

void save_record(const std::filesystem::path& path, const MapRecord& record);
MapRecord load_record(const std::filesystem::path& path);

// Conversions. The real flag is set iff the data have no imaginary part.
MapRecord to_record(const SphericalMap& map);
MapRecord to_record(const HarmonicCoeffs& coeffs);
MapRecord to_record(const RotationMap& map);
MapRecord to_record(const WignerCoeffs& coeffs);

SphericalMap as_spherical_map(const MapRecord& record);
HarmonicCoeffs as_harmonic(const MapRecord& record);
RotationMap as_rotation_map(const MapRecord& record);
WignerCoeffs as_wigner(const MapRecord& record);

/// Wavelet container:
///   "SSWAV1" | u32 manifest length | manifest JSON | SSMAP1 scaling map | SSMAP1 per scale
/// The manifest lists L, N, lambda, j_min, j_max, scaling_L and the per-scale
/// (L^j, N^j); the reader checks it against the configuration it implies.
void write_wavelets(std::ostream& out, const WaveletCoeffs& coeffs);
WaveletCoeffs read_wavelets(std::istream& in);
void save_wavelets(const std::filesystem::path& path, const WaveletCoeffs& coeffs);
WaveletCoeffs load_wavelets(const std::filesystem::path& path);

/// {"seed": ..., "M": ..., "L": ...}
std::string mask_to_json(const MaskSpec& mask);
MaskSpec mask_from_json(const std::string& text);

}  // namespace sphsparse::io
