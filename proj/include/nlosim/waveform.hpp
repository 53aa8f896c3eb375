#pragma once

#include <vector>

#include "nlosim/common.hpp"

namespace nlosim {

/// Linear-chirp radar parameters. The dechirped (IF) tone of a return with
/// round-trip delay th is exp(j*2*pi*(f_c*th + (bandwidth/chirp_t)*th*t)).
struct FmcwConfig {
  double carrier_hz = 24.0e9;
  double bandwidth_hz = 250.0e6;
  double chirp_t_s = 2.56e-3;
  int chirps_per_frame = 32;
  double sample_rate_hz = 200.0e3;

  double slope() const { return bandwidth_hz / chirp_t_s; }
  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  int samples_per_chirp() const;
  int samples_per_frame() const { return samples_per_chirp() * chirps_per_frame; }
  void validate() const;
};

/// Uniform linear array of virtual elements (tx*rx combinations), laid out
/// along +y with boresight +x, so a bearing aoa from the +x axis produces an
/// inter-element phase of 2*pi*spacing*sin(aoa)/lambda.
struct ArrayConfig {
  int n_elements = 8;
  double spacing_m = 0.5 * kSpeedOfLight / 24.0e9;  // half wavelength

  void validate() const;
};

/// One synthesized dechirped chirp across time samples.
struct ChirpReturn {
  std::vector<cd> samples;
  double sample_rate_hz = 0.0;
};

/// Dechirped beat frequency of a scatterer at one-way distance d:
/// slope * (2 d / c). Throws std::invalid_argument for d < 0.
double beat_frequency(const FmcwConfig& cfg, double one_way_distance_m);

/// Sum of dechirped tones, one per (amplitude, one-way distance) pair,
/// sampled at cfg.sample_rate_hz over a single chirp.
ChirpReturn synthesize_if_chirp(
    const FmcwConfig& cfg,
    const std::vector<std::pair<double, double>>& amp_and_distance);

/// Phase of array element `index` for a plane wave arriving at bearing
/// `aoa` (radians from boresight): 2*pi*index*spacing*sin(aoa)/lambda.
double array_phase(const ArrayConfig& arr, int index, double aoa_rad,
                   double wavelength_m);

}  // namespace nlosim
