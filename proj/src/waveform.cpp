#include "nlosim/waveform.hpp"

#include <cmath>

namespace nlosim {

int FmcwConfig::samples_per_chirp() const {
  return static_cast<int>(std::lround(sample_rate_hz * chirp_t_s));
}

void FmcwConfig::validate() const {
  if (carrier_hz <= 0 || bandwidth_hz <= 0 || chirp_t_s <= 0 ||
      sample_rate_hz <= 0 || chirps_per_frame <= 0)
    throw std::invalid_argument("fmcw parameters must be positive");
  if (samples_per_chirp() < 1)
    throw std::invalid_argument("sample_rate too low for one chirp");
}

void ArrayConfig::validate() const {
  if (n_elements < 1) throw std::invalid_argument("n_elements must be >= 1");
  if (spacing_m <= 0) throw std::invalid_argument("spacing must be positive");
}

double beat_frequency(const FmcwConfig& cfg, double one_way_distance_m) {
  if (one_way_distance_m < 0)
    throw std::invalid_argument("distance must be non-negative");
  return cfg.slope() * (2.0 * one_way_distance_m / kSpeedOfLight);
}

ChirpReturn synthesize_if_chirp(
    const FmcwConfig& cfg,
    const std::vector<std::pair<double, double>>& amp_and_distance) {
  cfg.validate();
  const int n = cfg.samples_per_chirp();
  ChirpReturn out;
  out.sample_rate_hz = cfg.sample_rate_hz;
  out.samples.assign(n, cd{0.0, 0.0});

  for (const auto& [amp, dist] : amp_and_distance) {
    const double theta = 2.0 * dist / kSpeedOfLight;  // round-trip delay
    const double fb = cfg.slope() * theta;
    const cd base = amp * std::exp(cd{0.0, 2.0 * kPi * cfg.carrier_hz * theta});
    const cd step = std::exp(cd{0.0, 2.0 * kPi * fb / cfg.sample_rate_hz});
    cd rot{1.0, 0.0};
    for (int i = 0; i < n; ++i) {
      out.samples[i] += base * rot;
      rot *= step;
    }
  }
  return out;
}

double array_phase(const ArrayConfig& arr, int index, double aoa_rad,
                   double wavelength_m) {
  if (index < 0 || index >= arr.n_elements)
    throw std::out_of_range("array element index out of range");
  if (wavelength_m <= 0)
    throw std::invalid_argument("wavelength must be positive");
  return 2.0 * kPi * index * arr.spacing_m * std::sin(aoa_rad) / wavelength_m;
}

}  // namespace nlosim
