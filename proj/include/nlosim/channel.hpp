#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlosim/codes.hpp"
#include "nlosim/scene.hpp"
#include "nlosim/waveform.hpp"

namespace nlosim {

enum class TagMode { kTlc, kRlc };

/// Per-target tag state for one simulated frame. `start_offset_samples`
/// models the free-running tag clock: the tag waveform is evaluated at
/// (frame sample + offset), so the receiver has to recover code timing.
struct TagState {
  TagMode mode = TagMode::kTlc;
  const TlcSequence* waveform = nullptr;  // required in TLC
  int start_offset_samples = 0;
  double body_scatter = 0.5;  // unmodulated skin return strength (direct path)
};

/// Received dechirped frame, one row per virtual array element.
struct RxFrame {
  int n_antennas = 0;
  int n_samples = 0;
  std::vector<cd> data;  // row-major [antenna][sample]

  cd& at(int antenna, int sample) { return data[antenna * n_samples + sample]; }
  const cd& at(int antenna, int sample) const {
    return data[antenna * n_samples + sample];
  }
};

/// Additive complex white noise level. `snr_db` is referenced to the power
/// of the strongest tag-path component while active (its squared path
/// attenuation); +infinity means noiseless.
struct NoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  /// When set, overrides the derived noise standard deviation (used by
  /// sweeps that pin the noise floor across scene variants).
  std::optional<double> sigma_override;
};

/// Dechirped frame for one tag phase:
///  - every first-order path contributes an unmodulated reflector return at
///    round trip 2*d_rs, amplitude scatter/d_rs^2, bearing aoa_phi;
///  - in TLC each path additionally carries the tag return at round trip
///    2*d_total, amplitude PathGeometry::attenuation, multiplied sample-wise
///    by the tag waveform delayed by the outbound propagation;
///  - targets with an unobstructed direct path add a body-scatter return
///    (both phases) and, in TLC, the direct tag return.
/// The beat tone of each component runs phase-continuously over the frame.
/// Components accumulate in deterministic order (targets outer, reflectors
/// inner), so superposition is exact in floating point.
RxFrame simulate_frame(const Scene& scene,
                       const std::map<std::string, TagState>& tags,
                       const FmcwConfig& fmcw, const ArrayConfig& arr,
                       TagMode phase);

/// Composition of the noiseless frame with seeded noise; the SNR reference
/// is the scene's strongest tag-path amplitude.
RxFrame simulate_frame(const Scene& scene,
                       const std::map<std::string, TagState>& tags,
                       const FmcwConfig& fmcw, const ArrayConfig& arr,
                       const NoiseSpec& noise, TagMode phase);

/// Strongest tag-path amplitude of the scene (used as the SNR reference;
/// includes the direct path when unobstructed). Returns 0 for scenes with
/// no tag paths.
double strongest_tag_amplitude(const Scene& scene);

/// Adds seeded complex white Gaussian noise at the level implied by `spec`
/// and `reference_amplitude`. Infinite SNR returns the frame unchanged.
RxFrame add_noise(const RxFrame& frame, const NoiseSpec& spec,
                  double reference_amplitude);

/// Static-background cancellation: the silent-phase capture measures the
/// scene's unmodulated returns, so subtracting it from the active capture
/// leaves only tag-modulated components (plus both captures' noise). Frames
/// must have equal shape.
RxFrame subtract_background(const RxFrame& active, const RxFrame& background);

/// Debug serialization: one CSV row per sample, columns
/// antenna,sample,re,im.
std::string frame_to_csv(const RxFrame& frame);

}  // namespace nlosim
