#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "nlosim/common.hpp"

namespace nlosim {

/// Binary spreading code, chips in {0,1}. Codes of length 2^n - 1 are drawn
/// from a fixed low-cross-correlation family (Gold for odd n, small Kasami
/// for even n); `family_seed` selects the member deterministically.
struct DsssCode {
  std::vector<int> chips;
  std::uint64_t family_seed = 0;

  int length() const { return static_cast<int>(chips.size()); }
  int weight() const;
};

/// Pseudorandom frequency-hopping schedule over a fixed channel set.
struct HopPlan {
  std::vector<double> channels_hz;   // distinct, ascending
  std::vector<int> index_seq;        // channel index per hop slot
  int hop_period_samples = 0;        // samples per hop at `sample_rate_hz`
  double sample_rate_hz = 0.0;
  std::uint64_t seed = 0;

  int n_channels() const { return static_cast<int>(channels_hz.size()); }
  int n_hops() const { return static_cast<int>(index_seq.size()); }
  double channel_of_hop(int hop) const { return channels_hz[index_seq[hop]]; }
};

/// Sampled tag control waveform: chips gate an on-off carrier that follows
/// the hop plan, sample n = chip(n) * cos(2*pi*f_hop(n) * t_hop(n)) where
/// t_hop is time since the current hop boundary. Carrier phase restarts at
/// each hop so any receiver aligned to a cycle boundary sees identical
/// phases regardless of which cycle it locked onto. One full code period
/// spans exactly one hop.
struct TlcSequence {
  std::vector<double> samples;
  int total_len = 0;  // repetitions * n_hops_per_cycle * hop_period_samples
  DsssCode code;
  HopPlan plan;
  int samples_per_chip = 0;
  int repetitions = 0;  // full plan cycles

  /// Chip value in {0,1} at window sample n (cyclic in the code period).
  int chip_at(int n) const;
  /// Hop channel frequency at window sample n.
  double channel_at(int n) const;
  /// Unit carrier phasor exp(j*2*pi*f_hop*t_hop) at window sample n,
  /// ignoring the chip gate; nonzero everywhere.
  cd carrier_at(int n) const;
  /// Analytic (complex) sample chip * exp(j*2*pi*f_hop*t_hop) evaluated at
  /// local time n/fs - delay_s; the real part reproduces `samples` at
  /// delay 0 up to chip gating. Zero where the chip is 0.
  cd analytic_at(int n, double delay_s) const;
};

enum class BaselineKind { kDsssOnly, kFsk };

/// Alternating tag operating phases; durations in seconds.
struct HfdSchedule {
  double tlc_duration_s = 0.0;
  double rlc_duration_s = 0.0;

  double duty_tlc() const { return tlc_duration_s / (tlc_duration_s + rlc_duration_s); }
  void validate() const;
};

struct PowerProfile {
  double avg_tlc_mw = 0.0;      // occupancy-weighted mean over hop channels
  double avg_overall_uw = 0.0;  // avg_tlc * duty, in microwatts
  double lifetime_years = 0.0;
};

/// Deterministic family member of length 2^n - 1 (n >= 3).
/// Throws std::invalid_argument for unsupported lengths.
DsssCode generate_dsss_code(std::uint64_t family_seed, int length);

/// Seeded pseudorandom hop index sequence over `channels_hz`.
/// Requires hop_period_samples > 0 and divisible by the code length used
/// with it (checked again in build_tlc_waveform).
HopPlan generate_hop_plan(const std::vector<double>& channels_hz, int n_hops,
                          int hop_period_samples, double sample_rate_hz,
                          std::uint64_t seed);

/// Samples `repetitions` full plan cycles of the chip-gated hopping carrier.
/// Requires plan.hop_period_samples divisible by code.length().
TlcSequence build_tlc_waveform(const DsssCode& code, const HopPlan& plan,
                               double sample_rate_hz, int repetitions);

/// Reference tag waveforms: DSSS-only (the code on one fixed carrier) and
/// FSK (a plain square on-off toggle at toggle_hz, no code).
TlcSequence build_baseline_waveform(BaselineKind kind, const DsssCode& code,
                                    double carrier_hz, double toggle_hz,
                                    double sample_rate_hz, int hop_period_samples,
                                    int repetitions);

/// Cyclic correlation of two +/-1-mapped chip sequences over all lags.
std::vector<double> correlation_profile(const DsssCode& a, const DsssCode& b);

/// Power/lifetime summary. `per_freq_mw` maps hop channel (Hz) to the tag's
/// measured TLC power draw at that channel; occupancy comes from the plan.
PowerProfile power_model(const HopPlan& plan,
                         const std::map<double, double>& per_freq_mw,
                         const HfdSchedule& schedule, double battery_mwh);

}  // namespace nlosim
