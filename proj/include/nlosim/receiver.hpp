#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "nlosim/channel.hpp"
#include "nlosim/codes.hpp"
#include "nlosim/fsmusic.hpp"

namespace nlosim {

/// Result of sliding the tag template over a frame.
///  - r_k: per-lag coherent correlation sum(frame(n+k) * conj(u(n))) averaged
///    over antennas, with u the analytic template;
///  - acq_metric: per-lag acquisition statistic, coherent within each chip
///    and magnitude-combined across chips, so alignment survives the
///    range-induced phase rotation that collapses the plain coherent sum;
///  - peak_lag: argmax of acq_metric (coincides with argmax |r_k| for
///    rotation-free inputs);
///  - beat_hint_hz: dominant tone of the aligned on-chip samples, from a
///    beat bank scan coherent per (antenna, hop slot);
///  - aligned: the frame windowed at peak_lag and carrier-demodulated (chip
///    gate NOT applied; despreading happens in align_and_segment), so each
///    sample keeps the per-path beat phase plus the chip gating.
struct CorrelationResult {
  std::vector<cd> r_k;
  std::vector<double> acq_metric;
  int peak_lag = 0;
  double peak_gain_db = 0.0;  // peak over off-peak floor of |r_k|
  double beat_hint_hz = 0.0;
  Eigen::MatrixXcd aligned;       // antennas x total_len
  std::vector<int> live_columns;  // indices of on-chip samples
};

struct Detection {
  double distance_m = 0.0;
  double aoa_rad = 0.0;
  double strength = 0.0;
};

enum class LosVerdict { kLos, kNlos, kIndeterminate };

struct SceneReading {
  std::vector<Detection> reflectors_rlc;
  std::vector<Detection> virtuals_tlc;
  LosVerdict los_verdict = LosVerdict::kIndeterminate;
};

struct ReceiverParams {
  double range_tol_m = 0.3;      // TLC/RLC match tolerance for the verdict
  double angle_tol_rad = deg2rad(2.0);
  double match_angle_tol_rad = deg2rad(1.0);  // virtual-to-reflector pairing
  double peak_median_db = 8.0;   // spectrum peak acceptance threshold
  double gap_ratio = 10.0;
  int max_lag = -1;              // correlation search span; -1 = one code period
  bool dealias_with_periodogram = true;
};

/// Slides the template over the frame. `max_lag` < 0 searches one code
/// period (the template is periodic); otherwise lags [0, max_lag].
CorrelationResult sliding_correlate(const RxFrame& frame, const TlcSequence& g_t,
                                    int max_lag = -1);

/// Splits the aligned window at hop boundaries and despreads every hop into
/// one snapshot using bipolar (+1/-1) chip weights, which cancels static
/// clutter that the code's duty cycle would otherwise pass. Returns
/// segments[antenna][hop_slot] with one snapshot per plan cycle, ready for
/// build_fs_matrix.
std::vector<std::vector<std::vector<cd>>> align_and_segment(
    const CorrelationResult& corr, const TlcSequence& g_t);

/// Reflector map from an unmodulated (RLC) frame: conventional baseline
/// spectrum, model order from the antenna covariance, peaks above the
/// peak-to-median threshold.
std::vector<Detection> detect_reflectors(const RxFrame& frame,
                                         const FmcwConfig& fmcw,
                                         const ArrayConfig& arr,
                                         const SpectrumGrid& grid,
                                         const ReceiverParams& params);

/// Full tag-phase processing: correlate, segment, covariance, model order,
/// spectrum, peaks. Returns detections ordered by strength. `spectrum_out`
/// (optional) receives the evaluated spectrum.
std::vector<Detection> detect_virtuals(const RxFrame& frame,
                                       const TlcSequence& g_t,
                                       const FmcwConfig& fmcw,
                                       const ArrayConfig& arr,
                                       const SpectrumGrid& grid,
                                       const ReceiverParams& params,
                                       Spectrum2D* spectrum_out = nullptr,
                                       bool use_fs = true);

/// Index of the TLC detection taken as the tag itself: the strongest one
/// that is not a leaked reflector echo. A detection with a farther TLC
/// detection on its own bearing is such a leak (the tag return lies beyond
/// the reflector that produced it). Falls back to 0 when every detection is
/// flagged; -1 only for an empty list.
int primary_virtual_index(const std::vector<Detection>& virtuals_tlc,
                          const ReceiverParams& params);

/// LOS iff the primary TLC detection reappears in the passive (RLC) map
/// within the tolerances: a directly seen tag scatters in both phases, so
/// its silent echo sits at the same range and bearing. Demoted to NLOS when
/// an RLC echo sits nearer on the same bearing (the return rode over a
/// reflector). Indeterminate when either list is empty.
LosVerdict classify_los_nlos(const std::vector<Detection>& reflectors_rlc,
                             const std::vector<Detection>& virtuals_tlc,
                             const ReceiverParams& params);

/// Greedy bearing match (ascending angle difference, unique on both sides):
/// virtual i pairs with reflector j when |aoa_i - aoa_j| <= tolerance and
/// distance_i > distance_j. Returns per-virtual reflector index or -1.
std::vector<int> match_virtual_to_reflectors(
    const std::vector<Detection>& virtuals,
    const std::vector<Detection>& reflectors, const ReceiverParams& params);

}  // namespace nlosim
