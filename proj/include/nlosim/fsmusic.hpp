#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nlosim/codes.hpp"
#include "nlosim/waveform.hpp"

namespace nlosim {

/// Hop-segmented snapshot matrix. Row (m, f) = antenna m, hop segment f,
/// antenna-major (row index m*n_f + f); columns are within-segment samples,
/// repetitions concatenated.
struct FsSnapshotMatrix {
  Eigen::MatrixXcd m;
  int n_a = 0;
  int n_f = 0;
  int n_h = 0;  // columns

  void validate() const;
};

struct CovarianceEstimate {
  Eigen::MatrixXcd r;               // Hermitian, n_rows x n_rows
  Eigen::VectorXd eigenvalues;      // descending, clamped >= 0
  Eigen::MatrixXcd eigenvectors;    // columns, matching order
};

/// Sampled 2-D pseudo-spectrum over (distance, bearing).
struct SpectrumGrid {
  double d_min_m = 0.5, d_max_m = 10.0, d_step_m = 0.01;
  double eta_min_rad = -kPi / 3, eta_max_rad = kPi / 3;
  double eta_step_rad = deg2rad(0.25);

  int n_d() const;
  int n_eta() const;
  double d_at(int i) const { return d_min_m + i * d_step_m; }
  double eta_at(int j) const { return eta_min_rad + j * eta_step_rad; }
  void validate() const;
};

struct Spectrum2D {
  SpectrumGrid grid;
  Eigen::MatrixXd values;  // n_eta rows x n_d cols, >= 0, finite
};

struct Peak {
  double d_m = 0.0;
  double eta_rad = 0.0;
  double strength = 0.0;  // signal-subspace eigenvalue matched by rank
  double value = 0.0;     // spectrum height at the peak
};

struct PeakSet {
  std::vector<Peak> peaks;
  bool shortfall = false;  // fewer local maxima existed than requested
};

/// Stacks per-antenna hop segments into the (n_a*n_f) x n_h matrix with row
/// order (a0,f0), (a0,f1), ..., (a1,f0), ...
/// `segments[a][f]` must all share one length.
FsSnapshotMatrix build_fs_matrix(
    const std::vector<std::vector<std::vector<cd>>>& segments);

/// Sample covariance (1/n_h) * M * M^H, symmetrized, eigenpairs sorted
/// descending with negatives clamped to zero.
CovarianceEstimate estimate_covariance(const FsSnapshotMatrix& m);

/// Largest model order i (1-based, capped at floor(2*n_rows/3)) whose
/// eigenvalue ratio ev[i-1]/ev[i] reaches `gap_ratio`. When `max_snapshots`
/// (> 0) eigenvalues exhaust the estimate's rank, the weakest retained ones
/// form the noise band: the drop past them is ignored, candidates must clear
/// the band's median by `gap_ratio`, and a ladder with no clean gap falls
/// back to the count standing clear of the band. 0 when nothing does.
int estimate_num_paths(const Eigen::VectorXd& eigenvalues,
                       double gap_ratio = 10.0, int max_snapshots = 0);

/// Steering vector over rows (m, f): the range phase is the beat tone of a
/// path at distance d sampled at each hop-segment start (plus the hop
/// carrier's round-trip term), the bearing phase the standard array term.
Eigen::VectorXcd steering_vector(double d_m, double eta_rad,
                                 const FmcwConfig& fmcw, const ArrayConfig& arr,
                                 const HopPlan& plan, int n_f);

/// Subspace pseudo-spectrum P(d, eta) = 1 / (a^H U_n U_n^H a) evaluated on
/// the grid. i_paths must be in [1, n_rows).
Spectrum2D music_spectrum(const CovarianceEstimate& cov, int i_paths,
                          const FmcwConfig& fmcw, const ArrayConfig& arr,
                          const HopPlan& plan, const SpectrumGrid& grid);

/// Single-segment baseline: bearing from the antenna-only subspace
/// spectrum, range from the matched periodogram of the signal beamformed at
/// each detected bearing. `aligned` is antennas x samples at the waveform
/// sample rate; dead (zeroed) columns are allowed.
Spectrum2D conventional_music(const Eigen::MatrixXcd& aligned, int i_paths,
                              const FmcwConfig& fmcw, const ArrayConfig& arr,
                              const SpectrumGrid& grid);

/// Conventional baseline on despread per-cycle snapshots: the antenna-only
/// covariance pools every hop slot, so bearings keep the plain-array
/// resolution and rank cap, and each bearing's range comes from the
/// cycle-rate beat rotation summed incoherently over hop slots. The beat is
/// observed at the cycle rate, so ranges fold at
/// c * sample_rate / (2 * slope * cycle_samples); a single fixed-carrier
/// cycle keeps the whole grid unambiguous while hopped or slow-toggle
/// cycles alias, which is the cost of processing those waveforms without
/// the stacked-snapshot model.
/// `peaks_out`, when given, receives up to two refined range peaks per
/// detected bearing (a silent echo and a tag return can share one), with
/// composed spectrum heights as values, strongest first.
Spectrum2D conventional_music(
    const std::vector<std::vector<std::vector<cd>>>& segments,
    const HopPlan& plan, int i_paths, const FmcwConfig& fmcw,
    const ArrayConfig& arr, const SpectrumGrid& grid,
    PeakSet* peaks_out = nullptr);

/// Strict-8-neighbor local maxima, sorted by height (ties: lower d, then
/// lower eta), top i_paths returned. Peak coordinates are refined to
/// sub-cell accuracy by a parabolic fit through the reciprocal spectrum.
/// `signal_eigenvalues` (descending) are matched to peaks by rank as
/// strengths; pass empty to use peak heights.
PeakSet pick_peaks(const Spectrum2D& spec, int i_paths,
                   const std::vector<double>& signal_eigenvalues = {});

/// One detection per bearing for composed bearing x range spectra: interior
/// maxima of the per-bearing ridge height, strongest `max_count` kept, each
/// placed at its bearing's range argmax (sub-cell refined). Sidelobe leakage
/// from a strong return shows up as a secondary range peak at the same
/// bearing, which this extraction never reports.
PeakSet pick_bearing_peaks(const Spectrum2D& spec, int max_count);

/// CSV rows "d_m,eta_deg,value" (one per grid cell), header included.
std::string spectrum_to_csv(const Spectrum2D& spec);

}  // namespace nlosim
