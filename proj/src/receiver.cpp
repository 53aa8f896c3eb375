#include "nlosim/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlosim {
namespace {

struct ChipSpan {
  int start;  // window sample of the first chip sample
  int len;    // samples in this chip run (<= samples_per_chip)
};

/// Contiguous on-chip runs of the template, chip-granular. Beat rotation
/// within one chip is small by construction, so chip sums stay coherent.
std::vector<ChipSpan> active_chip_spans(const TlcSequence& g_t) {
  std::vector<ChipSpan> spans;
  const int spc = g_t.samples_per_chip;
  for (int n = 0; n < g_t.total_len; n += spc)
    if (g_t.chip_at(n) == 1) spans.push_back({n, spc});
  return spans;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  return v[mid];
}

/// Beat-bank scan over the despread aligned window, coherent per
/// (antenna, hop slot) and noncoherent across slots; the phase left by the
/// hop carrier is constant within a slot so each slot sum stays matched.
/// Despreading with bipolar chip weights keeps static clutter out of the
/// scan. Used only as a range de-alias hint.
double dominant_beat_hz(const Eigen::MatrixXcd& aligned, const TlcSequence& g_t,
                        double f_max, double step_hz) {
  const int n_h = g_t.plan.hop_period_samples;
  const int n_f = g_t.plan.n_hops();
  const int cycle = n_f * n_h;
  const double fs = g_t.plan.sample_rate_hz;
  std::vector<double> w(static_cast<std::size_t>(n_h));
  for (int q = 0; q < n_h; ++q) w[q] = g_t.chip_at(q) == 1 ? 1.0 : -1.0;
  double best_f = 0.0, best_p = -1.0;
  std::vector<cd> slot_acc(static_cast<std::size_t>(n_f));
  for (double f = 0.0; f <= f_max; f += step_hz) {
    const double dph = -2.0 * kPi * f / fs;
    double power = 0.0;
    for (Eigen::Index a = 0; a < aligned.rows(); ++a) {
      std::fill(slot_acc.begin(), slot_acc.end(), cd(0.0, 0.0));
      for (int n = 0; n < g_t.total_len; ++n)
        slot_acc[(n % cycle) / n_h] +=
            w[n % n_h] * aligned(a, n) * cd(std::cos(dph * n), std::sin(dph * n));
      for (const cd& s : slot_acc) power += std::norm(s);
    }
    if (power > best_p) {
      best_p = power;
      best_f = f;
    }
  }
  return best_f;
}

int model_order_from_rows(const Eigen::MatrixXcd& rows, double gap_ratio) {
  Eigen::MatrixXcd rxx =
      (rows * rows.adjoint()) / static_cast<double>(rows.cols());
  rxx = ((rxx + rxx.adjoint()) * 0.5).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rxx);
  Eigen::VectorXd ev(rxx.rows());
  for (Eigen::Index i = 0; i < rxx.rows(); ++i)
    ev[i] = std::max(0.0, eig.eigenvalues()[rxx.rows() - 1 - i]);
  return estimate_num_paths(ev, gap_ratio, static_cast<int>(rows.cols()));
}

std::vector<Detection> threshold_peaks(const PeakSet& picked,
                                       const Spectrum2D& spec,
                                       double peak_median_db) {
  std::vector<double> all(spec.values.data(),
                          spec.values.data() + spec.values.size());
  const double med = median_of(std::move(all));
  const double gate = med * std::pow(10.0, peak_median_db / 10.0);
  std::vector<Detection> out;
  for (const Peak& p : picked.peaks) {
    if (p.value < gate) continue;
    out.push_back({p.d_m, p.eta_rad, p.strength});
  }
  return out;
}

}  // namespace

CorrelationResult sliding_correlate(const RxFrame& frame, const TlcSequence& g_t,
                                    int max_lag) {
  if (frame.n_antennas < 1 || frame.n_samples < 1)
    throw std::invalid_argument("empty frame");
  const int w = g_t.total_len;
  const int cycle = g_t.plan.n_hops() * g_t.plan.hop_period_samples;
  const int n_lags = max_lag < 0 ? cycle : max_lag + 1;
  if (n_lags < 1) throw std::invalid_argument("bad lag count");
  if (frame.n_samples < w + n_lags - 1)
    throw std::invalid_argument("frame too short for the requested search");

  std::vector<cd> tmpl(w);
  std::vector<int> live;
  for (int n = 0; n < w; ++n) {
    tmpl[n] = g_t.analytic_at(n, 0.0);
    if (g_t.chip_at(n) == 1) live.push_back(n);
  }
  const auto spans = active_chip_spans(g_t);

  CorrelationResult res;
  res.r_k.assign(n_lags, cd(0.0, 0.0));
  res.acq_metric.assign(n_lags, 0.0);
  for (int k = 0; k < n_lags; ++k) {
    cd coh(0.0, 0.0);
    double acq = 0.0;
    for (int a = 0; a < frame.n_antennas; ++a) {
      cd coh_a(0.0, 0.0);
      for (const ChipSpan& s : spans) {
        cd chip_sum(0.0, 0.0);
        for (int i = 0; i < s.len; ++i) {
          const int n = s.start + i;
          chip_sum += frame.at(a, n + k) * std::conj(tmpl[n]);
        }
        coh_a += chip_sum;
        acq += std::norm(chip_sum);
      }
      coh += coh_a;
    }
    res.r_k[k] = coh / static_cast<double>(frame.n_antennas);
    res.acq_metric[k] = acq;
  }

  res.peak_lag = static_cast<int>(
      std::max_element(res.acq_metric.begin(), res.acq_metric.end()) -
      res.acq_metric.begin());

  // The chip-level metric is blind to which hop is which: a lag error of a
  // whole hop period keeps every chip gate aligned, and the carrier mismatch
  // rotates too little within one chip to register. Nor can per-slot energy
  // settle it, since a wrong carrier can alias a return's beat toward zero
  // and look more coherent than the truth. What only the correct alignment
  // has is agreement: every slot then demodulates to the same residual beat.
  // Score each cyclic candidate by the peak of the slot-summed periodogram.
  if (g_t.plan.n_hops() > 1) {
    const int n_f = g_t.plan.n_hops();
    const int n_h = g_t.plan.hop_period_samples;
    const double fs = g_t.plan.sample_rate_hz;
    const int cycles_used = std::min(g_t.repetitions, 8);
    const int ants_used = std::min(frame.n_antennas, 2);
    const double f_half = 0.25 * fs / g_t.samples_per_chip;
    const int half_bins = 125;
    const double f_step = f_half / half_bins;

    std::vector<std::vector<int>> on(static_cast<std::size_t>(n_f));
    for (int f = 0; f < n_f; ++f)
      for (int q = 0; q < n_h; ++q)
        if (g_t.chip_at(f * n_h + q) == 1) on[f].push_back(q);

    double best = -1.0;
    int best_lag = res.peak_lag;
    for (int j = 0; j < n_f; ++j) {
      const int k = (res.peak_lag + j * n_h) % cycle;
      if (k >= n_lags) continue;
      std::vector<double> pool(2 * half_bins + 1, 0.0);
      for (int b = -half_bins; b <= half_bins; ++b) {
        const double th = 2.0 * kPi * (b * f_step) / fs;
        const cd step(std::cos(th), -std::sin(th));
        double tot = 0.0;
        for (int a = 0; a < ants_used; ++a)
          for (int p = 0; p < cycles_used; ++p)
            for (int f = 0; f < n_f; ++f) {
              cd acc(0.0, 0.0);
              cd rot(1.0, 0.0);
              int prev = 0;
              for (int q : on[f]) {
                for (; prev < q; ++prev) rot *= step;
                const int n = p * cycle + f * n_h + q;
                acc += frame.at(a, n + k) * std::conj(tmpl[n]) * rot;
              }
              tot += std::norm(acc);
            }
        pool[b + half_bins] = tot;
      }
      const double score = *std::max_element(pool.begin(), pool.end());
      if (score > best) {
        best = score;
        best_lag = k;
      }
    }
    res.peak_lag = best_lag;
  }

  {
    const double peak = std::abs(res.r_k[res.peak_lag]);
    std::vector<double> off;
    const int guard = std::max(1, g_t.samples_per_chip);
    for (int k = 0; k < n_lags; ++k)
      if (std::abs(k - res.peak_lag) > guard) off.push_back(std::abs(res.r_k[k]));
    const double floor_amp = median_of(std::move(off));
    if (peak <= 0.0)
      res.peak_gain_db = 0.0;
    else if (floor_amp <= peak * 1e-9)
      res.peak_gain_db = 180.0;
    else
      res.peak_gain_db = 20.0 * std::log10(peak / floor_amp);
  }

  // Carrier-only demodulation: the chip gate is applied later as a bipolar
  // despreading weight so static clutter cancels instead of leaking through
  // the code's duty cycle.
  res.aligned.resize(frame.n_antennas, w);
  for (int a = 0; a < frame.n_antennas; ++a)
    for (int n = 0; n < w; ++n)
      res.aligned(a, n) =
          frame.at(a, n + res.peak_lag) * std::conj(g_t.carrier_at(n));
  res.live_columns = std::move(live);

  const double fs = g_t.plan.sample_rate_hz;
  const double f_max = 0.25 * fs / g_t.samples_per_chip;
  const double step = fs / (2.0 * w);
  res.beat_hint_hz = dominant_beat_hz(res.aligned, g_t, f_max, step);
  return res;
}

std::vector<std::vector<std::vector<cd>>> align_and_segment(
    const CorrelationResult& corr, const TlcSequence& g_t) {
  const int n_a = static_cast<int>(corr.aligned.rows());
  if (n_a < 1 || corr.aligned.cols() != g_t.total_len)
    throw std::invalid_argument("aligned window does not match the template");
  const int n_f = g_t.plan.n_hops();
  const int n_h = g_t.plan.hop_period_samples;
  const int cycle = n_f * n_h;
  const int reps = g_t.repetitions;

  // Despread each hop into one snapshot with bipolar chip weights. On-chips
  // add the tag return coherently; the +/-1 balance cancels anything static
  // over the hop, and what clutter survives collapses to a single rank with
  // an off-manifold signature instead of mimicking a return.
  std::vector<double> w(static_cast<std::size_t>(n_h));
  for (int q = 0; q < n_h; ++q) w[q] = g_t.chip_at(q) == 1 ? 1.0 : -1.0;

  std::vector<std::vector<std::vector<cd>>> segments(
      n_a, std::vector<std::vector<cd>>(n_f, std::vector<cd>(reps)));
  for (int a = 0; a < n_a; ++a)
    for (int f = 0; f < n_f; ++f)
      for (int p = 0; p < reps; ++p) {
        cd acc(0.0, 0.0);
        for (int q = 0; q < n_h; ++q)
          acc += w[q] * corr.aligned(a, p * cycle + f * n_h + q);
        segments[a][f][p] = acc;
      }
  return segments;
}

std::vector<Detection> detect_reflectors(const RxFrame& frame,
                                         const FmcwConfig& fmcw,
                                         const ArrayConfig& arr,
                                         const SpectrumGrid& grid,
                                         const ReceiverParams& params) {
  const int n_s = std::min(frame.n_samples, 4096);
  Eigen::MatrixXcd rows(frame.n_antennas, n_s);
  for (int a = 0; a < frame.n_antennas; ++a)
    for (int n = 0; n < n_s; ++n) rows(a, n) = frame.at(a, n);

  const int order = model_order_from_rows(rows, params.gap_ratio);
  if (order == 0) return {};
  const Spectrum2D spec = conventional_music(rows, order, fmcw, arr, grid);
  const PeakSet picked = pick_bearing_peaks(spec, order);
  return threshold_peaks(picked, spec, params.peak_median_db);
}

std::vector<Detection> detect_virtuals(const RxFrame& frame,
                                       const TlcSequence& g_t,
                                       const FmcwConfig& fmcw,
                                       const ArrayConfig& arr,
                                       const SpectrumGrid& grid,
                                       const ReceiverParams& params,
                                       Spectrum2D* spectrum_out, bool use_fs) {
  const CorrelationResult corr = sliding_correlate(frame, g_t, params.max_lag);

  if (!use_fs) {
    // The baseline still despreads (any receiver that knows the template
    // would); it differs from the stacked estimator in pooling all hop
    // slots into one antenna-only covariance.
    const auto segments = align_and_segment(corr, g_t);
    const int n_a = static_cast<int>(segments.size());
    const int n_f = static_cast<int>(segments[0].size());
    const int k_cycles = static_cast<int>(segments[0][0].size());
    FsSnapshotMatrix ant;
    ant.n_a = n_a;
    ant.n_f = 1;
    ant.n_h = n_f * k_cycles;
    ant.m.resize(n_a, ant.n_h);
    for (int a = 0; a < n_a; ++a)
      for (int f = 0; f < n_f; ++f)
        for (int k = 0; k < k_cycles; ++k)
          ant.m(a, f * k_cycles + k) = segments[a][f][k];
    const CovarianceEstimate cov = estimate_covariance(ant);
    const int order =
        estimate_num_paths(cov.eigenvalues, params.gap_ratio, ant.n_h);
    PeakSet picked;
    const Spectrum2D spec = conventional_music(
        segments, g_t.plan, std::max(order, 1), fmcw, arr, grid, &picked);
    if (spectrum_out != nullptr) *spectrum_out = spec;
    if (order == 0) return {};
    return threshold_peaks(picked, spec, params.peak_median_db);
  }

  const auto segments = align_and_segment(corr, g_t);
  const FsSnapshotMatrix fs_m = build_fs_matrix(segments);
  const CovarianceEstimate cov = estimate_covariance(fs_m);
  const int order = estimate_num_paths(cov.eigenvalues, params.gap_ratio,
                                       static_cast<int>(fs_m.m.cols()));
  if (order == 0) {
    if (spectrum_out != nullptr)
      *spectrum_out = music_spectrum(cov, 1, fmcw, arr, g_t.plan, grid);
    return {};
  }

  const Spectrum2D spec = music_spectrum(cov, order, fmcw, arr, g_t.plan, grid);
  if (spectrum_out != nullptr) *spectrum_out = spec;
  std::vector<double> strengths(cov.eigenvalues.data(),
                                cov.eigenvalues.data() + order);
  PeakSet picked = pick_peaks(spec, order, strengths);

  // Range phases repeat with the hop-period ambiguity; when an in-grid alias
  // of a picked range explains the measured beat better, snap to it.
  if (params.dealias_with_periodogram) {
    const double fs = g_t.plan.sample_rate_hz;
    const double amb_m =
        kSpeedOfLight /
        (2.0 * fmcw.slope() * g_t.plan.hop_period_samples / fs);
    const double res_hz = 2.0 * fs / (2.0 * g_t.total_len);
    for (Peak& p : picked.peaks) {
      double best_d = p.d_m;
      double best_err = std::abs(beat_frequency(fmcw, p.d_m) - corr.beat_hint_hz);
      for (int m = -3; m <= 3; ++m) {
        const double d = p.d_m + m * amb_m;
        if (m == 0 || d < spec.grid.d_min_m || d > spec.grid.d_max_m) continue;
        const double err = std::abs(beat_frequency(fmcw, d) - corr.beat_hint_hz);
        if (err + res_hz < best_err) {
          best_err = err;
          best_d = d;
        }
      }
      p.d_m = best_d;
    }
  }

  // Eigenvalues paired to peaks by rank misorder nearby components under
  // noise; measure each peak's power against the covariance instead.
  for (Peak& p : picked.peaks) {
    const Eigen::VectorXcd a = steering_vector(p.d_m, p.eta_rad, fmcw, arr,
                                               g_t.plan, g_t.plan.n_hops());
    p.strength = (a.adjoint() * (cov.r * a)).value().real() /
                 static_cast<double>(a.size());
  }
  std::stable_sort(
      picked.peaks.begin(), picked.peaks.end(),
      [](const Peak& x, const Peak& y) { return x.strength > y.strength; });
  return threshold_peaks(picked, spec, params.peak_median_db);
}

int primary_virtual_index(const std::vector<Detection>& virtuals_tlc,
                          const ReceiverParams& params) {
  const int n = static_cast<int>(virtuals_tlc.size());
  if (n == 0) return -1;
  for (int i = 0; i < n; ++i) {
    const Detection& u = virtuals_tlc[i];
    bool leak = false;
    // A farther TLC detection on u's own bearing unmasks u as a reflector
    // echo that leaked through the code; the tag return lies beyond it.
    for (const Detection& w : virtuals_tlc)
      if (&w != &u &&
          std::abs(wrap_angle(w.aoa_rad - u.aoa_rad)) <= params.angle_tol_rad &&
          w.distance_m > u.distance_m + params.range_tol_m) {
        leak = true;
        break;
      }
    if (!leak) return i;
  }
  return 0;
}

LosVerdict classify_los_nlos(const std::vector<Detection>& reflectors_rlc,
                             const std::vector<Detection>& virtuals_tlc,
                             const ReceiverParams& params) {
  if (reflectors_rlc.empty() || virtuals_tlc.empty())
    return LosVerdict::kIndeterminate;
  const Detection& v =
      virtuals_tlc[primary_virtual_index(virtuals_tlc, params)];
  // A directly seen tag also scatters passively, so the silent map holds an
  // echo at the tag's own range and bearing; a mirrored (NLoS) tag does not.
  bool coincides = false;
  for (const Detection& r : reflectors_rlc) {
    const double da = std::abs(wrap_angle(v.aoa_rad - r.aoa_rad));
    if (da > params.angle_tol_rad) continue;
    if (std::abs(v.distance_m - r.distance_m) <= params.range_tol_m)
      coincides = true;
    // An echo short of v on its bearing is a reflector the return rode over.
    if (r.distance_m < v.distance_m - params.range_tol_m)
      return LosVerdict::kNlos;
  }
  return coincides ? LosVerdict::kLos : LosVerdict::kNlos;
}

std::vector<int> match_virtual_to_reflectors(
    const std::vector<Detection>& virtuals,
    const std::vector<Detection>& reflectors, const ReceiverParams& params) {
  struct Cand {
    double da;
    int vi, rj;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < virtuals.size(); ++i)
    for (std::size_t j = 0; j < reflectors.size(); ++j) {
      const double da =
          std::abs(wrap_angle(virtuals[i].aoa_rad - reflectors[j].aoa_rad));
      if (da <= params.match_angle_tol_rad &&
          virtuals[i].distance_m > reflectors[j].distance_m + params.range_tol_m)
        cands.push_back({da, static_cast<int>(i), static_cast<int>(j)});
    }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.da != b.da) return a.da < b.da;
    if (a.vi != b.vi) return a.vi < b.vi;
    return a.rj < b.rj;
  });

  // A reflector detection is a resolution cell, not a wall point: two walls
  // inside one cell produce one echo that legitimately serves both returns,
  // so reflectors are not consumed by a match.
  std::vector<int> match(virtuals.size(), -1);
  for (const Cand& c : cands) {
    if (match[c.vi] != -1) continue;
    match[c.vi] = c.rj;
  }
  return match;
}

}  // namespace nlosim
