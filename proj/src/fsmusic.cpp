#include "nlosim/fsmusic.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace nlosim {
namespace {

Eigen::VectorXcd unit_phasor(const Eigen::VectorXd& phase) {
  Eigen::VectorXcd out(phase.size());
  for (Eigen::Index i = 0; i < phase.size(); ++i)
    out[i] = cd(std::cos(phase[i]), std::sin(phase[i]));
  return out;
}

/// Range phase of steering row f for a path at one-way distance d: the beat
/// tone at the segment start plus the hop carrier retiming term (the
/// one-sample code lock offset minus the outbound delay).
double range_phase(double d_m, int f, const FmcwConfig& fmcw,
                   const HopPlan& plan) {
  const double fs = plan.sample_rate_hz;
  const double t_start = f * plan.hop_period_samples / fs;
  const double f_beat = beat_frequency(fmcw, d_m);
  const double f_ch = plan.channel_of_hop(f);
  return 2.0 * kPi *
         (f_beat * t_start + f_ch * (1.0 / fs - d_m / kSpeedOfLight));
}

/// Sub-cell vertex of the parabola through the reciprocal spectrum (the
/// subspace denominator is smooth near a minimum; the peak itself is not).
double refine_reciprocal(double vm, double v0, double vp) {
  if (vm <= 0 || v0 <= 0 || vp <= 0) return 0.0;
  const double qm = 1.0 / vm, q0 = 1.0 / v0, qp = 1.0 / vp;
  const double den = qm - 2.0 * q0 + qp;
  if (den <= 0) return 0.0;
  return std::clamp(0.5 * (qm - qp) / den, -0.5, 0.5);
}

}  // namespace

void FsSnapshotMatrix::validate() const {
  if (n_a < 1 || n_f < 1 || n_h < 1)
    throw std::invalid_argument("snapshot matrix dimensions must be positive");
  if (m.rows() != static_cast<Eigen::Index>(n_a) * n_f || m.cols() != n_h)
    throw std::invalid_argument("snapshot matrix shape mismatch");
  if (!m.allFinite())
    throw std::invalid_argument("snapshot matrix must be finite");
}

int SpectrumGrid::n_d() const {
  return static_cast<int>(std::floor((d_max_m - d_min_m) / d_step_m + 1e-9)) + 1;
}

int SpectrumGrid::n_eta() const {
  return static_cast<int>(
             std::floor((eta_max_rad - eta_min_rad) / eta_step_rad + 1e-9)) +
         1;
}

void SpectrumGrid::validate() const {
  if (d_min_m <= 0 || d_max_m <= d_min_m || d_step_m <= 0)
    throw std::invalid_argument("bad distance grid");
  if (eta_max_rad <= eta_min_rad || eta_step_rad <= 0)
    throw std::invalid_argument("bad bearing grid");
}

FsSnapshotMatrix build_fs_matrix(
    const std::vector<std::vector<std::vector<cd>>>& segments) {
  if (segments.empty() || segments[0].empty() || segments[0][0].empty())
    throw std::invalid_argument("empty segment set");
  const int n_a = static_cast<int>(segments.size());
  const int n_f = static_cast<int>(segments[0].size());
  const int n_h = static_cast<int>(segments[0][0].size());
  FsSnapshotMatrix out;
  out.n_a = n_a;
  out.n_f = n_f;
  out.n_h = n_h;
  out.m.resize(static_cast<Eigen::Index>(n_a) * n_f, n_h);
  for (int a = 0; a < n_a; ++a) {
    if (static_cast<int>(segments[a].size()) != n_f)
      throw std::invalid_argument("ragged segment set");
    for (int f = 0; f < n_f; ++f) {
      const auto& seg = segments[a][f];
      if (static_cast<int>(seg.size()) != n_h)
        throw std::invalid_argument("segments must share one length");
      for (int q = 0; q < n_h; ++q) out.m(a * n_f + f, q) = seg[q];
    }
  }
  out.validate();
  return out;
}

CovarianceEstimate estimate_covariance(const FsSnapshotMatrix& m) {
  m.validate();
  CovarianceEstimate est;
  est.r = (m.m * m.m.adjoint()) / static_cast<double>(m.n_h);
  est.r = ((est.r + est.r.adjoint()) * 0.5).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(est.r);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  const Eigen::Index n = est.r.rows();
  est.eigenvalues.resize(n);
  est.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    est.eigenvalues[i] = std::max(0.0, eig.eigenvalues()[n - 1 - i]);
    est.eigenvectors.col(i) = eig.eigenvectors().col(n - 1 - i);
  }
  return est;
}

int estimate_num_paths(const Eigen::VectorXd& eigenvalues, double gap_ratio,
                       int max_snapshots) {
  const int n = static_cast<int>(eigenvalues.size());
  if (n < 2) return 0;
  if (gap_ratio <= 1.0) throw std::invalid_argument("gap ratio must exceed 1");
  const double floor_ev = eigenvalues[0] * 1e-9;
  int rank = 0;
  while (rank < n && eigenvalues[rank] > floor_ev) ++rank;
  if (rank == 0) return 0;

  // With fewer snapshots than rows the estimate holds at most max_snapshots
  // nonzero eigenvalues. Once that budget is full, the weakest retained ones
  // are the noise band and the drop past them is a rank artifact: never
  // report it, and require candidates to clear the band's median.
  const int budget = max_snapshots > 0 ? std::min(n, max_snapshots) : n;
  double signal_gate = 0.0;
  int cap = std::min(n - 1, (2 * n) / 3);
  if (rank >= budget) {
    std::vector<double> band(eigenvalues.data() + rank / 2,
                             eigenvalues.data() + rank);
    std::nth_element(band.begin(), band.begin() + band.size() / 2, band.end());
    signal_gate = band[band.size() / 2] * gap_ratio;
    cap = std::min(cap, rank - 1);
  } else {
    cap = std::min(cap, rank);
  }

  int best = 0;
  int above_band = 0;
  for (int i = 1; i <= cap; ++i) {
    const double hi = eigenvalues[i - 1];
    const double lo = eigenvalues[i];
    if (hi <= floor_ev || hi < signal_gate) break;
    above_band = i;
    if (lo <= floor_ev || hi / lo >= gap_ratio) best = i;
  }
  // A ladder that tapers smoothly into the band shows no clean gap; count
  // what stands clear of the band instead.
  return best > 0 ? best : above_band;
}

Eigen::VectorXcd steering_vector(double d_m, double eta_rad,
                                 const FmcwConfig& fmcw, const ArrayConfig& arr,
                                 const HopPlan& plan, int n_f) {
  if (d_m <= 0) throw std::invalid_argument("distance must be positive");
  if (n_f < 1 || n_f > plan.n_hops())
    throw std::invalid_argument("n_f must address hops within the plan");
  if (plan.sample_rate_hz != fmcw.sample_rate_hz)
    throw std::invalid_argument("plan and waveform sample rates disagree");
  const double lambda = fmcw.wavelength();
  Eigen::VectorXd phase(static_cast<Eigen::Index>(arr.n_elements) * n_f);
  for (int m = 0; m < arr.n_elements; ++m) {
    const double alpha = array_phase(arr, m, eta_rad, lambda);
    for (int f = 0; f < n_f; ++f)
      phase[m * n_f + f] = alpha + range_phase(d_m, f, fmcw, plan);
  }
  return unit_phasor(phase);
}

Spectrum2D music_spectrum(const CovarianceEstimate& cov, int i_paths,
                          const FmcwConfig& fmcw, const ArrayConfig& arr,
                          const HopPlan& plan, const SpectrumGrid& grid) {
  grid.validate();
  const Eigen::Index n_rows = cov.r.rows();
  if (i_paths < 1 || i_paths >= n_rows)
    throw std::invalid_argument("model order out of range");
  const int n_f = static_cast<int>(n_rows) / arr.n_elements;
  if (static_cast<Eigen::Index>(n_f) * arr.n_elements != n_rows)
    throw std::invalid_argument("covariance size not a multiple of the array");

  const int nd = grid.n_d();
  const int ne = grid.n_eta();
  const double lambda = fmcw.wavelength();

  // Separable steering: a(d, eta)[m*n_f + f] = e^{j alpha_m} e^{j gamma_f}.
  Eigen::MatrixXcd g(n_f, nd);
  for (int f = 0; f < n_f; ++f)
    for (int id = 0; id < nd; ++id) {
      const double ph = range_phase(grid.d_at(id), f, fmcw, plan);
      g(f, id) = cd(std::cos(ph), std::sin(ph));
    }
  Eigen::MatrixXcd a_eta(ne, arr.n_elements);
  for (int j = 0; j < ne; ++j)
    for (int m = 0; m < arr.n_elements; ++m) {
      const double ph = array_phase(arr, m, grid.eta_at(j), lambda);
      a_eta(j, m) = cd(std::cos(ph), std::sin(ph));
    }

  // ||U_n^H a||^2 = n_rows - sum over signal vectors of |u_k^H a|^2.
  Eigen::MatrixXd sig_power = Eigen::MatrixXd::Zero(ne, nd);
  for (int k = 0; k < i_paths; ++k) {
    Eigen::MatrixXcd um(arr.n_elements, n_f);
    for (int m = 0; m < arr.n_elements; ++m)
      for (int f = 0; f < n_f; ++f) um(m, f) = cov.eigenvectors(m * n_f + f, k);
    const Eigen::MatrixXcd w = um.conjugate() * g;       // n_a x nd
    const Eigen::MatrixXcd s = a_eta * w;                // ne x nd
    sig_power += s.cwiseAbs2();
  }

  Spectrum2D spec;
  spec.grid = grid;
  spec.values.resize(ne, nd);
  const double total = static_cast<double>(n_rows);
  const double floor_den = total * 1e-12;
  for (int j = 0; j < ne; ++j)
    for (int id = 0; id < nd; ++id) {
      const double den = std::max(total - sig_power(j, id), floor_den);
      spec.values(j, id) = 1.0 / den;
    }
  return spec;
}

namespace {

/// Bearing pseudo-spectrum over the grid plus its interior maxima
/// (strongest first, at most `order`), from an antenna-only covariance.
struct BearingScan {
  Eigen::MatrixXcd b_eta;   // ne x n_a steering phasors
  Eigen::VectorXd pa;       // bearing pseudo-spectrum
  std::vector<int> maxima;  // bearing row indices
};

BearingScan scan_bearings(const Eigen::MatrixXcd& rxx, int order,
                          const ArrayConfig& arr, double lambda,
                          const SpectrumGrid& grid) {
  const int n_a = static_cast<int>(rxx.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rxx);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");

  const int ne = grid.n_eta();
  BearingScan scan;
  scan.b_eta.resize(ne, n_a);
  for (int j = 0; j < ne; ++j)
    for (int m = 0; m < n_a; ++m) {
      const double ph = array_phase(arr, m, grid.eta_at(j), lambda);
      scan.b_eta(j, m) = cd(std::cos(ph), std::sin(ph));
    }

  scan.pa.resize(ne);
  Eigen::MatrixXcd us(n_a, order);
  for (int k = 0; k < order; ++k)
    us.col(k) = eig.eigenvectors().col(n_a - 1 - k);
  const Eigen::MatrixXcd proj = scan.b_eta.conjugate() * us;  // ne x order
  for (int j = 0; j < ne; ++j) {
    const double den =
        std::max(static_cast<double>(n_a) - proj.row(j).squaredNorm(),
                 n_a * 1e-12);
    scan.pa[j] = 1.0 / den;
  }

  for (int j = 1; j + 1 < ne; ++j)
    if (scan.pa[j] > scan.pa[j - 1] && scan.pa[j] > scan.pa[j + 1])
      scan.maxima.push_back(j);
  std::sort(scan.maxima.begin(), scan.maxima.end(),
            [&](int a, int b) { return scan.pa[a] > scan.pa[b]; });
  if (static_cast<int>(scan.maxima.size()) > order) scan.maxima.resize(order);
  return scan;
}

/// spec += per-bearing ridge p_r placed at bearing row r, shaped by the
/// bearing spectrum and the beam coupling so it stays local to r.
void compose_ridge(Spectrum2D& spec, const BearingScan& scan, int r,
                   const Eigen::VectorXd& p_r) {
  const int ne = static_cast<int>(scan.pa.size());
  const int n_a = static_cast<int>(scan.b_eta.cols());
  for (int j = 0; j < ne; ++j) {
    const cd coup =
        (scan.b_eta.row(j).conjugate() * scan.b_eta.row(r).transpose())(0);
    const double c2 = std::norm(coup) / static_cast<double>(n_a * n_a);
    spec.values.row(j) += (scan.pa[j] * c2) * p_r.transpose();
  }
}

}  // namespace

Spectrum2D conventional_music(const Eigen::MatrixXcd& aligned, int i_paths,
                              const FmcwConfig& fmcw, const ArrayConfig& arr,
                              const SpectrumGrid& grid) {
  grid.validate();
  const int n_a = static_cast<int>(aligned.rows());
  const Eigen::Index n_s = aligned.cols();
  if (n_a != arr.n_elements)
    throw std::invalid_argument("row count must match the array");
  if (n_s < 2) throw std::invalid_argument("too few samples");
  const int cap = std::max(1, (2 * n_a) / 3);
  const int order = std::min({std::max(i_paths, 1), cap, n_a - 1});

  Eigen::MatrixXcd rxx = (aligned * aligned.adjoint()) / static_cast<double>(n_s);
  rxx = ((rxx + rxx.adjoint()) * 0.5).eval();
  const BearingScan scan =
      scan_bearings(rxx, order, arr, fmcw.wavelength(), grid);

  const int nd = grid.n_d();
  Spectrum2D spec;
  spec.grid = grid;
  spec.values = Eigen::MatrixXd::Zero(grid.n_eta(), nd);

  // Per detected bearing: beamform, then a matched range periodogram.
  const double fs = fmcw.sample_rate_hz;
  for (int r : scan.maxima) {
    const Eigen::VectorXcd b_r = scan.b_eta.row(r).transpose();
    const Eigen::VectorXcd y =
        (b_r.conjugate().transpose() * aligned).transpose() /
        static_cast<double>(n_a);
    Eigen::VectorXd p_r(nd);
    for (int id = 0; id < nd; ++id) {
      const double f_b = beat_frequency(fmcw, grid.d_at(id));
      const double step_ph = -2.0 * kPi * f_b / fs;
      const cd step(std::cos(step_ph), std::sin(step_ph));
      cd rot(1.0, 0.0);
      cd acc(0.0, 0.0);
      for (Eigen::Index t = 0; t < n_s; ++t) {
        acc += y[t] * rot;
        rot *= step;
        if ((t & 0xfff) == 0xfff) rot /= std::abs(rot);
      }
      p_r[id] = std::norm(acc) / static_cast<double>(n_s * n_s);
    }
    compose_ridge(spec, scan, r, p_r);
  }
  return spec;
}

Spectrum2D conventional_music(
    const std::vector<std::vector<std::vector<cd>>>& segments,
    const HopPlan& plan, int i_paths, const FmcwConfig& fmcw,
    const ArrayConfig& arr, const SpectrumGrid& grid, PeakSet* peaks_out) {
  grid.validate();
  const int n_a = static_cast<int>(segments.size());
  if (n_a != arr.n_elements)
    throw std::invalid_argument("segment count must match the array");
  const int n_f = static_cast<int>(segments[0].size());
  if (n_f < 1) throw std::invalid_argument("no hop segments");
  const int k_cycles = static_cast<int>(segments[0][0].size());
  if (k_cycles < 2) throw std::invalid_argument("too few cycles");
  for (const auto& per_hop : segments)
    if (static_cast<int>(per_hop.size()) != n_f ||
        static_cast<int>(per_hop[0].size()) != k_cycles)
      throw std::invalid_argument("ragged segments");
  const int cap = std::max(1, (2 * n_a) / 3);
  const int order = std::min({std::max(i_paths, 1), cap, n_a - 1});

  const int cols = n_f * k_cycles;
  Eigen::MatrixXcd m(n_a, cols);
  for (int a = 0; a < n_a; ++a)
    for (int f = 0; f < n_f; ++f)
      for (int k = 0; k < k_cycles; ++k) m(a, f * k_cycles + k) = segments[a][f][k];
  Eigen::MatrixXcd rxx = (m * m.adjoint()) / static_cast<double>(cols);
  rxx = ((rxx + rxx.adjoint()) * 0.5).eval();
  const BearingScan scan =
      scan_bearings(rxx, order, arr, fmcw.wavelength(), grid);

  const int nd = grid.n_d();
  Spectrum2D spec;
  spec.grid = grid;
  spec.values = Eigen::MatrixXd::Zero(grid.n_eta(), nd);

  // Per detected bearing: beamform each hop slot's snapshot stream, then a
  // periodogram over the cycle-rate beat rotation, hops summed incoherently
  // (conventional processing has no cross-hop phase model).
  const double fs = plan.sample_rate_hz;
  const int cycle = plan.n_hops() * plan.hop_period_samples;
  // Hann taper: an unwindowed clutter line's -13 dB sidelobes would outrank
  // genuine returns sharing its bearing.
  std::vector<double> win(k_cycles);
  double win_sum = 0.0;
  for (int k = 0; k < k_cycles; ++k) {
    win[k] = 0.5 - 0.5 * std::cos(2.0 * kPi * k / (k_cycles - 1));
    win_sum += win[k];
  }
  for (int r : scan.maxima) {
    Eigen::MatrixXcd s(n_f, k_cycles);
    for (int f = 0; f < n_f; ++f)
      for (int k = 0; k < k_cycles; ++k) {
        cd acc(0.0, 0.0);
        for (int a = 0; a < n_a; ++a)
          acc += std::conj(scan.b_eta(r, a)) * segments[a][f][k];
        s(f, k) = acc * win[k] / static_cast<double>(n_a);
      }
    Eigen::VectorXd p_r(nd);
    for (int id = 0; id < nd; ++id) {
      const double th =
          2.0 * kPi * beat_frequency(fmcw, grid.d_at(id)) * cycle / fs;
      const cd step(std::cos(th), -std::sin(th));
      double tot = 0.0;
      for (int f = 0; f < n_f; ++f) {
        cd rot(1.0, 0.0);
        cd acc(0.0, 0.0);
        for (int k = 0; k < k_cycles; ++k) {
          acc += s(f, k) * rot;
          rot *= step;
        }
        tot += std::norm(acc);
      }
      p_r[id] = tot / static_cast<double>(n_f) / (win_sum * win_sum);
    }
    compose_ridge(spec, scan, r, p_r);

    if (peaks_out == nullptr) continue;
    std::vector<int> ridge;
    for (int id = 1; id + 1 < nd; ++id)
      if (p_r[id] > p_r[id - 1] && p_r[id] > p_r[id + 1]) ridge.push_back(id);
    std::sort(ridge.begin(), ridge.end(),
              [&](int a, int b) { return p_r[a] > p_r[b]; });
    // A bearing can carry both a silent echo and a tag return beyond it, so
    // keep the two strongest range maxima, not just the argmax.
    if (ridge.size() > 2) ridge.resize(2);
    if (ridge.empty()) peaks_out->shortfall += 1;
    for (int id : ridge) {
      const double den = p_r[id - 1] - 2.0 * p_r[id] + p_r[id + 1];
      const double off_d =
          den < 0 ? std::clamp(0.5 * (p_r[id - 1] - p_r[id + 1]) / den, -0.5,
                               0.5)
                  : 0.0;
      double off_e = 0.0;
      if (r > 0 && r + 1 < grid.n_eta())
        off_e = refine_reciprocal(scan.pa[r - 1], scan.pa[r], scan.pa[r + 1]);
      Peak p;
      p.d_m = grid.d_at(id) + off_d * grid.d_step_m;
      p.eta_rad = grid.eta_at(r) + off_e * grid.eta_step_rad;
      p.value = scan.pa[r] * p_r[id];
      p.strength = p.value;
      peaks_out->peaks.push_back(p);
    }
  }
  if (peaks_out != nullptr)
    std::stable_sort(peaks_out->peaks.begin(), peaks_out->peaks.end(),
                     [](const Peak& a, const Peak& b) { return a.value > b.value; });
  return spec;
}

PeakSet pick_peaks(const Spectrum2D& spec, int i_paths,
                   const std::vector<double>& signal_eigenvalues) {
  if (i_paths < 1) throw std::invalid_argument("need at least one peak");
  const int ne = static_cast<int>(spec.values.rows());
  const int nd = static_cast<int>(spec.values.cols());

  struct Cell {
    int j, i;
    double v;
  };
  std::vector<Cell> maxima;
  for (int j = 0; j < ne; ++j)
    for (int i = 0; i < nd; ++i) {
      const double v = spec.values(j, i);
      bool is_max = v > 0;
      for (int dj = -1; dj <= 1 && is_max; ++dj)
        for (int di = -1; di <= 1 && is_max; ++di) {
          if (dj == 0 && di == 0) continue;
          const int jj = j + dj, ii = i + di;
          if (jj < 0 || jj >= ne || ii < 0 || ii >= nd) continue;
          if (!(v > spec.values(jj, ii))) is_max = false;
        }
      if (is_max) maxima.push_back({j, i, v});
    }

  std::sort(maxima.begin(), maxima.end(), [](const Cell& a, const Cell& b) {
    if (a.v != b.v) return a.v > b.v;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  PeakSet out;
  const int take = std::min<int>(i_paths, static_cast<int>(maxima.size()));
  out.shortfall = take < i_paths;
  for (int r = 0; r < take; ++r) {
    const int j = maxima[r].j, i = maxima[r].i;
    double off_d = 0.0, off_e = 0.0;
    if (i > 0 && i + 1 < nd)
      off_d = refine_reciprocal(spec.values(j, i - 1), spec.values(j, i),
                                spec.values(j, i + 1));
    if (j > 0 && j + 1 < ne)
      off_e = refine_reciprocal(spec.values(j - 1, i), spec.values(j, i),
                                spec.values(j + 1, i));
    Peak p;
    p.d_m = spec.grid.d_at(maxima[r].i) + off_d * spec.grid.d_step_m;
    p.eta_rad = spec.grid.eta_at(maxima[r].j) + off_e * spec.grid.eta_step_rad;
    p.value = maxima[r].v;
    if (!signal_eigenvalues.empty()) {
      const std::size_t idx =
          std::min<std::size_t>(r, signal_eigenvalues.size() - 1);
      p.strength = signal_eigenvalues[idx];
    } else {
      p.strength = p.value;
    }
    out.peaks.push_back(p);
  }
  return out;
}

PeakSet pick_bearing_peaks(const Spectrum2D& spec, int max_count) {
  if (max_count < 1) throw std::invalid_argument("need at least one peak");
  const int ne = static_cast<int>(spec.values.rows());
  const int nd = static_cast<int>(spec.values.cols());

  // Ridge height per bearing, then interior strict maxima across bearings.
  Eigen::VectorXd row_max(ne);
  std::vector<int> row_arg(ne, 0);
  for (int j = 0; j < ne; ++j) {
    Eigen::Index arg = 0;
    row_max[j] = spec.values.row(j).maxCoeff(&arg);
    row_arg[j] = static_cast<int>(arg);
  }
  std::vector<int> maxima;
  for (int j = 1; j + 1 < ne; ++j)
    if (row_max[j] > 0 && row_max[j] > row_max[j - 1] &&
        row_max[j] > row_max[j + 1])
      maxima.push_back(j);
  std::sort(maxima.begin(), maxima.end(), [&](int a, int b) {
    if (row_max[a] != row_max[b]) return row_max[a] > row_max[b];
    return a < b;
  });

  PeakSet out;
  const int take = std::min<int>(max_count, static_cast<int>(maxima.size()));
  out.shortfall = take < max_count;
  for (int r = 0; r < take; ++r) {
    const int j = maxima[r];
    const int i = row_arg[j];
    double off_d = 0.0, off_e = 0.0;
    if (i > 0 && i + 1 < nd)
      off_d = refine_reciprocal(spec.values(j, i - 1), spec.values(j, i),
                                spec.values(j, i + 1));
    if (j > 0 && j + 1 < ne)
      off_e = refine_reciprocal(spec.values(j - 1, i), spec.values(j, i),
                                spec.values(j + 1, i));
    Peak p;
    p.d_m = spec.grid.d_at(i) + off_d * spec.grid.d_step_m;
    p.eta_rad = spec.grid.eta_at(j) + off_e * spec.grid.eta_step_rad;
    p.value = spec.values(j, i);
    p.strength = p.value;
    out.peaks.push_back(p);
  }
  return out;
}

std::string spectrum_to_csv(const Spectrum2D& spec) {
  std::string out = "d_m,eta_deg,value\n";
  char buf[96];
  const int ne = static_cast<int>(spec.values.rows());
  const int nd = static_cast<int>(spec.values.cols());
  for (int j = 0; j < ne; ++j)
    for (int i = 0; i < nd; ++i) {
      std::snprintf(buf, sizeof(buf), "%.4f,%.4f,%.9g\n", spec.grid.d_at(i),
                    rad2deg(spec.grid.eta_at(j)), spec.values(j, i));
      out += buf;
    }
  return out;
}

}  // namespace nlosim
