#include "nlosim/codes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nlosim {
namespace {

/// Fibonacci LFSR maximal-length sequence for a known primitive polynomial.
/// Polynomials are given as tap masks over state bits [0, n).
std::vector<int> m_sequence(int n) {
  static const std::map<int, unsigned> kPrimitiveTaps = {
      {3, 0b011},        {4, 0b0011},        {5, 0b00101},
      {6, 0b000011},     {7, 0b0001001},     {8, 0b10111000},
      {9, 0b000010001},  {10, 0b0000000101},
  };
  const auto it = kPrimitiveTaps.find(n);
  if (it == kPrimitiveTaps.end())
    throw std::invalid_argument("unsupported code degree");
  const unsigned taps = it->second;
  const int period = (1 << n) - 1;
  unsigned state = 1;
  std::vector<int> out(period);
  for (int i = 0; i < period; ++i) {
    out[i] = static_cast<int>(state & 1u);
    unsigned fb = 0;
    unsigned masked = state & taps;
    while (masked) {
      fb ^= masked & 1u;
      masked >>= 1;
    }
    state = (state >> 1) | (fb << (n - 1));
  }
  return out;
}

std::vector<int> decimate(const std::vector<int>& u, int q) {
  const int n = static_cast<int>(u.size());
  std::vector<int> v(n);
  for (int k = 0; k < n; ++k) v[k] = u[(static_cast<long long>(k) * q) % n];
  return v;
}

std::vector<int> xor_shift(const std::vector<int>& u, const std::vector<int>& v,
                           int shift) {
  const int n = static_cast<int>(u.size());
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) out[i] = u[i] ^ v[(i + shift) % n];
  return out;
}

/// Low-cross-correlation family for degree n: Gold construction from a
/// preferred decimation when one exists, small Kasami set when n = 0 mod 4.
std::vector<std::vector<int>> code_family(int n) {
  const auto u = m_sequence(n);
  std::vector<std::vector<int>> fam;
  fam.push_back(u);
  if (n % 4 == 0) {
    // Small Kasami: decimation by 2^(n/2)+1 yields a short-period sequence;
    // its distinct shifts added to u complete the set.
    const int q = (1 << (n / 2)) + 1;
    const auto w = decimate(u, q);
    const int short_period = (1 << (n / 2)) - 1;
    for (int j = 0; j < short_period; ++j) fam.push_back(xor_shift(u, w, j));
  } else {
    // Preferred pair u, v = u[q] with q = 2^k + 1; k chosen so gcd(n, k)
    // preserves the preferred-pair condition (k=1 odd n, k=2 for n=2 mod 4).
    const int k = (n % 2 == 1) ? 1 : 2;
    const int q = (1 << k) + 1;
    const auto v = decimate(u, q);
    fam.push_back(v);
    const int period = (1 << n) - 1;
    for (int j = 0; j < period; ++j) fam.push_back(xor_shift(u, v, j));
  }
  return fam;
}

}  // namespace

int DsssCode::weight() const {
  return std::accumulate(chips.begin(), chips.end(), 0);
}

DsssCode generate_dsss_code(std::uint64_t family_seed, int length) {
  int n = 0;
  while ((1 << (n + 1)) - 1 < length) ++n;
  ++n;
  if ((1 << n) - 1 != length || n < 3)
    throw std::invalid_argument("code length must be 2^n - 1 with n >= 3");
  const auto fam = code_family(n);
  DsssCode code;
  code.family_seed = family_seed;
  code.chips = fam[family_seed % fam.size()];
  return code;
}

HopPlan generate_hop_plan(const std::vector<double>& channels_hz, int n_hops,
                          int hop_period_samples, double sample_rate_hz,
                          std::uint64_t seed) {
  if (channels_hz.empty())
    throw std::invalid_argument("channel set must be non-empty");
  for (std::size_t i = 0; i < channels_hz.size(); ++i) {
    if (channels_hz[i] <= 0)
      throw std::invalid_argument("hop channels must be positive");
    for (std::size_t j = i + 1; j < channels_hz.size(); ++j)
      if (channels_hz[i] == channels_hz[j])
        throw std::invalid_argument("hop channels must be distinct");
  }
  if (n_hops <= 0) throw std::invalid_argument("n_hops must be positive");
  if (hop_period_samples <= 0)
    throw std::invalid_argument("hop period must be positive");
  if (sample_rate_hz <= 0)
    throw std::invalid_argument("sample rate must be positive");

  HopPlan plan;
  plan.channels_hz = channels_hz;
  plan.hop_period_samples = hop_period_samples;
  plan.sample_rate_hz = sample_rate_hz;
  plan.seed = seed;
  plan.index_seq.resize(n_hops);
  Rng rng(seed);
  for (int i = 0; i < n_hops; ++i)
    plan.index_seq[i] = static_cast<int>(rng.uniform_index(channels_hz.size()));
  return plan;
}

int TlcSequence::chip_at(int n) const {
  const int cycle = plan.n_hops() * plan.hop_period_samples;
  int m = n % cycle;
  if (m < 0) m += cycle;
  const int within_hop = m % plan.hop_period_samples;
  return code.chips[(within_hop / samples_per_chip) % code.length()];
}

double TlcSequence::channel_at(int n) const {
  const int cycle = plan.n_hops() * plan.hop_period_samples;
  int m = n % cycle;
  if (m < 0) m += cycle;
  return plan.channel_of_hop(m / plan.hop_period_samples);
}

cd TlcSequence::carrier_at(int n) const {
  const int cycle = plan.n_hops() * plan.hop_period_samples;
  int m = n % cycle;
  if (m < 0) m += cycle;
  const int hop = m / plan.hop_period_samples;
  const int in_hop = m % plan.hop_period_samples;
  const double phase =
      2.0 * kPi * plan.channel_of_hop(hop) * in_hop / plan.sample_rate_hz;
  return {std::cos(phase), std::sin(phase)};
}

cd TlcSequence::analytic_at(int n, double delay_s) const {
  // Evaluate the tag waveform at local time u = n/fs - delay. The carrier
  // phase is hop-local (restarts at each hop boundary) so a receiver aligned
  // at any cycle boundary reproduces the phase exactly.
  const double fs = plan.sample_rate_hz;
  const double pos = static_cast<double>(n) - delay_s * fs;  // in samples
  const int cycle = plan.n_hops() * plan.hop_period_samples;
  double m = std::fmod(pos, static_cast<double>(cycle));
  if (m < 0) m += cycle;
  const int hop = static_cast<int>(m) / plan.hop_period_samples;
  const double in_hop = m - static_cast<double>(hop) * plan.hop_period_samples;
  const int chip =
      code.chips[(static_cast<int>(in_hop) / samples_per_chip) % code.length()];
  if (chip == 0) return {0.0, 0.0};
  const double f = plan.channel_of_hop(hop);
  const double phase = 2.0 * kPi * f * in_hop / fs;
  return {std::cos(phase), std::sin(phase)};
}

TlcSequence build_tlc_waveform(const DsssCode& code, const HopPlan& plan,
                               double sample_rate_hz, int repetitions) {
  if (code.length() < 2) throw std::invalid_argument("code too short");
  if (code.weight() == 0) throw std::invalid_argument("code must not be all-zero");
  if (repetitions <= 0) throw std::invalid_argument("repetitions must be positive");
  if (plan.hop_period_samples % code.length() != 0)
    throw std::invalid_argument(
        "hop period must be divisible by the code length");
  if (plan.sample_rate_hz != sample_rate_hz)
    throw std::invalid_argument("plan and waveform sample rates disagree");

  TlcSequence seq;
  seq.code = code;
  seq.plan = plan;
  seq.samples_per_chip = plan.hop_period_samples / code.length();
  seq.repetitions = repetitions;
  seq.total_len = repetitions * plan.n_hops() * plan.hop_period_samples;
  seq.samples.resize(seq.total_len);
  for (int n = 0; n < seq.total_len; ++n)
    seq.samples[n] = seq.analytic_at(n, 0.0).real();
  return seq;
}

TlcSequence build_baseline_waveform(BaselineKind kind, const DsssCode& code,
                                    double carrier_hz, double toggle_hz,
                                    double sample_rate_hz, int hop_period_samples,
                                    int repetitions) {
  if (kind == BaselineKind::kDsssOnly) {
    HopPlan plan;
    plan.channels_hz = {carrier_hz};
    plan.index_seq = {0};
    plan.hop_period_samples = hop_period_samples;
    plan.sample_rate_hz = sample_rate_hz;
    return build_tlc_waveform(code, plan, sample_rate_hz, repetitions);
  }
  // FSK: plain on/off toggling at toggle_hz, expressed as the two-chip code
  // {1,0} with half a toggle period per chip and no carrier.
  if (toggle_hz <= 0) throw std::invalid_argument("toggle rate must be positive");
  const int half_period =
      std::max(1, static_cast<int>(std::lround(sample_rate_hz / (2.0 * toggle_hz))));
  DsssCode square;
  square.chips = {1, 0};
  HopPlan plan;
  plan.channels_hz = {0.0};
  plan.index_seq = {0};
  plan.hop_period_samples = 2 * half_period;
  plan.sample_rate_hz = sample_rate_hz;
  return build_tlc_waveform(square, plan, sample_rate_hz, repetitions);
}

std::vector<double> correlation_profile(const DsssCode& a, const DsssCode& b) {
  if (a.length() != b.length() || a.length() == 0)
    throw std::invalid_argument("codes must share a positive length");
  const int n = a.length();
  std::vector<double> out(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const int sa = 2 * a.chips[i] - 1;
      const int sb = 2 * b.chips[(i + k) % n] - 1;
      acc += sa * sb;
    }
    out[k] = acc;
  }
  return out;
}

void HfdSchedule::validate() const {
  if (tlc_duration_s <= 0 || rlc_duration_s <= 0)
    throw std::invalid_argument("schedule durations must be positive");
}

PowerProfile power_model(const HopPlan& plan,
                         const std::map<double, double>& per_freq_mw,
                         const HfdSchedule& schedule, double battery_mwh) {
  schedule.validate();
  if (battery_mwh <= 0) throw std::invalid_argument("battery must be positive");
  for (double f : plan.channels_hz) {
    const auto it = per_freq_mw.find(f);
    if (it == per_freq_mw.end())
      throw std::invalid_argument("missing power entry for a hop channel");
    if (it->second <= 0)
      throw std::invalid_argument("per-channel power must be positive");
  }
  if (plan.n_hops() == 0) throw std::invalid_argument("empty hop plan");

  std::vector<int> counts(plan.n_channels(), 0);
  for (int idx : plan.index_seq) counts[idx]++;

  PowerProfile p;
  for (int c = 0; c < plan.n_channels(); ++c) {
    const double occupancy =
        static_cast<double>(counts[c]) / static_cast<double>(plan.n_hops());
    p.avg_tlc_mw += occupancy * per_freq_mw.at(plan.channels_hz[c]);
  }
  const double duty = schedule.duty_tlc();
  p.avg_overall_uw = p.avg_tlc_mw * duty * 1000.0;
  const double hours = battery_mwh / (p.avg_tlc_mw * duty);
  p.lifetime_years = hours / (24.0 * 365.0);
  return p;
}

}  // namespace nlosim
