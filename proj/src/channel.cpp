#include "nlosim/channel.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace nlosim {
namespace {

struct Component {
  double amplitude = 0.0;
  double round_trip_m = 0.0;  // total two-way distance
  double aoa_rad = 0.0;
  // Modulation source; null for unmodulated body/reflector returns.
  const TlcSequence* modulation = nullptr;
  int mod_offset_samples = 0;
  double mod_delay_s = 0.0;
};

/// Adds one return to every antenna row. The beat tone runs phase-continuously
/// over the whole frame; the carrier phase offset is fixed by the round trip.
void accumulate(RxFrame& frame, const Component& comp, const FmcwConfig& fmcw,
                const ArrayConfig& arr) {
  const double tau = comp.round_trip_m / kSpeedOfLight;
  const double f_beat = fmcw.slope() * tau;
  const double carrier_turns = fmcw.carrier_hz * tau;
  const cd base = comp.amplitude *
                  cd(std::cos(2.0 * kPi * carrier_turns),
                     std::sin(2.0 * kPi * carrier_turns));
  const double step_phase = 2.0 * kPi * f_beat / fmcw.sample_rate_hz;
  const cd step(std::cos(step_phase), std::sin(step_phase));
  const double lambda = fmcw.wavelength();

  std::vector<cd> series(frame.n_samples);
  cd rot(1.0, 0.0);
  for (int n = 0; n < frame.n_samples; ++n) {
    cd v = base * rot;
    if (comp.modulation != nullptr)
      v *= comp.modulation->analytic_at(n + comp.mod_offset_samples,
                                        comp.mod_delay_s);
    series[n] = v;
    rot *= step;
    if ((n & 0xfff) == 0xfff) rot /= std::abs(rot);
  }
  for (int a = 0; a < frame.n_antennas; ++a) {
    const double ph = array_phase(arr, a, comp.aoa_rad, lambda);
    const cd g(std::cos(ph), std::sin(ph));
    for (int n = 0; n < frame.n_samples; ++n) frame.at(a, n) += g * series[n];
  }
}

const TagState* tag_for(const std::map<std::string, TagState>& tags,
                        const std::string& id) {
  const auto it = tags.find(id);
  return it == tags.end() ? nullptr : &it->second;
}

}  // namespace

RxFrame simulate_frame(const Scene& scene,
                       const std::map<std::string, TagState>& tags,
                       const FmcwConfig& fmcw, const ArrayConfig& arr,
                       TagMode phase) {
  fmcw.validate();
  arr.validate();
  validate_scene(scene);

  RxFrame frame;
  frame.n_antennas = arr.n_elements;
  frame.n_samples = fmcw.samples_per_frame();
  frame.data.assign(static_cast<std::size_t>(frame.n_antennas) * frame.n_samples,
                    cd(0.0, 0.0));

  static const TagState kPassive{};
  for (const Target& target : scene.targets) {
    const TagState* state = tag_for(tags, target.id);
    if (state == nullptr) state = &kPassive;
    const bool modulating = phase == TagMode::kTlc &&
                            state->mode == TagMode::kTlc &&
                            state->waveform != nullptr;
    if (modulating &&
        state->waveform->plan.sample_rate_hz != fmcw.sample_rate_hz)
      throw std::invalid_argument("tag waveform sample rate mismatch");

    if (!is_direct_path_blocked(scene, target.id)) {
      const Point2D rel = target.position - scene.radar;
      const double d_dir = rel.norm();
      const double aoa_dir = std::atan2(rel.y, rel.x);
      Component body;
      body.amplitude = state->body_scatter / (d_dir * d_dir);
      body.round_trip_m = 2.0 * d_dir;
      body.aoa_rad = aoa_dir;
      accumulate(frame, body, fmcw, arr);
      if (modulating) {
        Component direct;
        direct.amplitude = 1.0 / (d_dir * d_dir);
        direct.round_trip_m = 2.0 * d_dir;
        direct.aoa_rad = aoa_dir;
        direct.modulation = state->waveform;
        direct.mod_offset_samples = state->start_offset_samples;
        direct.mod_delay_s = d_dir / kSpeedOfLight;
        accumulate(frame, direct, fmcw, arr);
      }
    }

    for (const PathGeometry& path :
         enumerate_first_order_paths(scene, target.id)) {
      const Reflector& refl = scene.reflectors[path.reflector_index];
      Component wall;
      wall.amplitude = refl.scatter_coeff / (path.d_rs * path.d_rs);
      wall.round_trip_m = 2.0 * path.d_rs;
      wall.aoa_rad = path.aoa_phi;
      accumulate(frame, wall, fmcw, arr);
      if (modulating) {
        Component tag;
        tag.amplitude = path.attenuation;
        tag.round_trip_m = 2.0 * path.d_total;
        tag.aoa_rad = path.aoa_phi;
        tag.modulation = state->waveform;
        tag.mod_offset_samples = state->start_offset_samples;
        tag.mod_delay_s = path.d_total / kSpeedOfLight;
        accumulate(frame, tag, fmcw, arr);
      }
    }
  }
  return frame;
}

RxFrame simulate_frame(const Scene& scene,
                       const std::map<std::string, TagState>& tags,
                       const FmcwConfig& fmcw, const ArrayConfig& arr,
                       const NoiseSpec& noise, TagMode phase) {
  const RxFrame clean = simulate_frame(scene, tags, fmcw, arr, phase);
  return add_noise(clean, noise, strongest_tag_amplitude(scene));
}

double strongest_tag_amplitude(const Scene& scene) {
  double best = 0.0;
  for (const Target& target : scene.targets) {
    if (!is_direct_path_blocked(scene, target.id)) {
      const double d = (target.position - scene.radar).norm();
      best = std::max(best, 1.0 / (d * d));
    }
    for (const PathGeometry& path :
         enumerate_first_order_paths(scene, target.id))
      best = std::max(best, path.attenuation);
  }
  return best;
}

RxFrame add_noise(const RxFrame& frame, const NoiseSpec& spec,
                  double reference_amplitude) {
  double sigma = 0.0;
  if (spec.sigma_override.has_value()) {
    sigma = *spec.sigma_override;
    if (sigma < 0) throw std::invalid_argument("noise sigma must be >= 0");
  } else if (std::isinf(spec.snr_db)) {
    return frame;
  } else {
    if (reference_amplitude <= 0)
      throw std::invalid_argument(
          "finite SNR needs a positive reference amplitude");
    sigma = reference_amplitude * std::pow(10.0, -spec.snr_db / 20.0);
  }
  if (sigma == 0.0) return frame;

  RxFrame out = frame;
  Rng rng(spec.seed);
  for (cd& v : out.data) v += sigma * rng.cnormal();
  return out;
}

RxFrame subtract_background(const RxFrame& active, const RxFrame& background) {
  if (active.n_antennas != background.n_antennas ||
      active.n_samples != background.n_samples)
    throw std::invalid_argument("frame shapes must match");
  RxFrame out = active;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] -= background.data[i];
  return out;
}

std::string frame_to_csv(const RxFrame& frame) {
  std::string out = "antenna,sample,re,im\n";
  char buf[128];
  for (int a = 0; a < frame.n_antennas; ++a)
    for (int n = 0; n < frame.n_samples; ++n) {
      const cd v = frame.at(a, n);
      std::snprintf(buf, sizeof(buf), "%d,%d,%.9g,%.9g\n", a, n, v.real(),
                    v.imag());
      out += buf;
    }
  return out;
}

}  // namespace nlosim
