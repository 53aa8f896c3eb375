#include "nlosim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nlosim {
namespace {

using njson = nlohmann::json;

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct TagSetup {
  std::vector<TlcSequence> waveforms;  // one per scene target
};

/// Per-target templates. Targets get distinct family codes (and hop orders)
/// so concurrent tags separate at the correlator; the FSK baseline has no
/// code so every tag toggles identically.
TagSetup build_tag_setup(const ScenarioConfig& cfg) {
  const double fs = cfg.fmcw.sample_rate_hz;
  const int hop_period = cfg.code.length * cfg.code.samples_per_chip;
  TagSetup setup;
  for (std::size_t i = 0; i < cfg.scene.targets.size(); ++i) {
    switch (cfg.method.modulation) {
      case Modulation::kHfd: {
        const DsssCode code =
            generate_dsss_code(cfg.code.family_seed + i, cfg.code.length);
        const HopPlan plan = generate_hop_plan(
            cfg.hops.channels_hz, static_cast<int>(cfg.hops.channels_hz.size()),
            hop_period, fs, cfg.hops.seed + i);
        setup.waveforms.push_back(
            build_tlc_waveform(code, plan, fs, cfg.repetitions));
        break;
      }
      case Modulation::kDsssOnly: {
        const DsssCode code =
            generate_dsss_code(cfg.code.family_seed + i, cfg.code.length);
        const int reps =
            cfg.repetitions * static_cast<int>(cfg.hops.channels_hz.size());
        setup.waveforms.push_back(build_baseline_waveform(
            BaselineKind::kDsssOnly, code, cfg.hops.dsss_carrier_hz, 0.0, fs,
            hop_period, reps));
        break;
      }
      case Modulation::kFsk: {
        const DsssCode unused;
        TlcSequence probe = build_baseline_waveform(
            BaselineKind::kFsk, unused, 0.0, cfg.hops.fsk_toggle_hz, fs, 0, 1);
        const int window = cfg.repetitions *
                           static_cast<int>(cfg.hops.channels_hz.size()) *
                           hop_period;
        const int reps = std::max(1, window / probe.total_len);
        setup.waveforms.push_back(build_baseline_waveform(
            BaselineKind::kFsk, unused, 0.0, cfg.hops.fsk_toggle_hz, fs, 0,
            reps));
        break;
      }
    }
  }
  return setup;
}

Point2D polar_from_radar(const Point2D& radar, double d, double phi) {
  return {radar.x + d * std::cos(phi), radar.y + d * std::sin(phi)};
}

}  // namespace

std::string to_string(Modulation m) {
  switch (m) {
    case Modulation::kHfd: return "hfd";
    case Modulation::kDsssOnly: return "dsss_only";
    case Modulation::kFsk: return "fsk";
  }
  return "?";
}

std::string to_string(Estimator e) {
  return e == Estimator::kFsMusic ? "fs_music" : "music";
}

std::string to_string(LosVerdict v) {
  switch (v) {
    case LosVerdict::kLos: return "los";
    case LosVerdict::kNlos: return "nlos";
    case LosVerdict::kIndeterminate: return "indeterminate";
  }
  return "?";
}

TrialRecord run_trial(const ScenarioConfig& cfg, int trial_id,
                      const std::string& target_id, Spectrum2D* spectrum_out) {
  cfg.fmcw.validate();
  cfg.array.validate();
  cfg.schedule.validate();
  cfg.grid.validate();
  validate_scene(cfg.scene);
  const Target& target = find_target(cfg.scene, target_id);

  const TagSetup setup = build_tag_setup(cfg);
  std::size_t target_index = 0;
  std::map<std::string, TagState> tags;
  Rng trial_rng(cfg.seed, static_cast<std::uint64_t>(trial_id));
  for (std::size_t i = 0; i < cfg.scene.targets.size(); ++i) {
    const TlcSequence& wf = setup.waveforms[i];
    const int cycle = wf.plan.n_hops() * wf.plan.hop_period_samples;
    TagState state;
    state.mode = TagMode::kTlc;
    state.waveform = &wf;
    state.start_offset_samples =
        static_cast<int>(trial_rng.uniform_index(cycle));
    tags[cfg.scene.targets[i].id] = state;
    if (cfg.scene.targets[i].id == target_id) target_index = i;
  }
  NoiseSpec noise_tlc{cfg.snr_db, trial_rng.next_u64(), cfg.sigma_override};
  NoiseSpec noise_rlc{cfg.snr_db, trial_rng.next_u64(), cfg.sigma_override};

  const auto t0 = std::chrono::steady_clock::now();
  const double ref_amp = strongest_tag_amplitude(cfg.scene);

  RxFrame frame_tlc =
      simulate_frame(cfg.scene, tags, cfg.fmcw, cfg.array, TagMode::kTlc);
  frame_tlc = add_noise(frame_tlc, noise_tlc, ref_amp);
  RxFrame frame_rlc =
      simulate_frame(cfg.scene, tags, cfg.fmcw, cfg.array, TagMode::kRlc);
  frame_rlc = add_noise(frame_rlc, noise_rlc, ref_amp);

  const std::vector<Detection> reflectors =
      detect_reflectors(frame_rlc, cfg.fmcw, cfg.array, cfg.grid, cfg.receiver);
  // The silent capture doubles as the static-background estimate; cancelling
  // it leaves only tag-modulated returns for the active-phase detector.
  const RxFrame frame_active = subtract_background(frame_tlc, frame_rlc);
  const bool use_fs = cfg.method.estimator == Estimator::kFsMusic;
  const std::vector<Detection> virtuals =
      detect_virtuals(frame_active, setup.waveforms[target_index], cfg.fmcw,
                      cfg.array, cfg.grid, cfg.receiver, spectrum_out, use_fs);

  TrialRecord rec;
  rec.trial = trial_id;
  rec.target_id = target_id;
  rec.truth_x = target.position.x;
  rec.truth_y = target.position.y;
  rec.verdict = classify_los_nlos(reflectors, virtuals, cfg.receiver);

  Point2D est = cfg.scene.radar;
  bool located = false;
  if (rec.verdict == LosVerdict::kLos) {
    // The verdict is decided by the primary tag return; in the line of
    // sight case that return is the direct one, so read the position off it.
    const Detection& v =
        virtuals[primary_virtual_index(virtuals, cfg.receiver)];
    est = polar_from_radar(cfg.scene.radar, v.distance_m, v.aoa_rad);
    rec.converged = true;
    located = true;
  }
  if (!located) {
    const std::vector<int> match =
        match_virtual_to_reflectors(virtuals, reflectors, cfg.receiver);
    std::vector<Anchor> anchors;
    std::vector<double> strengths;
    for (std::size_t i = 0; i < virtuals.size(); ++i) {
      if (match[i] < 0) continue;
      const Detection& v = virtuals[i];
      const Detection& r = reflectors[match[i]];
      Anchor a;
      a.position = reflection_point(cfg.scene.radar, r.distance_m, v.aoa_rad);
      a.distance_m = v.distance_m - r.distance_m;
      anchors.push_back(a);
      strengths.push_back(std::max(v.strength, 1e-300));
    }
    rec.anchors_used = static_cast<int>(anchors.size());
    if (anchors.size() >= 3) {
      const std::vector<double> w = compute_weights(strengths);
      for (std::size_t i = 0; i < anchors.size(); ++i) anchors[i].weight = w[i];
      try {
        const LocalizationEstimate wls = wls_multilaterate(anchors);
        est = wls.position;
        rec.residual = wls.residual;
        rec.converged = wls.converged;
        located = true;
      } catch (const std::invalid_argument&) {
        // degenerate anchor geometry; fall through to the polar fallback
      }
    } else if (anchors.size() == 2) {
      // Two clean legs still pin the tag to at most two circle crossings.
      // The scan wedge rejects crossings the receiver could never have seen;
      // walls left unmatched break a remaining tie by predicting where their
      // returns should have landed.
      std::vector<Point2D> valid;
      for (const Point2D& c : circle_intersections(anchors[0], anchors[1])) {
        const Point2D rel = c - cfg.scene.radar;
        const double d = rel.norm();
        const double bearing = std::atan2(rel.y, rel.x);
        if (d >= cfg.grid.d_min_m && d <= cfg.grid.d_max_m &&
            bearing >= cfg.grid.eta_min_rad && bearing <= cfg.grid.eta_max_rad)
          valid.push_back(c);
      }
      int pick = valid.size() == 1 ? 0 : -1;
      if (valid.size() == 2) {
        std::vector<bool> used(reflectors.size(), false);
        for (int mj : match)
          if (mj >= 0) used[mj] = true;
        double scores[2] = {0.0, 0.0};
        int terms = 0;
        for (std::size_t j = 0; j < reflectors.size(); ++j) {
          if (used[j]) continue;
          const Detection& r = reflectors[j];
          const Point2D s =
              reflection_point(cfg.scene.radar, r.distance_m, r.aoa_rad);
          ++terms;
          for (int c = 0; c < 2; ++c) {
            const double pred = r.distance_m + valid[c].dist(s);
            double err = 1.0;
            for (const Detection& v : virtuals)
              if (std::abs(wrap_angle(v.aoa_rad - r.aoa_rad)) <=
                  cfg.receiver.angle_tol_rad)
                err = std::min(err, std::abs(pred - v.distance_m));
            scores[c] += err;
          }
        }
        if (terms > 0 && scores[0] != scores[1])
          pick = scores[0] < scores[1] ? 0 : 1;
      }
      if (pick >= 0) {
        est = valid[pick];
        rec.converged = true;
        located = true;
      }
    }
    if (!located && !virtuals.empty()) {
      const Detection& v =
          virtuals[primary_virtual_index(virtuals, cfg.receiver)];
      est = polar_from_radar(cfg.scene.radar, v.distance_m, v.aoa_rad);
    }
  }

  rec.est_x = est.x;
  rec.est_y = est.y;
  rec.err_x_cm = (est.x - target.position.x) * 100.0;
  rec.err_y_cm = (est.y - target.position.y) * 100.0;
  rec.err_euclid_cm = std::hypot(rec.err_x_cm, rec.err_y_cm);
  rec.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return rec;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("trials", "must be at least 1");
  if (cfg.scene.targets.empty()) throw ConfigError("scene.targets", "empty");
  const std::string& tid = cfg.scene.targets.front().id;

  ScenarioResult result;
  std::vector<double> errs;
  for (int t = 0; t < cfg.trials; ++t) {
    Spectrum2D* out = (t == 0) ? &result.first_spectrum : nullptr;
    TrialRecord rec = run_trial(cfg, t, tid, out);
    if (t == 0) result.has_spectrum = true;
    errs.push_back(rec.err_euclid_cm);
    result.trials.push_back(std::move(rec));
  }
  result.median_err_cm = median_of(errs);
  double sum = 0.0;
  for (double e : errs) sum += e;
  result.mean_err_cm = sum / static_cast<double>(errs.size());
  return result;
}

SweepResult sweep(const ScenarioConfig& cfg, const std::string& axis,
                  const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep.values", "empty");
  SweepResult result;
  result.axis = axis;

  double nominal = cfg.nominal_distance_m;
  if (axis == "distance" && nominal <= 0) {
    if (cfg.scene.targets.empty()) throw ConfigError("scene.targets", "empty");
    nominal = cfg.scene.targets.front().position.dist(cfg.scene.radar);
    if (nominal <= 0) throw ConfigError("nominal_distance_m", "not derivable");
  }

  std::optional<double> pinned_sigma = cfg.sigma_override;
  std::vector<double> medians;
  for (double value : values) {
    ScenarioConfig point_cfg = cfg;
    if (axis == "distance") {
      const double factor = value / nominal;
      if (factor <= 0) throw ConfigError("sweep.values", "must be positive");
      auto scale = [&](Point2D& p) {
        p = cfg.scene.radar + (p - cfg.scene.radar) * factor;
      };
      for (auto& r : point_cfg.scene.reflectors) {
        scale(r.endpoint_a);
        scale(r.endpoint_b);
      }
      for (auto& o : point_cfg.scene.obstacles) {
        scale(o.endpoint_a);
        scale(o.endpoint_b);
      }
      for (auto& t : point_cfg.scene.targets) scale(t.position);
      // Pin the noise floor at the first point so farther variants face the
      // same absolute noise rather than a rescaled one.
      if (!pinned_sigma.has_value() && std::isfinite(cfg.snr_db)) {
        const double ref = strongest_tag_amplitude(point_cfg.scene);
        pinned_sigma = ref * std::pow(10.0, -cfg.snr_db / 20.0);
      }
      point_cfg.sigma_override = pinned_sigma;
    } else if (axis == "snr") {
      point_cfg.snr_db = value;
      point_cfg.sigma_override.reset();
    } else if (axis == "n_targets") {
      const int k = static_cast<int>(value);
      if (k < 1 || k > static_cast<int>(cfg.scene.targets.size()))
        throw ConfigError("sweep.values", "target count out of range");
      point_cfg.scene.targets.assign(cfg.scene.targets.begin(),
                                     cfg.scene.targets.begin() + k);
    } else if (axis == "absorption") {
      if (value < 0 || value >= 1)
        throw ConfigError("sweep.values", "absorption must be in [0, 1)");
      for (auto& r : point_cfg.scene.reflectors) r.absorption = value;
    } else {
      throw ConfigError("sweep.axis", "unknown axis '" + axis + "'");
    }

    const ScenarioResult point = run_scenario(point_cfg);
    SweepPoint sp;
    sp.value = value;
    sp.median_err_cm = point.median_err_cm;
    sp.mean_err_cm = point.mean_err_cm;
    sp.trials = static_cast<int>(point.trials.size());
    result.points.push_back(sp);
    medians.push_back(point.median_err_cm);
    for (const TrialRecord& rec : point.trials) {
      result.all_trials.push_back(rec);
      result.point_values.push_back(value);
    }
  }

  // Expected direction: error grows with distance/absorption/target count
  // and shrinks with SNR. Small slack absorbs Monte Carlo wiggle.
  const bool decreasing = axis == "snr";
  result.trend_nondecreasing = true;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    const double prev = medians[i - 1];
    const double next = medians[i];
    const double slack = std::max(0.05 * std::max(prev, next), 0.5);
    const bool ok = decreasing ? next <= prev + slack : next >= prev - slack;
    if (!ok) result.trend_nondecreasing = false;
  }
  return result;
}

CompareResult compare_report(const ScenarioConfig& cfg,
                             const std::vector<MethodSpec>& methods) {
  if (methods.size() < 2)
    throw ConfigError("compare.methods", "need at least two methods");
  CompareResult result;
  for (const MethodSpec& m : methods) {
    ScenarioConfig method_cfg = cfg;
    method_cfg.method = m;
    const ScenarioResult r = run_scenario(method_cfg);
    CompareEntry entry;
    entry.method = m;
    entry.median_err_cm = r.median_err_cm;
    entry.mean_err_cm = r.mean_err_cm;
    result.entries.push_back(entry);
    const std::string name = to_string(m.modulation) + "+" + to_string(m.estimator);
    for (const TrialRecord& rec : r.trials) {
      result.all_trials.push_back(rec);
      result.method_names.push_back(name);
    }
  }
  return result;
}

std::string trials_to_csv(const std::vector<TrialRecord>& trials,
                          const std::vector<std::string>* method_col,
                          const std::vector<double>* value_col) {
  if (method_col != nullptr && method_col->size() != trials.size())
    throw std::invalid_argument("method column length mismatch");
  if (value_col != nullptr && value_col->size() != trials.size())
    throw std::invalid_argument("value column length mismatch");

  std::string out;
  if (method_col != nullptr) out += "method,";
  if (value_col != nullptr) out += "value,";
  out +=
      "trial,target_id,truth_x_m,truth_y_m,est_x_m,est_y_m,"
      "err_x_cm,err_y_cm,err_euclid_cm,verdict,anchors_used,residual,"
      "converged\n";
  char buf[512];
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const TrialRecord& r = trials[i];
    if (method_col != nullptr) out += (*method_col)[i] + ",";
    if (value_col != nullptr) {
      std::snprintf(buf, sizeof(buf), "%.6f,", (*value_col)[i]);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "%d,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%s,%d,%.9g,%d\n",
                  r.trial, r.target_id.c_str(), r.truth_x, r.truth_y, r.est_x,
                  r.est_y, r.err_x_cm, r.err_y_cm, r.err_euclid_cm,
                  to_string(r.verdict).c_str(), r.anchors_used, r.residual,
                  r.converged ? 1 : 0);
    out += buf;
  }
  return out;
}

std::string scenario_summary_csv(const ScenarioResult& result) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "trials,median_err_cm,mean_err_cm\n%d,%.6f,%.6f\n",
                static_cast<int>(result.trials.size()), result.median_err_cm,
                result.mean_err_cm);
  return buf;
}

std::string sweep_summary_csv(const SweepResult& result) {
  std::string out = "axis,value,trials,median_err_cm,mean_err_cm\n";
  char buf[224];
  for (const SweepPoint& p : result.points) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%d,%.6f,%.6f\n",
                  result.axis.c_str(), p.value, p.trials, p.median_err_cm,
                  p.mean_err_cm);
    out += buf;
  }
  return out;
}

std::string compare_summary_csv(const CompareResult& result) {
  std::string out = "method,median_err_cm,mean_err_cm\n";
  char buf[192];
  for (const CompareEntry& e : result.entries) {
    std::snprintf(buf, sizeof(buf), "%s+%s,%.6f,%.6f\n",
                  to_string(e.method.modulation).c_str(),
                  to_string(e.method.estimator).c_str(), e.median_err_cm,
                  e.mean_err_cm);
    out += buf;
  }
  return out;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path, msg);
}

void check_keys(const njson& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) fail(path + "." + it.key(), "unknown field");
  }
}

double as_num(const njson& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const njson& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::uint64_t as_u64(const njson& j, const std::string& path) {
  if (!j.is_number_unsigned() && !j.is_number_integer())
    fail(path, "expected a non-negative integer");
  const auto v = j.get<std::int64_t>();
  if (v < 0) fail(path, "expected a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

bool as_bool(const njson& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

std::string as_str(const njson& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Point2D as_point(const njson& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2)
    fail(path, "expected [x, y]");
  return {as_num(j[0], path + "[0]"), as_num(j[1], path + "[1]")};
}

void parse_scene(const njson& j, const std::string& path, Scene* scene) {
  check_keys(j, path, {"radar", "reflectors", "obstacles", "targets"});
  if (j.contains("radar")) scene->radar = as_point(j["radar"], path + ".radar");
  if (j.contains("reflectors")) {
    const njson& arr = j["reflectors"];
    if (!arr.is_array()) fail(path + ".reflectors", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string rp = path + ".reflectors[" + std::to_string(i) + "]";
      const njson& rj = arr[i];
      if (!rj.is_object()) fail(rp, "expected an object");
      check_keys(rj, rp, {"a", "b", "scatter", "absorption"});
      Reflector r;
      if (!rj.contains("a") || !rj.contains("b"))
        fail(rp, "needs endpoints 'a' and 'b'");
      r.endpoint_a = as_point(rj["a"], rp + ".a");
      r.endpoint_b = as_point(rj["b"], rp + ".b");
      if (rj.contains("scatter")) r.scatter_coeff = as_num(rj["scatter"], rp + ".scatter");
      if (rj.contains("absorption"))
        r.absorption = as_num(rj["absorption"], rp + ".absorption");
      scene->reflectors.push_back(r);
    }
  }
  if (j.contains("obstacles")) {
    const njson& arr = j["obstacles"];
    if (!arr.is_array()) fail(path + ".obstacles", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string op = path + ".obstacles[" + std::to_string(i) + "]";
      const njson& oj = arr[i];
      if (!oj.is_object()) fail(op, "expected an object");
      check_keys(oj, op, {"a", "b"});
      if (!oj.contains("a") || !oj.contains("b"))
        fail(op, "needs endpoints 'a' and 'b'");
      scene->obstacles.push_back(
          {as_point(oj["a"], op + ".a"), as_point(oj["b"], op + ".b")});
    }
  }
  if (j.contains("targets")) {
    const njson& arr = j["targets"];
    if (!arr.is_array()) fail(path + ".targets", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string tp = path + ".targets[" + std::to_string(i) + "]";
      const njson& tj = arr[i];
      if (!tj.is_object()) fail(tp, "expected an object");
      check_keys(tj, tp, {"id", "position"});
      Target t;
      if (!tj.contains("id") || !tj.contains("position"))
        fail(tp, "needs 'id' and 'position'");
      t.id = as_str(tj["id"], tp + ".id");
      t.position = as_point(tj["position"], tp + ".position");
      scene->targets.push_back(t);
    }
  }
}

Modulation parse_modulation(const std::string& s, const std::string& path) {
  if (s == "hfd") return Modulation::kHfd;
  if (s == "dsss_only" || s == "dsss") return Modulation::kDsssOnly;
  if (s == "fsk") return Modulation::kFsk;
  fail(path, "unknown modulation '" + s + "' (hfd | dsss_only | fsk)");
}

Estimator parse_estimator(const std::string& s, const std::string& path) {
  if (s == "fs_music") return Estimator::kFsMusic;
  if (s == "music") return Estimator::kMusic;
  fail(path, "unknown estimator '" + s + "' (fs_music | music)");
}

}  // namespace

ScenarioConfig parse_config_json(const std::string& json_text) {
  njson j;
  try {
    j = njson::parse(json_text);
  } catch (const njson::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("$", "top level must be an object");
  check_keys(j, "$",
             {"scene", "radar", "array", "code", "hops", "schedule", "grid",
              "receiver", "method", "snr_db", "trials", "seed", "repetitions",
              "nominal_distance_m", "sigma_override"});

  ScenarioConfig cfg;
  if (j.contains("scene")) {
    if (!j["scene"].is_object()) throw ConfigError("scene", "expected an object");
    parse_scene(j["scene"], "scene", &cfg.scene);
  }
  if (j.contains("radar")) {
    const njson& r = j["radar"];
    if (!r.is_object()) throw ConfigError("radar", "expected an object");
    check_keys(r, "radar",
               {"carrier_hz", "bandwidth_hz", "chirp_time_s",
                "chirps_per_frame", "sample_rate_hz"});
    if (r.contains("carrier_hz"))
      cfg.fmcw.carrier_hz = as_num(r["carrier_hz"], "radar.carrier_hz");
    if (r.contains("bandwidth_hz"))
      cfg.fmcw.bandwidth_hz = as_num(r["bandwidth_hz"], "radar.bandwidth_hz");
    if (r.contains("chirp_time_s"))
      cfg.fmcw.chirp_t_s = as_num(r["chirp_time_s"], "radar.chirp_time_s");
    if (r.contains("chirps_per_frame"))
      cfg.fmcw.chirps_per_frame =
          as_int(r["chirps_per_frame"], "radar.chirps_per_frame");
    if (r.contains("sample_rate_hz"))
      cfg.fmcw.sample_rate_hz = as_num(r["sample_rate_hz"], "radar.sample_rate_hz");
  }
  if (j.contains("array")) {
    const njson& a = j["array"];
    if (!a.is_object()) throw ConfigError("array", "expected an object");
    check_keys(a, "array", {"n_elements", "spacing_m"});
    if (a.contains("n_elements"))
      cfg.array.n_elements = as_int(a["n_elements"], "array.n_elements");
    if (a.contains("spacing_m"))
      cfg.array.spacing_m = as_num(a["spacing_m"], "array.spacing_m");
  }
  if (j.contains("code")) {
    const njson& c = j["code"];
    if (!c.is_object()) throw ConfigError("code", "expected an object");
    check_keys(c, "code", {"length", "family_seed", "samples_per_chip"});
    if (c.contains("length")) cfg.code.length = as_int(c["length"], "code.length");
    if (c.contains("family_seed"))
      cfg.code.family_seed = as_u64(c["family_seed"], "code.family_seed");
    if (c.contains("samples_per_chip"))
      cfg.code.samples_per_chip =
          as_int(c["samples_per_chip"], "code.samples_per_chip");
    if (cfg.code.samples_per_chip < 1)
      throw ConfigError("code.samples_per_chip", "must be >= 1");
  }
  if (j.contains("hops")) {
    const njson& h = j["hops"];
    if (!h.is_object()) throw ConfigError("hops", "expected an object");
    check_keys(h, "hops",
               {"channels_hz", "seed", "dsss_carrier_hz", "fsk_toggle_hz"});
    if (h.contains("channels_hz")) {
      const njson& ch = h["channels_hz"];
      if (!ch.is_array() || ch.empty())
        throw ConfigError("hops.channels_hz", "expected a non-empty array");
      cfg.hops.channels_hz.clear();
      for (std::size_t i = 0; i < ch.size(); ++i)
        cfg.hops.channels_hz.push_back(
            as_num(ch[i], "hops.channels_hz[" + std::to_string(i) + "]"));
    }
    if (h.contains("seed")) cfg.hops.seed = as_u64(h["seed"], "hops.seed");
    if (h.contains("dsss_carrier_hz"))
      cfg.hops.dsss_carrier_hz = as_num(h["dsss_carrier_hz"], "hops.dsss_carrier_hz");
    if (h.contains("fsk_toggle_hz"))
      cfg.hops.fsk_toggle_hz = as_num(h["fsk_toggle_hz"], "hops.fsk_toggle_hz");
  }
  if (j.contains("schedule")) {
    const njson& s = j["schedule"];
    if (!s.is_object()) throw ConfigError("schedule", "expected an object");
    check_keys(s, "schedule", {"tlc_s", "rlc_s"});
    if (s.contains("tlc_s"))
      cfg.schedule.tlc_duration_s = as_num(s["tlc_s"], "schedule.tlc_s");
    if (s.contains("rlc_s"))
      cfg.schedule.rlc_duration_s = as_num(s["rlc_s"], "schedule.rlc_s");
  }
  if (j.contains("grid")) {
    const njson& g = j["grid"];
    if (!g.is_object()) throw ConfigError("grid", "expected an object");
    check_keys(g, "grid",
               {"d_min_m", "d_max_m", "d_step_m", "eta_min_deg", "eta_max_deg",
                "eta_step_deg"});
    if (g.contains("d_min_m")) cfg.grid.d_min_m = as_num(g["d_min_m"], "grid.d_min_m");
    if (g.contains("d_max_m")) cfg.grid.d_max_m = as_num(g["d_max_m"], "grid.d_max_m");
    if (g.contains("d_step_m"))
      cfg.grid.d_step_m = as_num(g["d_step_m"], "grid.d_step_m");
    if (g.contains("eta_min_deg"))
      cfg.grid.eta_min_rad = deg2rad(as_num(g["eta_min_deg"], "grid.eta_min_deg"));
    if (g.contains("eta_max_deg"))
      cfg.grid.eta_max_rad = deg2rad(as_num(g["eta_max_deg"], "grid.eta_max_deg"));
    if (g.contains("eta_step_deg"))
      cfg.grid.eta_step_rad = deg2rad(as_num(g["eta_step_deg"], "grid.eta_step_deg"));
  }
  if (j.contains("receiver")) {
    const njson& r = j["receiver"];
    if (!r.is_object()) throw ConfigError("receiver", "expected an object");
    check_keys(r, "receiver",
               {"range_tol_m", "angle_tol_deg", "match_angle_tol_deg",
                "peak_median_db", "gap_ratio", "max_lag", "dealias"});
    if (r.contains("range_tol_m"))
      cfg.receiver.range_tol_m = as_num(r["range_tol_m"], "receiver.range_tol_m");
    if (r.contains("angle_tol_deg"))
      cfg.receiver.angle_tol_rad =
          deg2rad(as_num(r["angle_tol_deg"], "receiver.angle_tol_deg"));
    if (r.contains("match_angle_tol_deg"))
      cfg.receiver.match_angle_tol_rad =
          deg2rad(as_num(r["match_angle_tol_deg"], "receiver.match_angle_tol_deg"));
    if (r.contains("peak_median_db"))
      cfg.receiver.peak_median_db =
          as_num(r["peak_median_db"], "receiver.peak_median_db");
    if (r.contains("gap_ratio"))
      cfg.receiver.gap_ratio = as_num(r["gap_ratio"], "receiver.gap_ratio");
    if (r.contains("max_lag"))
      cfg.receiver.max_lag = as_int(r["max_lag"], "receiver.max_lag");
    if (r.contains("dealias"))
      cfg.receiver.dealias_with_periodogram = as_bool(r["dealias"], "receiver.dealias");
  }
  if (j.contains("method")) {
    const njson& m = j["method"];
    if (!m.is_object()) throw ConfigError("method", "expected an object");
    check_keys(m, "method", {"modulation", "estimator"});
    if (m.contains("modulation"))
      cfg.method.modulation =
          parse_modulation(as_str(m["modulation"], "method.modulation"),
                           "method.modulation");
    if (m.contains("estimator"))
      cfg.method.estimator = parse_estimator(
          as_str(m["estimator"], "method.estimator"), "method.estimator");
  }
  if (j.contains("snr_db") && !j["snr_db"].is_null())
    cfg.snr_db = as_num(j["snr_db"], "snr_db");
  if (j.contains("trials")) {
    cfg.trials = as_int(j["trials"], "trials");
    if (cfg.trials < 1) throw ConfigError("trials", "must be at least 1");
  }
  if (j.contains("seed")) cfg.seed = as_u64(j["seed"], "seed");
  if (j.contains("repetitions")) {
    cfg.repetitions = as_int(j["repetitions"], "repetitions");
    if (cfg.repetitions < 1) throw ConfigError("repetitions", "must be at least 1");
  }
  if (j.contains("nominal_distance_m"))
    cfg.nominal_distance_m = as_num(j["nominal_distance_m"], "nominal_distance_m");
  if (j.contains("sigma_override") && !j["sigma_override"].is_null()) {
    const double s = as_num(j["sigma_override"], "sigma_override");
    if (s < 0) throw ConfigError("sigma_override", "must be >= 0");
    cfg.sigma_override = s;
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

}  // namespace nlosim
