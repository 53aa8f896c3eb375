#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlosim/harness.hpp"

namespace {

using nlosim::ScenarioConfig;

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::vector<nlosim::MethodSpec> parse_methods(const std::string& arg) {
  std::vector<nlosim::MethodSpec> methods;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto plus = item.find('+');
    if (plus == std::string::npos)
      throw nlosim::ConfigError("--methods",
                                "expected <modulation>+<estimator>: " + item);
    nlosim::MethodSpec m;
    const std::string mod = item.substr(0, plus);
    const std::string est = item.substr(plus + 1);
    if (mod == "hfd")
      m.modulation = nlosim::Modulation::kHfd;
    else if (mod == "dsss_only" || mod == "dsss")
      m.modulation = nlosim::Modulation::kDsssOnly;
    else if (mod == "fsk")
      m.modulation = nlosim::Modulation::kFsk;
    else
      throw nlosim::ConfigError("--methods", "unknown modulation: " + mod);
    if (est == "fs_music")
      m.estimator = nlosim::Estimator::kFsMusic;
    else if (est == "music")
      m.estimator = nlosim::Estimator::kMusic;
    else
      throw nlosim::ConfigError("--methods", "unknown estimator: " + est);
    methods.push_back(m);
  }
  return methods;
}

std::vector<double> parse_values(const std::string& arg) {
  std::vector<double> values;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw nlosim::ConfigError("--values", "not a number: " + item);
    }
  }
  return values;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::int64_t seed = -1;
  bool spectrum = false;
};

ScenarioConfig load_scenario(const CommonArgs& args) {
  ScenarioConfig cfg = nlosim::load_config(args.config_path);
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  return cfg;
}

void add_common(CLI::App* cmd, CommonArgs* args, bool with_spectrum) {
  cmd->add_option("--config", args->config_path, "scenario config (JSON)")
      ->required();
  cmd->add_option("--seed", args->seed, "override the config seed");
  cmd->add_option("--out", args->out_dir, "output directory (created)");
  if (with_spectrum)
    cmd->add_flag("--spectrum", args->spectrum,
                  "also write spectrum.csv (trial 0 spectrum)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated NLoS tag localization pipeline"};
  app.require_subcommand(1);

  CommonArgs sim_args, loc_args, sweep_args, cmp_args;
  std::string sweep_axis = "distance";
  std::string sweep_values = "2,3,5,7";
  std::string cmp_methods = "hfd+fs_music,dsss_only+music,fsk+music";

  CLI::App* sim = app.add_subcommand(
      "simulate", "Monte Carlo runs of the full pipeline on one scenario");
  add_common(sim, &sim_args, true);

  CLI::App* loc = app.add_subcommand(
      "locate", "single-trial pipeline pass with the spectrum written out");
  add_common(loc, &loc_args, true);

  CLI::App* swp =
      app.add_subcommand("sweep", "rerun the scenario across one axis");
  add_common(swp, &sweep_args, false);
  swp->add_option("--axis", sweep_axis,
                  "distance | snr | n_targets | absorption");
  swp->add_option("--values", sweep_values, "comma-separated axis values");

  CLI::App* cmp =
      app.add_subcommand("compare", "same scenario across method selectors");
  add_common(cmp, &cmp_args, false);
  cmp->add_option("--methods", cmp_methods,
                  "comma-separated <modulation>+<estimator> pairs");

  CLI11_PARSE(app, argc, argv);

  try {
    const CommonArgs* args = nullptr;
    if (sim->parsed()) args = &sim_args;
    if (loc->parsed()) args = &loc_args;
    if (swp->parsed()) args = &sweep_args;
    if (cmp->parsed()) args = &cmp_args;
    const std::filesystem::path out_dir(args->out_dir);
    std::filesystem::create_directories(out_dir);

    if (sim->parsed() || loc->parsed()) {
      ScenarioConfig cfg = load_scenario(*args);
      const bool want_spectrum = args->spectrum || loc->parsed();
      if (loc->parsed()) cfg.trials = 1;
      const nlosim::ScenarioResult result = nlosim::run_scenario(cfg);
      write_file(out_dir / "trials.csv", nlosim::trials_to_csv(result.trials));
      write_file(out_dir / "summary.csv", nlosim::scenario_summary_csv(result));
      if (want_spectrum && result.has_spectrum)
        write_file(out_dir / "spectrum.csv",
                   nlosim::spectrum_to_csv(result.first_spectrum));
      std::cerr << "median error: " << result.median_err_cm << " cm over "
                << result.trials.size() << " trials\n";
    } else if (swp->parsed()) {
      const ScenarioConfig cfg = load_scenario(*args);
      const nlosim::SweepResult result =
          nlosim::sweep(cfg, sweep_axis, parse_values(sweep_values));
      write_file(out_dir / "trials.csv",
                 nlosim::trials_to_csv(result.all_trials, nullptr,
                                       &result.point_values));
      write_file(out_dir / "summary.csv", nlosim::sweep_summary_csv(result));
      std::cerr << "sweep over " << sweep_axis << ": "
                << (result.trend_nondecreasing ? "trend as expected"
                                               : "trend violated")
                << "\n";
    } else if (cmp->parsed()) {
      const ScenarioConfig cfg = load_scenario(*args);
      const nlosim::CompareResult result =
          nlosim::compare_report(cfg, parse_methods(cmp_methods));
      write_file(out_dir / "trials.csv",
                 nlosim::trials_to_csv(result.all_trials, &result.method_names,
                                       nullptr));
      write_file(out_dir / "summary.csv", nlosim::compare_summary_csv(result));
      std::cerr << "compared " << result.entries.size() << " methods\n";
    }
  } catch (const nlosim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
