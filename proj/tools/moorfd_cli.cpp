// Command-line front end for the mooring fault-detection workbench.

#include "moorfd/config.hpp"
#include "moorfd/csv.hpp"
#include "moorfd/errors.hpp"
#include "moorfd/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitGate = 4;

using namespace moorfd;

void print_case(const pipeline::ScenarioOutcome& o) {
  std::cout << "case " << o.load_case << ": detected=" << (o.detected ? "yes" : "no")
            << " delay=" << (o.delay ? csv::sig(*o.delay, 4) + " s" : std::string("-"))
            << " far=" << csv::sig(o.far, 4) << " threshold=" << csv::sig(o.threshold, 5)
            << " gate=" << o.gate_note << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mooring-line fault detection for a floating wind turbine"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::int64_t> seed;
  bool parallel = false;
  app.add_option("--config", config_path, "INI configuration file (defaults when omitted)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
  app.add_option("--seed", seed, "scenario seed: waves use N, sensor noise N + 1")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--parallel", parallel, "run batch scenarios concurrently");

  auto* identify = app.add_subcommand("identify", "fit radiation and wave-force models");
  auto* calibrate = app.add_subcommand("calibrate", "design the observer and detection threshold");
  auto* run = app.add_subcommand("run", "simulate one load case and run the detector");
  int load_case = 0;
  run->add_option("--case", load_case, "load case (0 = healthy)")->required();
  auto* batch = app.add_subcommand("batch", "run the healthy case and all fault cases");
  auto* wave = app.add_subcommand("wave-export", "write the scenario wave elevation");
  auto* frd = app.add_subcommand("frd-synth", "write the synthetic hydrodynamic dataset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; malformed command lines are config errors.
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    config::RunConfig cfg =
        config_path.empty() ? config::default_config() : config::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed) {
      cfg.seeds.scenario_wave = static_cast<std::uint64_t>(*seed);
      cfg.seeds.scenario_noise = static_cast<std::uint64_t>(*seed) + 1;
    }
    cfg.validate();
    const pipeline::Paths paths{cfg.output_dir};

    if (identify->parsed()) {
      const auto o = pipeline::cmd_identify(cfg, paths);
      std::cout << "radiation (surge/heave/pitch) band error "
                << csv::sig(o.models.rad_planar.report.hinf_max(), 4) << "\n"
                << "radiation (sway/roll/yaw) band error "
                << csv::sig(o.models.rad_out_of_plane.report.hinf_max(), 4) << "\n"
                << "wave force band error " << csv::sig(o.models.wave.report.hinf_max(), 4)
                << "\nreport: " << paths.fit_report().string() << '\n';
      if (!o.targets_met) std::cout << "note: band-error targets not met\n";
    } else if (calibrate->parsed()) {
      const auto o = pipeline::cmd_calibrate(cfg, paths);
      std::cout << "threshold " << csv::sig(o.cal.det.threshold, 6) << " (alpha "
                << o.cal.det.alpha << ", mean_d " << csv::sig(o.cal.det.mean_d, 5) << ", std_d "
                << csv::sig(o.cal.det.std_d, 5) << ")\ntracking nrmse omega/surge/pitch "
                << csv::sig(o.tracking(0), 4) << ' ' << csv::sig(o.tracking(1), 4) << ' '
                << csv::sig(o.tracking(2), 4) << "\ncalibration: "
                << paths.calibration().string() << '\n';
    } else if (run->parsed()) {
      const auto o = pipeline::cmd_run(cfg, paths, load_case);
      print_case(o);
      if (!o.gate_passed) return kExitGate;
    } else if (batch->parsed()) {
      const auto b = pipeline::cmd_batch(cfg, paths, parallel);
      for (const auto& o : b.cases) print_case(o);
      std::cout << "summary: " << paths.summary().string() << '\n';
      if (!b.gates_passed()) return kExitGate;
    } else if (wave->parsed()) {
      pipeline::cmd_wave_export(cfg, paths);
      std::cout << "wrote " << (paths.dir / "wave.csv").string() << '\n';
    } else if (frd->parsed()) {
      pipeline::cmd_frd_synth(cfg, paths);
      std::cout << "wrote " << (paths.dir / "frd.csv").string() << " and "
                << (paths.dir / "ainf.csv").string() << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
