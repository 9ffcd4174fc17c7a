#pragma once

#include "moorfd/config.hpp"
#include "moorfd/detect.hpp"
#include "moorfd/hydro.hpp"
#include "moorfd/linmodel.hpp"
#include "moorfd/plant.hpp"
#include "moorfd/sysid.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace moorfd::pipeline {

struct IdentifiedModels {
  sysid::FitResult rad_planar;
  sysid::FitResult rad_out_of_plane;
  sysid::FitResult wave;
  /// Radiation model lifted to 6 DOFs (xi_dot -> mu) and wave model lifted
  /// to 6 force outputs (eta -> F), both discrete at the detector step.
  sysid::StateSpaceModel rad6;
  sysid::StateSpaceModel wave6;
};

hydro::HydroFrd load_or_synthesize_frd(const config::RunConfig& cfg);
IdentifiedModels identify_models(const config::RunConfig& cfg, const hydro::HydroFrd& frd);

linmodel::AssembledModel build_linear_model(const config::RunConfig& cfg,
                                            const plant::PlantParams& p,
                                            const sysid::StateSpaceModel& rad6,
                                            const sysid::StateSpaceModel& wave6);

plant::RunRecord simulate(const config::RunConfig& cfg, const plant::PlantParams& p,
                          std::uint64_t wave_seed, std::uint64_t noise_seed,
                          const std::vector<mooring::FaultEvent>& faults);

/// RMSE between noise-free truth and the linear model driven by the recorded
/// inputs, divided by the standard deviation of the truth, per channel, over
/// [t0, t1].
Eigen::Vector3d tracking_nrmse(const linmodel::AssembledModel& m, const plant::RunRecord& run,
                               double t0, double t1, Eigen::MatrixXd* linear_out = nullptr);

struct Paths {
  std::filesystem::path dir;
  [[nodiscard]] std::filesystem::path rad_model() const { return dir / "rad_model.csv"; }
  [[nodiscard]] std::filesystem::path wave_model() const { return dir / "wave_model.csv"; }
  [[nodiscard]] std::filesystem::path fit_report() const { return dir / "fit_report.txt"; }
  [[nodiscard]] std::filesystem::path linear_model() const { return dir / "linear_model.csv"; }
  [[nodiscard]] std::filesystem::path block_map() const { return dir / "block_map.csv"; }
  [[nodiscard]] std::filesystem::path calibration() const { return dir / "calibration.csv"; }
  [[nodiscard]] std::filesystem::path calibration_report() const {
    return dir / "calibration_report.txt";
  }
  [[nodiscard]] std::filesystem::path tracking() const { return dir / "tracking.csv"; }
  [[nodiscard]] std::filesystem::path run_csv(int c) const {
    return dir / ("run_case" + std::to_string(c) + ".csv");
  }
  [[nodiscard]] std::filesystem::path detect_csv(int c) const {
    return dir / ("detect_case" + std::to_string(c) + ".csv");
  }
  [[nodiscard]] std::filesystem::path report(int c) const {
    return dir / ("report_case" + std::to_string(c) + ".txt");
  }
  [[nodiscard]] std::filesystem::path summary() const { return dir / "summary.csv"; }
};

struct IdentifyOutcome {
  IdentifiedModels models;
  bool targets_met = false;  // radiation <= 5 %, wave <= 8 % band error
};

IdentifyOutcome cmd_identify(const config::RunConfig& cfg, const Paths& out);

struct CalibrateOutcome {
  detect::Calibration cal;
  Eigen::Vector3d tracking = Eigen::Vector3d::Zero();
};

/// Uses the identify outputs in the output directory when present,
/// otherwise identifies first.
CalibrateOutcome cmd_calibrate(const config::RunConfig& cfg, const Paths& out);

struct ScenarioOutcome {
  int load_case = 0;
  bool detected = false;
  std::optional<double> delay;
  double far = 0.0;
  int confirmed_alarms = 0;
  int pre_fault_confirmed = 0;
  double threshold = 0.0;
  double alpha = 0.0;
  bool gate_passed = false;
  std::string gate_note;
  std::vector<std::filesystem::path> files;
};

/// Faults for a load case (empty for case 0). Throws ConfigError for an
/// unknown case.
std::vector<mooring::FaultEvent> case_faults(const config::RunConfig& cfg, int load_case);

ScenarioOutcome evaluate_case(const config::RunConfig& cfg, const detect::DetectorModel& det,
                              int load_case, const plant::PlantParams& p, const Paths* out);

/// Needs the calibration file.
ScenarioOutcome cmd_run(const config::RunConfig& cfg, const Paths& out, int load_case);

struct BatchOutcome {
  std::vector<ScenarioOutcome> cases;
  [[nodiscard]] bool gates_passed() const;
};

/// Runs case 0 and every configured fault case; calibrates first when the
/// calibration file is missing.
BatchOutcome cmd_batch(const config::RunConfig& cfg, const Paths& out, bool parallel);

void cmd_wave_export(const config::RunConfig& cfg, const Paths& out);
void cmd_frd_synth(const config::RunConfig& cfg, const Paths& out);

void write_summary(const BatchOutcome& b, const std::filesystem::path& path);

}  // namespace moorfd::pipeline
