#pragma once

#include "moorfd/hydro.hpp"
#include "moorfd/mooring.hpp"
#include "moorfd/plant.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace moorfd::config {

struct IdentSettings {
  int rad_order = 6;            // surge/heave/pitch radiation block
  int rad_order_out_of_plane = 4;  // sway/roll/yaw radiation block
  int wave_order = 8;
  double t_d = 4.0;             // causalizing shift [s]
  double kernel_duration = 120.0;
  double band_min = 0.3;        // [rad/s]
  double band_max = 1.8;
  /// Hydrodynamic dataset; synthesized from the truth models when empty.
  std::filesystem::path frd_csv;
  std::filesystem::path ainf_csv;
};

struct DetectSettings {
  double alpha = 6.0;
  int hold = 3;
  double warmup = 200.0;        // [s]
  double window_start = 200.0;  // baseline window [s]
  double window_end = 1400.0;
};

struct SeedSettings {
  std::uint64_t calibration_wave = 1;
  std::uint64_t calibration_noise = 2;
  std::uint64_t scenario_wave = 11;
  std::uint64_t scenario_noise = 12;
};

struct GateSettings {
  double max_delay = 30.0;  // [s]
  /// Defaults to 1 / alpha^2 when unset.
  std::optional<double> max_far;
  bool require_detection = true;
};

struct RunConfig {
  hydro::WaveSpec wave;
  double v_wind = 16.0;      // [m/s]
  double duration = 1600.0;  // [s]
  double dt = 0.1;           // output and detector step [s]
  double dt_in = 0.025;      // integrator step [s]
  plant::NoiseSpec noise;
  mooring::MooringLayout mooring;
  plant::RotorParams rotor;
  double kp = 0.6788;
  double ki = 0.05934;
  double pitch_rate_deg = 8.0;
  IdentSettings ident;
  DetectSettings detect;
  SeedSettings seeds;
  GateSettings gates;
  /// Fault events per load case (1-based case id); case 0 is healthy.
  std::map<int, std::vector<mooring::FaultEvent>> cases;
  std::filesystem::path output_dir = "out";

  void validate() const;
  [[nodiscard]] plant::PlantParams plant_params() const;
  [[nodiscard]] double far_gate() const;
};

/// Shipped defaults (identical to config/default.ini).
RunConfig default_config();

/// Parses an INI file on top of the defaults. Relative paths inside the file
/// resolve against its directory. Throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// Parses `kind,line,time,theta_x`.
mooring::FaultEvent parse_fault(const std::string& text);

}  // namespace moorfd::config
