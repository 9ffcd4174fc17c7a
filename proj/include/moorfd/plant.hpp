#pragma once

#include "moorfd/hydro.hpp"
#include "moorfd/mooring.hpp"
#include "moorfd/state_space.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace moorfd::plant {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

enum class AeroSurface { Heier, Constant };

struct RotorParams {
  double radius = 89.15;        // [m]
  double hub_height = 119.0;    // above SWL [m]
  double j_r = 1.56e8;          // rotor inertia [kg m^2]
  double j_g = 1500.0;          // generator inertia [kg m^2]
  double tau = 50.0;            // gearbox ratio [-]
  double rated_speed = 9.6 * 2.0 * 3.14159265358979323846 / 60.0;  // [rad/s]
  double rated_power = 10.0e6;  // [W]
  AeroSurface surface = AeroSurface::Heier;
  double cq_constant = 0.0;  // used by AeroSurface::Constant
  double ct_constant = 0.0;

  [[nodiscard]] double inertia() const { return j_r + tau * tau * j_g; }
  [[nodiscard]] double rated_gen_torque() const {
    return rated_power / (tau * rated_speed);
  }
};

struct ControllerParams {
  double kp = 0.0;          // [rad / (rad/s)]
  double ki = 0.0;          // [rad / rad]
  double theta_op = 0.0;    // operating-point pitch [rad]
  double pitch_min = 0.0;   // [rad]
  double pitch_max = 1.5707963267948966;
  double pitch_rate = 8.0 * 3.14159265358979323846 / 180.0;  // [rad/s]
};

struct PlantParams {
  Matrix6d m_rb = Matrix6d::Zero();
  Matrix6d k_hydrostatic = Matrix6d::Zero();
  Matrix6d a_inf = Matrix6d::Zero();
  /// Linear viscous damping of the hull.
  Matrix6d b_viscous = Matrix6d::Zero();
  RotorParams rotor;
  ControllerParams controller;
  double rho_air = 1.225;
  double rho_water = 1025.0;
  double gravity = 9.81;
  std::vector<mooring::MooringLineParams> lines;
  sysid::StateSpaceModel truth_radiation;  // continuous, xi_dot -> mu
  sysid::StateSpaceModel truth_wave;       // continuous, eta -> force
  bool aero_enabled = true;
  bool controller_enabled = true;
  /// Buoyancy surplus that balances the mooring pretension at xi = 0.
  Vector6d buoyancy_offset = Vector6d::Zero();

  void validate() const;
  [[nodiscard]] Matrix6d generalized_mass() const { return m_rb + a_inf; }
};

/// Platform and rotor defaults of the 10 MW semi-submersible surrogate.
PlantParams default_plant_params();
/// Default platform and rotor with the given mooring; the platform mass is
/// rebalanced so the design position stays in static equilibrium.
PlantParams make_plant_params(std::vector<mooring::MooringLineParams> lines);

struct AeroLoads {
  double q_aero = 0.0;  // [N m]
  double thrust = 0.0;  // [N]
  bool clamped = false;
};

double power_coefficient(double lambda, double pitch);
double thrust_coefficient(double lambda, double pitch);
AeroLoads aero_loads(double v_rel, double omega_rotor, double pitch,
                     const RotorParams& rotor, double rho_air);

struct ControllerState {
  double integrator = 0.0;
};

struct ControlOutput {
  double pitch_cmd = 0.0;
  double q_g = 0.0;
  ControllerState state;
};

ControlOutput control_step(double omega_rotor, double dt, const ControllerState& s,
                           const PlantParams& p);

struct Equilibrium {
  double v_wind = 0.0;
  Vector6d xi = Vector6d::Zero();
  double omega = 0.0;
  double pitch = 0.0;
  double q_g = 0.0;
  double q_aero = 0.0;
  double thrust = 0.0;
  std::vector<double> tensions;
};

Equilibrium find_equilibrium(double v_wind, const PlantParams& p);

struct PlantState {
  Vector6d xi = Vector6d::Zero();
  Vector6d xi_dot = Vector6d::Zero();
  double omega_rotor = 0.0;
  double azimuth = 0.0;
  Eigen::VectorXd x_rad;
  Eigen::VectorXd x_wave;
  double pitch_actual = 0.0;
  ControllerState ctrl;
  std::vector<mooring::LineState> line_states;
};

struct NoiseSpec {
  double omega_rotor = 0.005;  // [rad/s]
  double surge = 0.02;         // [m]
  double pitch = 0.001;        // [rad]
};

struct RunRecord {
  double dt_out = 0.1;
  std::vector<double> t;
  Eigen::MatrixXd u;        // 4 x N: pitch, wind, generator torque, eta
  Eigen::MatrixXd y;        // 3 x N measured: rotor speed, surge, platform pitch
  Eigen::MatrixXd y_clean;  // 3 x N noise-free
  Eigen::MatrixXd tensions; // lines x N
  std::vector<mooring::FaultEvent> fault_log;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t size() const { return t.size(); }
};

struct SimOptions {
  double dt_in = 0.025;
  double dt_out = 0.1;
};

/// Truth simulation from the equilibrium at `v_wind`.
RunRecord simulate_plant(const PlantParams& p, const hydro::WaveRealization& wave,
                         double v_wind, double duration,
                         const std::vector<mooring::FaultEvent>& faults,
                         const NoiseSpec& noise, std::uint64_t noise_seed,
                         const SimOptions& opts = {});

/// Same as simulate_plant from an explicit initial state.
RunRecord simulate_plant_from(const PlantParams& p, PlantState state,
                              const hydro::WaveRealization& wave, double v_wind,
                              double duration,
                              const std::vector<mooring::FaultEvent>& faults,
                              const NoiseSpec& noise, std::uint64_t noise_seed,
                              const SimOptions& opts = {});

PlantState equilibrium_state(const PlantParams& p, const Equilibrium& eq);

/// Kinetic plus potential energy of the platform for the linear restoring
/// terms (used for integrator checks with aero and mooring disabled).
double platform_energy(const PlantParams& p, const PlantState& s);

void write_run_csv(const RunRecord& r, const std::filesystem::path& path);

}  // namespace moorfd::plant
