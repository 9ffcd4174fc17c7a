#pragma once

#include "moorfd/plant.hpp"
#include "moorfd/state_space.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace moorfd::linmodel {

using Matrix6d = Eigen::Matrix<double, 6, 6>;

struct AeroGradients {
  double dq_domega = 0.0;
  double dq_dpitch = 0.0;
  double dq_dv = 0.0;
  double dt_domega = 0.0;
  double dt_dpitch = 0.0;
  double dt_dv = 0.0;
  /// Set when dQ/dpitch >= 0 (not a pitch-to-feather operating point).
  bool sign_violation = false;
};

struct OperatingPoint {
  plant::Equilibrium eq;
  AeroGradients grad;
};

/// Central differences of the aerodynamic loads about the equilibrium. The
/// step is rel_step times the variable scale (rotor speed, max(|pitch|, 0.1
/// rad), wind speed).
AeroGradients linearize_aero(const plant::PlantParams& p, const plant::Equilibrium& eq,
                             double rel_step = 1e-4);

OperatingPoint make_operating_point(const plant::PlantParams& p, double v_wind,
                                    double rel_step = 1e-4);

/// Named contiguous state ranges of the assembled model.
struct Block {
  std::string name;
  int offset = 0;
  int size = 0;
};

struct AssembledModel {
  /// Continuous mechanical part: states [omega, xi_dot(6), xi(6)], inputs
  /// [pitch, wind, generator torque, generalized force(6)].
  sysid::StateSpaceModel ct;
  /// Discrete full model: states [omega, xi_dot, xi, x_r, x_w], inputs
  /// [pitch, wind, generator torque, eta], outputs [omega, surge, pitch].
  sysid::StateSpaceModel dt_model;
  Eigen::MatrixXd c_out;
  std::vector<Block> blocks;
  OperatingPoint op;
  /// Operating-point values subtracted from recorded inputs and outputs.
  Eigen::Vector4d u_op = Eigen::Vector4d::Zero();
  Eigen::Vector3d y_op = Eigen::Vector3d::Zero();
};

/// Lifts a model acting on a subset of DOFs to 6-DOF inputs and outputs.
/// Empty index lists keep the corresponding dimension as is.
sysid::StateSpaceModel expand_to_dofs(const sysid::StateSpaceModel& m,
                                      const std::vector<int>& input_dofs,
                                      const std::vector<int>& output_dofs);

/// Mechanical continuous model about the operating point.
sysid::StateSpaceModel mechanical_model(const OperatingPoint& op, const Matrix6d& k_moor,
                                        const plant::PlantParams& p);

/// Assembles the wave-excited model. rad_model: discrete, 6 xi_dot -> 6 mu;
/// wave_model: discrete, eta -> 6 forces; both at step dt. Either may be of
/// order zero.
AssembledModel assemble_linear_model(const OperatingPoint& op, const Matrix6d& k_moor,
                                     const sysid::StateSpaceModel& rad_model,
                                     const sysid::StateSpaceModel& wave_model,
                                     const plant::PlantParams& p, double dt);

/// Exact zero-order-hold discretization.
sysid::StateSpaceModel discretize_zoh(const sysid::StateSpaceModel& ct, double dt);

/// Deviation-form inputs (4 x N) and outputs (3 x N) of a run record.
Eigen::MatrixXd input_deviation(const AssembledModel& m, const plant::RunRecord& r);
Eigen::MatrixXd output_deviation(const AssembledModel& m, const Eigen::MatrixXd& y);

void write_block_map(const AssembledModel& m, const std::filesystem::path& path);

}  // namespace moorfd::linmodel
