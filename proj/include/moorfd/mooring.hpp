#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace moorfd::mooring {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

struct MooringLineParams {
  Eigen::Vector3d anchor = Eigen::Vector3d::Zero();         // earth frame [m]
  Eigen::Vector3d fairlead_body = Eigen::Vector3d::Zero();  // platform frame [m]
  double length_unstretched = 707.0;                        // [m]
  double weight_submerged = 0.0;                            // [N/m]
  double ea = 0.0;                                          // [N]
  double water_depth = 180.0;                               // [m]

  void validate() const;
};

enum class LineMode { Healthy, FairleadReleased, AnchorSlipped };

struct LineState {
  LineMode mode = LineMode::Healthy;
  double effective_length = 0.0;  // [m]
  double last_tension_fairlead = 0.0;  // [N]
};

enum class FaultKind { FairleadRelease, AnchorSlip };

struct FaultEvent {
  FaultKind kind = FaultKind::FairleadRelease;
  int line_index = 1;  // 1-based
  double time = 0.0;   // [s]
  double theta_x = 0.0;  // 0 for release; new effective length [m] for slip
};

std::string to_string(FaultKind k);
FaultKind parse_fault_kind(const std::string& s);

struct CatenarySolution {
  double h = 0.0;  // horizontal tension at the fairlead [N]
  double v = 0.0;  // vertical tension at the fairlead [N]
  double tension = 0.0;
  double seabed_length = 0.0;  // unstretched length resting on the seabed [m]
};

/// Elastic catenary with frictionless seabed contact for a horizontal span
/// `x` and a vertical span `z` (fairlead above anchor). Throws
/// NumericalError when no solution exists in the bracket.
CatenarySolution solve_catenary_span(double x, double z, double length,
                                     double w, double ea);
CatenarySolution solve_catenary(const MooringLineParams& line,
                                const Eigen::Vector3d& fairlead_earth,
                                double length_override = 0.0);

/// Rotation from platform to earth frame for (roll, pitch, yaw).
Eigen::Matrix3d rotation(double roll, double pitch, double yaw);
Eigen::Vector3d fairlead_position(const MooringLineParams& line, const Vector6d& pose);

struct MooringLoads {
  Vector6d force = Vector6d::Zero();
  std::vector<double> tensions;
};

/// Force and moment about the platform reference point (SWL origin).
MooringLoads mooring_loads(const Vector6d& pose,
                           const std::vector<MooringLineParams>& lines,
                           const std::vector<LineState>& states);
Vector6d mooring_force(const Vector6d& pose,
                       const std::vector<MooringLineParams>& lines,
                       const std::vector<LineState>& states);

/// Central-difference stiffness with F ~ F0 - K dxi.
Matrix6d linearize_mooring_stiffness(const std::vector<MooringLineParams>& lines,
                                     const std::vector<LineState>& states,
                                     const Vector6d& pose, double delta = 1e-3);

std::vector<LineState> healthy_states(const std::vector<MooringLineParams>& lines);

/// Applies the event when t_now >= event.time; repeated calls are no-ops.
std::vector<LineState> apply_mooring_fault(std::vector<LineState> states,
                                           const FaultEvent& event, double t_now);

/// Radially symmetric layout; angles are measured from the upwind (-x)
/// direction, counterclockwise seen from above.
struct MooringLayout {
  double anchor_radius = 599.98;   // [m]
  double anchor_depth = 180.0;     // [m]
  double fairlead_radius = 47.181; // [m]
  double fairlead_height = 8.7;    // above SWL [m]
  double length = 707.0;           // unstretched [m]
  double mass_per_length = 594.0;  // in air [kg/m]
  double diameter = 0.18;          // chain-equivalent [m]
  double ea = 2.77e9;              // [N]
  std::vector<double> angles_deg{0.0, 120.0, 240.0};
};

std::vector<MooringLineParams> make_lines(const MooringLayout& layout, double rho_water = 1025.0,
                                          double g = 9.81);
/// make_lines with the default layout.
std::vector<MooringLineParams> default_lines();
/// Submerged weight per length from the in-air mass and the line diameter.
double submerged_weight(double mass_per_length, double diameter,
                        double rho_water = 1025.0, double g = 9.81);

}  // namespace moorfd::mooring
