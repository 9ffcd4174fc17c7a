#pragma once

#include "moorfd/hydro.hpp"
#include "moorfd/state_space.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace moorfd::sysid {

/// Sampled pulse response: sample i sits at time (first_index + i) * dt and
/// holds dt times the continuous kernel value there, so that sample 0 of a
/// causal response is the feedthrough D and sample k >= 1 is C A^(k-1) B.
struct ImpulseResponse {
  double dt = 0.1;
  int first_index = 0;
  std::vector<Eigen::MatrixXd> h;
  /// Accumulated forward shift applied by causalize() [s].
  double t_shift = 0.0;

  [[nodiscard]] int outputs() const { return h.empty() ? 0 : int(h[0].rows()); }
  [[nodiscard]] int inputs() const { return h.empty() ? 0 : int(h[0].cols()); }
  [[nodiscard]] double time(std::size_t i) const {
    return dt * (first_index + static_cast<int>(i));
  }
  /// Sample at time k * dt, zero outside the stored range.
  [[nodiscard]] Eigen::MatrixXd at_index(int k) const;
  /// Samples at t >= 0 (index 0 is t = 0), zero-filled if the record
  /// starts after t = 0.
  [[nodiscard]] std::vector<Eigen::MatrixXd> causal_part() const;
  void validate() const;
};

struct FitReport {
  int requested_order = 0;
  int order = 0;
  Eigen::VectorXd hinf_rel;  // per output channel, over the report band
  double h2_rel = 0.0;
  bool stable = false;
  bool rank_reduced = false;
  int reflected_modes = 0;
  bool converged = true;
  int iterations = 0;
  double fit_error_initial = 0.0;  // relative RMS fitting error
  double fit_error_final = 0.0;
  double noncausal_ratio = 0.0;
  double t_shift = 0.0;

  [[nodiscard]] double hinf_max() const;
  /// Flat key=value text, one entry per line.
  [[nodiscard]] std::string to_text() const;
};

struct FitResult {
  StateSpaceModel model;
  FitReport report;
};

/// Channel selection on the 6 platform DOFs (surge, sway, heave, roll,
/// pitch, yaw).
using DofMask = std::array<bool, 6>;
inline constexpr DofMask kPlanarDofs{true, false, true, false, true, false};
inline constexpr DofMask kOutOfPlaneDofs{false, true, false, true, false, true};
std::vector<int> dof_indices(const DofMask& mask);

/// K(w) = B(w) + j w (A(w) - A_inf) on the dataset grid.
Frf ogilvie_frf(const hydro::HydroFrd& frd);

enum class KernelKind {
  /// Real causal kernel from the cosine transform of Re K(w).
  Radiation,
  /// Real two-sided kernel from the Hermitian-extended inverse transform.
  WaveForce,
};

/// Time-domain kernel by trapezoidal quadrature over a uniform grid. The
/// radiation kind covers [0, duration]; the wave kind covers
/// [-duration, duration]. Throws ConfigError when pi / dt < max(omega).
ImpulseResponse impulse_response_from_frd(const Frf& frf,
                                          std::span<const double> omega,
                                          double dt, double duration,
                                          KernelKind kind);

/// Shifts the response forward by t_d (may be negative); exact bookkeeping.
ImpulseResponse shift_impulse_response(const ImpulseResponse& h, double t_d);
/// Forward shift by t_d >= 0, grid-aligned, otherwise ConfigError.
ImpulseResponse causalize(const ImpulseResponse& h, double t_d);
/// max |h(t < 0)| / max |h| (Frobenius norm per sample).
double noncausal_ratio(const ImpulseResponse& h);

struct ShiftScanEntry {
  double t_d;
  double ratio;
};
std::vector<ShiftScanEntry> scan_causal_shift(const ImpulseResponse& h,
                                              std::span<const double> t_d);

struct EraOptions {
  int block_rows = 0;  // 0: automatic
  int block_cols = 0;  // 0: automatic
  double rank_tol = 1e-10;
  double radius_clamp = 0.999;
};

/// Eigensystem realization from the block-Hankel matrix of the response.
FitResult fit_state_space_era(const ImpulseResponse& h, int order,
                              const EraOptions& opts = {});

/// Input/output record for prediction-error refinement (zero initial state).
struct IoData {
  double dt = 0.1;
  Eigen::MatrixXd u;  // m x N
  Eigen::MatrixXd y;  // p x N
};

struct PemOptions {
  int max_iter = 50;
  double tol = 1e-10;
};

/// Damped Gauss-Newton refinement of (A, B, C) with D held fixed. Never
/// returns a model with a larger fitting error than `init`, and never an
/// unstable one.
FitResult pem_refine(const StateSpaceModel& init,
                     const std::variant<ImpulseResponse, IoData>& data,
                     const PemOptions& opts = {});

/// Relative RMS output error of a model on the given data.
double fitting_error(const StateSpaceModel& m,
                     const std::variant<ImpulseResponse, IoData>& data);

struct IdentOptions {
  double dt = 0.1;
  double kernel_duration = 120.0;
  double band_min = 0.3;
  double band_max = 1.8;
  EraOptions era;
  PemOptions pem;
};

/// Radiation memory model from xi_dot to mu on the selected DOFs.
FitResult fit_radiation_model(const hydro::HydroFrd& frd, int order,
                              const DofMask& dofs,
                              const IdentOptions& opts = {});

/// Wave-excitation model from eta to the selected DOF forces, including the
/// forward shift t_d and the differentiator stage.
FitResult fit_wave_force_model(const hydro::HydroFrd& frd, int order,
                               double t_d, const DofMask& dofs,
                               const IdentOptions& opts = {});

}  // namespace moorfd::sysid
