#pragma once

#include "moorfd/state_space.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace moorfd::hydro {

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6cd = Eigen::Matrix<std::complex<double>, 6, 1>;

/// Irregular sea state on a linear angular-frequency grid.
struct WaveSpec {
  double hs = 2.66;         // significant wave height [m]
  double tp = 7.42;         // peak period [s]
  double gamma = 3.3;       // peak enhancement [-]
  double omega_min = 0.05;  // [rad/s]
  double omega_max = 3.0;   // [rad/s]
  int n_omega = 200;
  std::uint64_t seed = 1;

  void validate() const;
  [[nodiscard]] std::vector<double> grid() const;
  [[nodiscard]] double grid_step() const;
};

/// Sampled wave elevation eta(k dt), k = 0..n-1.
struct WaveRealization {
  double dt = 0.1;
  std::vector<double> eta;
  std::uint64_t seed = 0;

  [[nodiscard]] double duration() const {
    return eta.empty() ? 0.0 : dt * static_cast<double>(eta.size() - 1);
  }
  /// Linear interpolation between samples; clamps outside the record.
  [[nodiscard]] double at(double t) const;
};

/// Frequency-domain hydrodynamic coefficients of the floater.
struct HydroFrd {
  std::vector<double> omega;
  Matrix6d a_inf = Matrix6d::Zero();
  std::vector<Matrix6d> a_omega;
  std::vector<Matrix6d> b_omega;
  std::vector<Vector6cd> x_omega;

  [[nodiscard]] std::size_t size() const { return omega.size(); }
  /// Checks sizes, symmetry, damping PSD and wave-force high-frequency decay.
  void validate() const;
  /// True when omega is uniformly spaced (relative tolerance 1e-9).
  [[nodiscard]] bool uniform_grid() const;
};

/// JONSWAP density S(w) [m^2 s/rad] with alpha renormalized so that the
/// rectangle-rule variance on the spec grid equals (hs / 4)^2.
double jonswap_spectrum(const WaveSpec& spec, double omega);

/// S(w_i) on the spec grid (same normalization as jonswap_spectrum).
std::vector<double> jonswap_on_grid(const WaveSpec& spec);

/// Random-phase superposition with one component per grid frequency.
WaveRealization realize_wave_elevation(const WaveSpec& spec, double dt,
                                       double duration);

/// Evaluates the radiation relation and wave-force coefficients of the
/// truth models on `omega`. The truth wave model contains a causal delay of
/// `truth_wave_shift` seconds which is removed from the stored coefficients.
HydroFrd generate_synthetic_hydro_dataset(const sysid::StateSpaceModel& truth_rad,
                                          const sysid::StateSpaceModel& truth_wave,
                                          const Matrix6d& a_inf,
                                          const std::vector<double>& omega,
                                          double truth_wave_shift);

void write_hydro_frd(const HydroFrd& frd, const std::filesystem::path& frd_csv,
                     const std::filesystem::path& ainf_csv);
HydroFrd read_hydro_frd(const std::filesystem::path& frd_csv,
                        const std::filesystem::path& ainf_csv);

void write_wave_csv(const WaveRealization& wave,
                    const std::filesystem::path& path);

}  // namespace moorfd::hydro
