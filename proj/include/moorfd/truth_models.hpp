#pragma once

#include "moorfd/hydro.hpp"
#include "moorfd/state_space.hpp"

#include <array>
#include <vector>

namespace moorfd::truth {

/// One positive-real radiation term  v v^T * r s / (s^2 + 2 zeta w0 s + w0^2)
/// whose damping peaks at b_peak = r / (2 zeta w0) for w = w0.
struct RadiationTerm {
  std::array<double, 6> v{};
  double omega0 = 1.0;
  double zeta = 0.25;
  double b_peak = 0.0;
};

/// Continuous 6x6 radiation memory model (xi_dot -> mu), order 2 per term.
sysid::StateSpaceModel radiation_model(const std::vector<RadiationTerm>& terms);
std::vector<RadiationTerm> default_radiation_terms();
sysid::StateSpaceModel default_truth_radiation();

struct WaveChannel {
  int dof = 0;
  double gain = 0.0;    // [N/m] or [N m/m] scale of the channel
  double omega = 1.0;   // channel mode frequency [rad/s]
  double zeta = 0.7;
  double zero = 0.0;    // numerator (omega^2 + zero * s)
};

struct WaveTruthParams {
  int lag_count = 6;
  double lag_tau = 0.1;  // [s]
  double bp_omega_low = 0.5;
  double bp_zeta_low = 0.6;
  double bp_omega_high = 1.1;
  double bp_zeta_high = 0.6;
  std::vector<WaveChannel> channels;
  /// Advance removed from the truth model when building the dataset [s].
  double shift = 4.0;
};

WaveTruthParams default_wave_params();
/// Continuous 6x1 wave-force model (eta -> force), causal.
sysid::StateSpaceModel wave_model(const WaveTruthParams& p);
sysid::StateSpaceModel default_truth_wave();

hydro::Matrix6d default_added_mass_inf();

/// Dataset of the default truth models on the default 0.05-3.0 rad/s grid.
hydro::HydroFrd default_hydro_dataset();

}  // namespace moorfd::truth
