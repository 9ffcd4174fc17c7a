#include "moorfd/truth_models.hpp"

#include "moorfd/errors.hpp"

#include <cmath>

namespace moorfd::truth {

namespace {

using sysid::StateSpaceModel;

// Controllable canonical form of num(s) / den(s), den monic, deg num < deg den.
// Coefficients are in ascending powers of s.
StateSpaceModel siso_tf(const std::vector<double>& num,
                        const std::vector<double>& den) {
  const int n = static_cast<int>(den.size()) - 1;
  StateSpaceModel m = StateSpaceModel::zeros(n, 1, 1, 0.0);
  for (int i = 0; i + 1 < n; ++i) m.a(i, i + 1) = 1.0;
  for (int i = 0; i < n; ++i) m.a(n - 1, i) = -den[static_cast<std::size_t>(i)] / den.back();
  m.b(n - 1, 0) = 1.0 / den.back();
  for (std::size_t i = 0; i < num.size(); ++i) m.c(0, static_cast<int>(i)) = num[i];
  return m;
}

// y = second(first(u)).
StateSpaceModel series(const StateSpaceModel& first, const StateSpaceModel& second) {
  const int n1 = first.order(), n2 = second.order();
  StateSpaceModel m = StateSpaceModel::zeros(n1 + n2, first.inputs(),
                                             second.outputs(), 0.0);
  m.a.topLeftCorner(n1, n1) = first.a;
  m.a.bottomLeftCorner(n2, n1) = second.b * first.c;
  m.a.bottomRightCorner(n2, n2) = second.a;
  m.b.topRows(n1) = first.b;
  m.b.bottomRows(n2) = second.b * first.d;
  m.c.leftCols(n1) = second.d * first.c;
  m.c.rightCols(n2) = second.c;
  m.d = second.d * first.d;
  return m;
}

std::vector<double> poly_mul(const std::vector<double>& a,
                             const std::vector<double>& b) {
  std::vector<double> r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

}  // namespace

StateSpaceModel radiation_model(const std::vector<RadiationTerm>& terms) {
  const int n = 2 * static_cast<int>(terms.size());
  StateSpaceModel m = StateSpaceModel::zeros(n, 6, 6, 0.0);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& t = terms[k];
    if (!(t.omega0 > 0.0) || !(t.zeta > 0.0) || t.b_peak < 0.0) {
      throw ConfigError("radiation term needs omega0 > 0, zeta > 0, b_peak >= 0");
    }
    const int i = 2 * static_cast<int>(k);
    const double r = 2.0 * t.zeta * t.omega0 * t.b_peak;
    m.a(i, i + 1) = 1.0;
    m.a(i + 1, i) = -t.omega0 * t.omega0;
    m.a(i + 1, i + 1) = -2.0 * t.zeta * t.omega0;
    for (int d = 0; d < 6; ++d) {
      m.b(i + 1, d) = t.v[static_cast<std::size_t>(d)];
      m.c(d, i + 1) = r * t.v[static_cast<std::size_t>(d)];
    }
  }
  return m;
}

std::vector<RadiationTerm> default_radiation_terms() {
  // DOF order: surge, sway, heave, roll, pitch, yaw. Levers [m] couple the
  // horizontal force of the submerged columns into pitch and roll.
  return {
      {{1.0, 0.0, 0.0, 0.0, -20.0, 0.0}, 0.70, 0.25, 1.0e6},
      {{1.0, 0.0, 0.0, 0.0, -30.0, 0.0}, 1.30, 0.20, 4.0e5},
      {{0.0, 0.0, 1.0, 0.0, 0.0, 0.0}, 0.90, 0.25, 6.0e5},
      {{0.0, 0.0, 1.0, 0.0, 0.0, 0.0}, 2.00, 0.20, 1.5e4},
      {{0.0, 1.0, 0.0, 20.0, 0.0, 0.0}, 0.70, 0.25, 1.0e6},
      {{0.0, 0.0, 0.0, 0.0, 0.0, 1.0}, 1.00, 0.25, 5.0e8},
  };
}

StateSpaceModel default_truth_radiation() {
  return radiation_model(default_radiation_terms());
}

WaveTruthParams default_wave_params() {
  WaveTruthParams p;
  p.channels = {
      {0, 8.0e6, 1.6, 0.7, 0.0},
      {2, 3.0e6, 2.2, 0.7, 0.0},
      {4, -1.5e8, 1.4, 0.7, 0.0},
  };
  return p;
}

StateSpaceModel wave_model(const WaveTruthParams& p) {
  if (p.lag_count < 0 || p.lag_tau < 0.0) throw ConfigError("invalid lag chain");
  StateSpaceModel chain = StateSpaceModel::zeros(0, 1, 1, 0.0);
  chain.d(0, 0) = 1.0;
  if (p.lag_tau > 0.0) {
    for (int i = 0; i < p.lag_count; ++i) {
      chain = series(chain, siso_tf({1.0 / p.lag_tau}, {1.0 / p.lag_tau, 1.0}));
    }
  }
  // Band-pass s^2 / (low second-order) (high second-order), unit peak.
  const auto den_bp = poly_mul(
      {p.bp_omega_low * p.bp_omega_low, 2.0 * p.bp_zeta_low * p.bp_omega_low, 1.0},
      {p.bp_omega_high * p.bp_omega_high, 2.0 * p.bp_zeta_high * p.bp_omega_high, 1.0});
  StateSpaceModel bp = siso_tf({0.0, 0.0, 1.0}, den_bp);
  double peak = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double w = 0.01 + 3.0 * i / 2000.0;
    const std::vector<double> wv{w};
    peak = std::max(peak, std::abs(sysid::model_frf(bp, wv)[0](0, 0)));
  }
  bp.c /= peak;
  const StateSpaceModel common = series(chain, bp);

  const int nc = static_cast<int>(p.channels.size());
  StateSpaceModel out = StateSpaceModel::zeros(2 * nc, 1, 6, 0.0);
  for (int k = 0; k < nc; ++k) {
    const auto& ch = p.channels[static_cast<std::size_t>(k)];
    if (ch.dof < 0 || ch.dof > 5) throw ConfigError("wave channel dof out of range");
    const double w2 = ch.omega * ch.omega;
    const StateSpaceModel mode =
        siso_tf({ch.gain * w2, ch.gain * ch.zero}, {w2, 2.0 * ch.zeta * ch.omega, 1.0});
    out.a.block(2 * k, 2 * k, 2, 2) = mode.a;
    out.b.block(2 * k, 0, 2, 1) = mode.b;
    out.c.block(ch.dof, 2 * k, 1, 2) = mode.c;
  }
  return series(common, out);
}

StateSpaceModel default_truth_wave() { return wave_model(default_wave_params()); }

hydro::Matrix6d default_added_mass_inf() {
  hydro::Matrix6d a = hydro::Matrix6d::Zero();
  a(0, 0) = 2.5e7;
  a(1, 1) = 2.5e7;
  a(2, 2) = 3.0e6;
  a(3, 3) = 1.2e10;
  a(4, 4) = 1.2e10;
  a(5, 5) = 1.0e10;
  a(0, 4) = a(4, 0) = -3.5e8;
  a(1, 3) = a(3, 1) = 3.5e8;
  return a;
}

hydro::HydroFrd default_hydro_dataset() {
  const hydro::WaveSpec spec;
  return hydro::generate_synthetic_hydro_dataset(
      default_truth_radiation(), default_truth_wave(), default_added_mass_inf(),
      spec.grid(), default_wave_params().shift);
}

}  // namespace moorfd::truth
