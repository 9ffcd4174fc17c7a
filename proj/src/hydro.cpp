#include "moorfd/hydro.hpp"

#include "moorfd/csv.hpp"
#include "moorfd/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace moorfd::hydro {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// JONSWAP shape with unit alpha (and g^2 folded into the normalization).
double jonswap_shape(const WaveSpec& spec, double omega) {
  const double wp = kTwoPi / spec.tp;
  const double sigma = omega <= wp ? 0.07 : 0.09;
  const double r = std::exp(-(omega - wp) * (omega - wp) /
                            (2.0 * sigma * sigma * wp * wp));
  const double ratio = wp / omega;
  return std::pow(omega, -5.0) * std::exp(-1.25 * std::pow(ratio, 4.0)) *
         std::pow(spec.gamma, r);
}

double jonswap_scale(const WaveSpec& spec) {
  const auto grid = spec.grid();
  double m0 = 0.0;
  for (double w : grid) m0 += jonswap_shape(spec, w);
  m0 *= spec.grid_step();
  if (m0 <= 0.0) throw ValidationError("JONSWAP grid carries no energy");
  return (spec.hs * spec.hs / 16.0) / m0;
}

bool symmetric(const Matrix6d& m, double rel) {
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel * scale;
}

}  // namespace

void WaveSpec::validate() const {
  if (!(hs > 0.0) || !(tp > 0.0) || !(gamma >= 1.0)) {
    throw ConfigError("wave spec requires hs > 0, tp > 0, gamma >= 1");
  }
  if (!(omega_min > 0.0) || !(omega_max > omega_min) || n_omega < 2) {
    throw ConfigError("wave spec requires 0 < omega_min < omega_max, n >= 2");
  }
}

std::vector<double> WaveSpec::grid() const {
  std::vector<double> w(static_cast<std::size_t>(n_omega));
  const double step = grid_step();
  for (int i = 0; i < n_omega; ++i) w[i] = omega_min + step * i;
  return w;
}

double WaveSpec::grid_step() const {
  return (omega_max - omega_min) / static_cast<double>(n_omega - 1);
}

double WaveRealization::at(double t) const {
  if (eta.empty()) return 0.0;
  if (t <= 0.0) return eta.front();
  const double pos = t / dt;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= eta.size()) return eta.back();
  const double f = pos - static_cast<double>(i);
  return eta[i] + f * (eta[i + 1] - eta[i]);
}

double jonswap_spectrum(const WaveSpec& spec, double omega) {
  if (!(omega > 0.0)) {
    throw std::domain_error("jonswap_spectrum: omega must be positive");
  }
  spec.validate();
  return jonswap_scale(spec) * jonswap_shape(spec, omega);
}

std::vector<double> jonswap_on_grid(const WaveSpec& spec) {
  spec.validate();
  const double scale = jonswap_scale(spec);
  auto grid = spec.grid();
  for (double& w : grid) w = scale * jonswap_shape(spec, w);
  return grid;
}

WaveRealization realize_wave_elevation(const WaveSpec& spec, double dt,
                                       double duration) {
  spec.validate();
  if (!(dt > 0.0)) throw ConfigError("wave realization requires dt > 0");
  if (!(duration >= 10.0 * spec.tp)) {
    throw ConfigError("wave realization duration must be at least 10 tp");
  }
  const auto omega = spec.grid();
  const auto density = jonswap_on_grid(spec);
  const double dw = spec.grid_step();

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> phase_dist(0.0, kTwoPi);
  std::vector<double> amp(omega.size()), phase(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    amp[i] = std::sqrt(2.0 * density[i] * dw);
    phase[i] = phase_dist(rng);
  }

  WaveRealization out;
  out.dt = dt;
  out.seed = spec.seed;
  const auto n = static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
  out.eta.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = dt * static_cast<double>(k);
    double e = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
      e += amp[i] * std::cos(omega[i] * t + phase[i]);
    }
    out.eta[k] = e;
  }
  return out;
}

bool HydroFrd::uniform_grid() const {
  if (omega.size() < 2) return false;
  const double step = (omega.back() - omega.front()) /
                      static_cast<double>(omega.size() - 1);
  for (std::size_t i = 1; i < omega.size(); ++i) {
    if (std::abs(omega[i] - omega[i - 1] - step) > 1e-9 * std::abs(step)) {
      return false;
    }
  }
  return step > 0.0;
}

void HydroFrd::validate() const {
  const auto n = omega.size();
  if (n < 2 || a_omega.size() != n || b_omega.size() != n ||
      x_omega.size() != n) {
    throw ValidationError("hydro dataset: inconsistent sample counts");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(omega[i] > 0.0) || (i > 0 && !(omega[i] > omega[i - 1]))) {
      throw ValidationError("hydro dataset: omega must be positive, increasing");
    }
  }
  if (!a_inf.allFinite() || !symmetric(a_inf, 1e-9)) {
    throw ValidationError("hydro dataset: a_inf must be finite and symmetric");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix6d& b = b_omega[i];
    if (!b.allFinite() || !a_omega[i].allFinite() || !x_omega[i].allFinite()) {
      throw ValidationError("hydro dataset: non-finite coefficient");
    }
    if (!symmetric(b, 1e-9)) {
      throw ValidationError("hydro dataset: damping not symmetric at w=" +
                            std::to_string(omega[i]));
    }
    const double scale = std::max(b.cwiseAbs().maxCoeff(), 1.0);
    Eigen::SelfAdjointEigenSolver<Matrix6d> es(0.5 * (b + b.transpose()),
                                               Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * scale) {
      throw ValidationError("hydro dataset: damping not PSD at w=" +
                            std::to_string(omega[i]));
    }
  }
  for (int ch = 0; ch < 6; ++ch) {
    double peak = 0.0;
    for (const auto& x : x_omega) peak = std::max(peak, std::abs(x(ch)));
    if (peak > 0.0 && std::abs(x_omega.back()(ch)) >= 0.05 * peak) {
      throw ValidationError("hydro dataset: wave-force channel " +
                            std::to_string(ch) +
                            " does not decay at the top of the grid");
    }
  }
}

HydroFrd generate_synthetic_hydro_dataset(const sysid::StateSpaceModel& truth_rad,
                                          const sysid::StateSpaceModel& truth_wave,
                                          const Matrix6d& a_inf,
                                          const std::vector<double>& omega,
                                          double truth_wave_shift) {
  if (truth_rad.is_discrete() || truth_wave.is_discrete()) {
    throw ValidationError("truth models must be continuous-time");
  }
  if (truth_rad.inputs() != 6 || truth_rad.outputs() != 6 ||
      truth_wave.inputs() != 1 || truth_wave.outputs() != 6) {
    throw ValidationError("truth models must be 6x6 (radiation), 6x1 (wave)");
  }
  if (!truth_rad.is_stable() || !truth_wave.is_stable()) {
    throw ValidationError("truth models must be asymptotically stable");
  }
  const auto k = sysid::model_frf(truth_rad, omega);
  const auto x = sysid::model_frf(truth_wave, omega);
  HydroFrd frd;
  frd.omega = omega;
  frd.a_inf = a_inf;
  frd.a_omega.reserve(omega.size());
  frd.b_omega.reserve(omega.size());
  frd.x_omega.reserve(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const Matrix6d re = k[i].real();
    const Matrix6d im = k[i].imag();
    // Exact symmetrization removes round-off from the FRF evaluation.
    frd.b_omega.push_back(0.5 * (re + re.transpose()));
    frd.a_omega.push_back(a_inf + 0.5 * (im + im.transpose()) / omega[i]);
    const std::complex<double> advance =
        std::exp(std::complex<double>(0.0, omega[i] * truth_wave_shift));
    frd.x_omega.push_back(x[i].col(0) * advance);
  }
  return frd;
}

void write_hydro_frd(const HydroFrd& frd, const std::filesystem::path& frd_csv,
                     const std::filesystem::path& ainf_csv) {
  auto out = csv::open_out(frd_csv);
  out << "omega";
  for (const char* tag : {"a", "b"}) {
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) out << ',' << tag << i << j;
    }
  }
  for (int i = 0; i < 6; ++i) out << ",re_x" << i;
  for (int i = 0; i < 6; ++i) out << ",im_x" << i;
  out << '\n';
  for (std::size_t k = 0; k < frd.size(); ++k) {
    out << csv::exact(frd.omega[k]);
    for (const auto* m : {&frd.a_omega[k], &frd.b_omega[k]}) {
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) out << ',' << csv::exact((*m)(i, j));
      }
    }
    for (int i = 0; i < 6; ++i) out << ',' << csv::exact(frd.x_omega[k](i).real());
    for (int i = 0; i < 6; ++i) out << ',' << csv::exact(frd.x_omega[k](i).imag());
    out << '\n';
  }
  auto aout = csv::open_out(ainf_csv);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      aout << (j ? "," : "") << csv::exact(frd.a_inf(i, j));
    }
    aout << '\n';
  }
}

HydroFrd read_hydro_frd(const std::filesystem::path& frd_csv,
                        const std::filesystem::path& ainf_csv) {
  const auto lines = csv::read_lines(frd_csv);
  if (lines.size() < 3) throw ConfigError("hydro dataset has no data rows");
  HydroFrd frd;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = csv::split(lines[r]);
    if (cells.size() != 1 + 36 + 36 + 12) {
      throw ConfigError("hydro dataset row " + std::to_string(r) +
                        " has wrong column count");
    }
    std::size_t c = 0;
    frd.omega.push_back(csv::to_double(cells[c++]));
    Matrix6d a, b;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) a(i, j) = csv::to_double(cells[c++]);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) b(i, j) = csv::to_double(cells[c++]);
    Vector6cd x;
    for (int i = 0; i < 6; ++i) x(i).real(csv::to_double(cells[c + i]));
    for (int i = 0; i < 6; ++i) x(i).imag(csv::to_double(cells[c + 6 + i]));
    frd.a_omega.push_back(a);
    frd.b_omega.push_back(b);
    frd.x_omega.push_back(x);
  }
  const auto alines = csv::read_lines(ainf_csv);
  if (alines.size() != 6) throw ConfigError("ainf.csv must have 6 rows");
  for (int i = 0; i < 6; ++i) {
    const auto cells = csv::split(alines[i]);
    if (cells.size() != 6) throw ConfigError("ainf.csv must have 6 columns");
    for (int j = 0; j < 6; ++j) frd.a_inf(i, j) = csv::to_double(cells[j]);
  }
  frd.validate();
  return frd;
}

void write_wave_csv(const WaveRealization& wave,
                    const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << "t,eta\n";
  for (std::size_t k = 0; k < wave.eta.size(); ++k) {
    out << csv::sig(wave.dt * static_cast<double>(k), 9) << ','
        << csv::sig(wave.eta[k], 9) << '\n';
  }
}

}  // namespace moorfd::hydro
