#include "moorfd/plant.hpp"

#include "moorfd/csv.hpp"
#include "moorfd/errors.hpp"
#include "moorfd/truth_models.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace moorfd::plant {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kMinWind = 0.1;

// Axial induction from momentum theory, Cp = 4 a (1 - a)^2 on a <= 1/3.
double induction_from_cp(double cp) {
  if (cp >= 16.0 / 27.0) return 1.0 / 3.0;
  if (cp <= 0.0) return 0.0;
  double lo = 0.0, hi = 1.0 / 3.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (4.0 * mid * (1.0 - mid) * (1.0 - mid) < cp) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct Inputs {
  double pitch = 0.0;
  double q_g = 0.0;
  double v_wind = 0.0;
};

// Continuous state: [xi(6), xi_dot(6), omega, azimuth, x_rad, x_wave].
struct Layout {
  int nr = 0;
  int nw = 0;
  [[nodiscard]] int size() const { return 14 + nr + nw; }
};

Eigen::VectorXd pack(const PlantState& s, const Layout& l) {
  Eigen::VectorXd x(l.size());
  x.segment<6>(0) = s.xi;
  x.segment<6>(6) = s.xi_dot;
  x(12) = s.omega_rotor;
  x(13) = s.azimuth;
  x.segment(14, l.nr) = s.x_rad;
  x.segment(14 + l.nr, l.nw) = s.x_wave;
  return x;
}

void unpack(const Eigen::VectorXd& x, const Layout& l, PlantState& s) {
  s.xi = x.segment<6>(0);
  s.xi_dot = x.segment<6>(6);
  s.omega_rotor = x(12);
  s.azimuth = x(13);
  s.x_rad = x.segment(14, l.nr);
  s.x_wave = x.segment(14 + l.nr, l.nw);
}

class Dynamics {
 public:
  Dynamics(const PlantParams& p, const Layout& l)
      : p_(p), l_(l), mass_(p.generalized_mass()) {}

  Eigen::VectorXd operator()(const Eigen::VectorXd& x, double eta, const Inputs& in,
                             const std::vector<mooring::LineState>& lines) const {
    const Vector6d xi = x.segment<6>(0);
    const Vector6d xi_dot = x.segment<6>(6);
    const double omega = x(12);
    const auto x_rad = x.segment(14, l_.nr);
    const auto x_wave = x.segment(14 + l_.nr, l_.nw);

    Vector6d f = p_.buoyancy_offset - p_.k_hydrostatic * xi - p_.b_viscous * xi_dot;
    if (!p_.lines.empty()) f += mooring::mooring_force(xi, p_.lines, lines);
    double q_aero = 0.0;
    if (p_.aero_enabled) {
      const double h = p_.rotor.hub_height;
      const double v_rel = in.v_wind - xi_dot(0) - h * xi_dot(4);
      const AeroLoads a = aero_loads(v_rel, omega, in.pitch, p_.rotor, p_.rho_air);
      q_aero = a.q_aero;
      f(0) += a.thrust;
      f(4) += h * a.thrust;
    }
    if (l_.nr > 0) f -= p_.truth_radiation.c * x_rad + p_.truth_radiation.d * xi_dot;
    if (l_.nw > 0) f += p_.truth_wave.c * x_wave + p_.truth_wave.d * eta;

    Eigen::VectorXd dx(x.size());
    dx.segment<6>(0) = xi_dot;
    dx.segment<6>(6) = mass_.solve(f);
    dx(12) = (q_aero - p_.rotor.tau * in.q_g) / p_.rotor.inertia();
    dx(13) = omega;
    if (l_.nr > 0) dx.segment(14, l_.nr) = p_.truth_radiation.a * x_rad + p_.truth_radiation.b * xi_dot;
    if (l_.nw > 0) {
      dx.segment(14 + l_.nr, l_.nw) =
          p_.truth_wave.a * x_wave + p_.truth_wave.b * eta;
    }
    return dx;
  }

 private:
  const PlantParams& p_;
  Layout l_;
  Eigen::LLT<Matrix6d> mass_;
};

double clamp_pitch(double v, const ControllerParams& c) {
  return std::clamp(v, c.pitch_min, c.pitch_max);
}

}  // namespace

void PlantParams::validate() const {
  const Matrix6d m = generalized_mass();
  if ((m - m.transpose()).norm() > 1e-9 * m.norm() || m.llt().info() != Eigen::Success) {
    throw ConfigError("generalized mass must be symmetric positive definite");
  }
  if (!(rotor.radius > 0.0) || !(rotor.inertia() > 0.0) || !(rotor.tau > 0.0) ||
      !(rotor.rated_speed > 0.0) || !(rotor.rated_power > 0.0)) {
    throw ConfigError("rotor parameters must be positive");
  }
  if (truth_radiation.order() > 0 &&
      (truth_radiation.inputs() != 6 || truth_radiation.outputs() != 6)) {
    throw ConfigError("truth radiation model must be 6x6");
  }
  if (truth_wave.order() > 0 && (truth_wave.inputs() != 1 || truth_wave.outputs() != 6)) {
    throw ConfigError("truth wave model must be 6x1");
  }
  for (const auto& l : lines) l.validate();
}

double power_coefficient(double lambda, double pitch) {
  if (!(lambda > 0.0)) return 0.0;
  const double th = pitch / kDeg;
  const double inv_li = 1.0 / (lambda + 0.08 * th) - 0.035 / (th * th * th + 1.0);
  if (!(inv_li > 0.0)) return 0.0;
  const double cp = 0.5176 * (116.0 * inv_li - 0.4 * th - 5.0) * std::exp(-21.0 * inv_li) +
                    0.0068 * lambda;
  return std::max(cp, 0.0);
}

double thrust_coefficient(double lambda, double pitch) {
  const double a = induction_from_cp(power_coefficient(lambda, pitch));
  return 4.0 * a * (1.0 - a);
}

AeroLoads aero_loads(double v_rel, double omega_rotor, double pitch,
                     const RotorParams& rotor, double rho_air) {
  AeroLoads out;
  if (v_rel <= kMinWind) {
    v_rel = kMinWind;
    out.clamped = true;
  }
  const double lambda = omega_rotor * rotor.radius / v_rel;
  double cq = 0.0, ct = 0.0;
  if (rotor.surface == AeroSurface::Constant) {
    cq = rotor.cq_constant;
    ct = rotor.ct_constant;
  } else if (lambda > 0.0) {
    cq = power_coefficient(lambda, pitch) / lambda;
    ct = thrust_coefficient(lambda, pitch);
  }
  const double r = rotor.radius;
  const double qdyn = 0.5 * rho_air * std::numbers::pi * v_rel * v_rel;
  out.q_aero = qdyn * r * r * r * cq;
  out.thrust = qdyn * r * r * ct;
  return out;
}

ControlOutput control_step(double omega_rotor, double dt, const ControllerState& s,
                           const PlantParams& p) {
  const auto& c = p.controller;
  const auto& r = p.rotor;
  ControlOutput out;
  const double e = omega_rotor - r.rated_speed;
  ControllerState next = s;
  next.integrator += e * dt;
  double cmd = c.theta_op + c.kp * e + c.ki * next.integrator;
  if (cmd > c.pitch_max || cmd < c.pitch_min) {
    next.integrator = s.integrator;  // conditional integration
    cmd = clamp_pitch(c.theta_op + c.kp * e + c.ki * next.integrator, c);
  }
  out.pitch_cmd = cmd;
  out.state = next;
  const double omega = std::max(omega_rotor, 1e-6);
  out.q_g = std::min(r.rated_power / (r.tau * omega), r.rated_gen_torque());
  return out;
}

Equilibrium find_equilibrium(double v_wind, const PlantParams& p) {
  p.validate();
  Equilibrium eq;
  eq.v_wind = v_wind;
  eq.omega = p.rotor.rated_speed;
  eq.q_g = p.rotor.rated_gen_torque();
  eq.pitch = p.controller.theta_op;
  if (p.aero_enabled && v_wind > kMinWind) {
    const double target = p.rotor.tau * eq.q_g;
    auto f = [&](double th) {
      return aero_loads(v_wind, eq.omega, th, p.rotor, p.rho_air).q_aero - target;
    };
    // Feathering side of the torque curve: scan upward from the lowest pitch.
    double lo = p.controller.pitch_min;
    if (f(lo) < 0.0) {
      std::ostringstream os;
      os << "equilibrium: wind " << v_wind << " m/s is below rated (torque deficit)";
      throw NumericalError(os.str());
    }
    double hi = lo;
    const double step = 0.5 * kDeg;
    while (f(hi) > 0.0) {
      lo = hi;
      hi += step;
      if (hi > p.controller.pitch_max) throw NumericalError("equilibrium: no pitch balances torque");
    }
    std::uintmax_t it = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, boost::math::tools::eps_tolerance<double>(50), it);
    eq.pitch = 0.5 * (a + b);
    const AeroLoads al = aero_loads(v_wind, eq.omega, eq.pitch, p.rotor, p.rho_air);
    eq.q_aero = al.q_aero;
    eq.thrust = al.thrust;
  }

  Vector6d f_aero = Vector6d::Zero();
  f_aero(0) = eq.thrust;
  f_aero(4) = p.rotor.hub_height * eq.thrust;
  const auto states = mooring::healthy_states(p.lines);
  auto residual = [&](const Vector6d& xi) {
    Vector6d r = p.buoyancy_offset - p.k_hydrostatic * xi + f_aero;
    if (!p.lines.empty()) r += mooring::mooring_force(xi, p.lines, states);
    return r;
  };
  const double scale = std::max({f_aero.norm(), p.buoyancy_offset.norm(), 1.0});
  Vector6d xi = Vector6d::Zero();
  Vector6d r = residual(xi);
  int iter = 0;
  while (r.norm() > 1e-9 * scale) {
    if (++iter > 100) {
      std::ostringstream os;
      os << "equilibrium: Newton did not converge, residual " << r.norm();
      throw NumericalError(os.str());
    }
    Matrix6d k = p.k_hydrostatic;
    if (!p.lines.empty()) k += mooring::linearize_mooring_stiffness(p.lines, states, xi, 1e-4);
    Vector6d step = k.fullPivLu().solve(r);
    // Backtracking keeps the line solver inside its valid range.
    double alpha = 1.0;
    Vector6d trial = xi + step;
    Vector6d r_trial = residual(trial);
    while (r_trial.norm() >= r.norm() && alpha > 1e-4) {
      alpha *= 0.5;
      trial = xi + alpha * step;
      r_trial = residual(trial);
    }
    xi = trial;
    r = r_trial;
  }
  eq.xi = xi;
  if (!p.lines.empty()) eq.tensions = mooring::mooring_loads(xi, p.lines, states).tensions;
  return eq;
}

PlantState equilibrium_state(const PlantParams& p, const Equilibrium& eq) {
  PlantState s;
  s.xi = eq.xi;
  s.omega_rotor = eq.omega;
  s.x_rad = Eigen::VectorXd::Zero(p.truth_radiation.order());
  s.x_wave = Eigen::VectorXd::Zero(p.truth_wave.order());
  s.pitch_actual = eq.pitch;
  if (p.controller.ki != 0.0) {
    s.ctrl.integrator = (eq.pitch - p.controller.theta_op) / p.controller.ki;
  }
  s.line_states = mooring::healthy_states(p.lines);
  return s;
}

RunRecord simulate_plant(const PlantParams& p, const hydro::WaveRealization& wave,
                         double v_wind, double duration,
                         const std::vector<mooring::FaultEvent>& faults,
                         const NoiseSpec& noise, std::uint64_t noise_seed,
                         const SimOptions& opts) {
  const Equilibrium eq = find_equilibrium(v_wind, p);
  return simulate_plant_from(p, equilibrium_state(p, eq), wave, v_wind, duration,
                             faults, noise, noise_seed, opts);
}

RunRecord simulate_plant_from(const PlantParams& p, PlantState state,
                              const hydro::WaveRealization& wave, double v_wind,
                              double duration,
                              const std::vector<mooring::FaultEvent>& faults,
                              const NoiseSpec& noise, std::uint64_t noise_seed,
                              const SimOptions& opts) {
  p.validate();
  if (!(opts.dt_in > 0.0) || !(opts.dt_out > 0.0)) throw ConfigError("time steps must be positive");
  const double ratio = opts.dt_out / opts.dt_in;
  const int n_in = static_cast<int>(std::lround(ratio));
  if (n_in < 1 || std::abs(ratio - n_in) > 1e-9 * ratio) {
    throw ConfigError("dt_out must be an integer multiple of dt_in");
  }
  const int n_out = static_cast<int>(std::floor(duration / opts.dt_out + 1e-9)) + 1;
  if (wave.duration() + 1e-9 < opts.dt_out * (n_out - 1)) {
    throw ConfigError("wave realization shorter than the run");
  }
  for (const auto& f : faults) {
    if (f.line_index < 1 || f.line_index > static_cast<int>(p.lines.size())) {
      throw ConfigError("fault line index out of range");
    }
  }

  const Layout layout{p.truth_radiation.order(), p.truth_wave.order()};
  const Dynamics dyn(p, layout);
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  RunRecord rec;
  rec.dt_out = opts.dt_out;
  rec.seed = noise_seed;
  rec.t.resize(static_cast<std::size_t>(n_out));
  rec.u.resize(4, n_out);
  rec.y.resize(3, n_out);
  rec.y_clean.resize(3, n_out);
  rec.tensions.resize(static_cast<Eigen::Index>(p.lines.size()), n_out);
  std::vector<bool> applied(faults.size(), false);

  Eigen::VectorXd x = pack(state, layout);
  double q_g = std::min(p.rotor.rated_power / (p.rotor.tau * state.omega_rotor),
                        p.rotor.rated_gen_torque());
  const double h = opts.dt_in;
  for (int k = 0; k < n_out; ++k) {
    const double t = k * opts.dt_out;
    unpack(x, layout, state);
    if (!x.allFinite()) {
      std::ostringstream os;
      os << "plant state became non-finite; last valid time " << (t - opts.dt_out) << " s";
      throw NumericalError(os.str());
    }
    for (std::size_t i = 0; i < faults.size(); ++i) {
      if (!applied[i] && t >= faults[i].time - 1e-9) {
        state.line_states = mooring::apply_mooring_fault(state.line_states, faults[i], t);
        applied[i] = true;
        rec.fault_log.push_back(faults[i]);
      }
    }
    const auto loads = p.lines.empty()
                           ? mooring::MooringLoads{}
                           : mooring::mooring_loads(state.xi, p.lines, state.line_states);
    for (std::size_t i = 0; i < p.lines.size(); ++i) {
      rec.tensions(static_cast<Eigen::Index>(i), k) = loads.tensions[i];
      state.line_states[i].last_tension_fairlead = loads.tensions[i];
    }

    rec.t[static_cast<std::size_t>(k)] = t;
    rec.y_clean.col(k) << state.omega_rotor, state.xi(0), state.xi(4);
    const double n0 = normal(rng), n1 = normal(rng), n2 = normal(rng);
    rec.y.col(k) = rec.y_clean.col(k) +
                   Eigen::Vector3d(noise.omega_rotor * n0, noise.surge * n1, noise.pitch * n2);

    if (p.controller_enabled) {
      const ControlOutput c = control_step(state.omega_rotor, opts.dt_out, state.ctrl, p);
      state.ctrl = c.state;
      q_g = c.q_g;
      const double max_move = p.controller.pitch_rate * opts.dt_out;
      state.pitch_actual += std::clamp(c.pitch_cmd - state.pitch_actual, -max_move, max_move);
    }
    const double eta_k = wave.at(t);
    rec.u.col(k) << state.pitch_actual, v_wind, q_g, eta_k;
    if (k == n_out - 1) break;

    const Inputs in{state.pitch_actual, q_g, v_wind};
    for (int j = 0; j < n_in; ++j) {
      const double t0 = t + j * h;
      const double e0 = wave.at(t0), em = wave.at(t0 + 0.5 * h), e1 = wave.at(t0 + h);
      const Eigen::VectorXd k1 = dyn(x, e0, in, state.line_states);
      const Eigen::VectorXd k2 = dyn(x + 0.5 * h * k1, em, in, state.line_states);
      const Eigen::VectorXd k3 = dyn(x + 0.5 * h * k2, em, in, state.line_states);
      const Eigen::VectorXd k4 = dyn(x + h * k3, e1, in, state.line_states);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return rec;
}

double platform_energy(const PlantParams& p, const PlantState& s) {
  return 0.5 * s.xi_dot.dot(p.generalized_mass() * s.xi_dot) +
         0.5 * s.xi.dot(p.k_hydrostatic * s.xi) - p.buoyancy_offset.dot(s.xi);
}

void write_run_csv(const RunRecord& r, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << "t,theta,v,qg,eta,omega_rotor,surge,pitch_platform";
  for (Eigen::Index i = 0; i < r.tensions.rows(); ++i) out << ",T" << (i + 1);
  out << '\n';
  for (std::size_t k = 0; k < r.size(); ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    out << csv::sig(r.t[k], 9);
    for (int i = 0; i < 4; ++i) out << ',' << csv::sig(r.u(i, c), 9);
    for (int i = 0; i < 3; ++i) out << ',' << csv::sig(r.y(i, c), 9);
    for (Eigen::Index i = 0; i < r.tensions.rows(); ++i) out << ',' << csv::sig(r.tensions(i, c), 9);
    out << '\n';
  }
}

PlantParams default_plant_params() { return make_plant_params(mooring::default_lines()); }

PlantParams make_plant_params(std::vector<mooring::MooringLineParams> lines) {
  PlantParams p;
  p.lines = std::move(lines);
  const double rho = p.rho_water, g = p.gravity;
  constexpr double kDisplacement = 29497.7;  // [m^3]
  constexpr double kColumnRadius = 7.5, kColumnOffset = 26.0;
  constexpr double kZg = -35.0, kZb = -28.0;

  const auto states = mooring::healthy_states(p.lines);
  const Vector6d f_moor0 = mooring::mooring_force(Vector6d::Zero(), p.lines, states);
  p.buoyancy_offset = -f_moor0;
  // Weight balances buoyancy minus the vertical mooring pretension.
  const double mass = (rho * kDisplacement * g + f_moor0(2)) / g;

  Matrix6d m = Matrix6d::Zero();
  m(0, 0) = m(1, 1) = m(2, 2) = mass;
  m(0, 4) = m(4, 0) = mass * kZg;
  m(1, 3) = m(3, 1) = -mass * kZg;
  m(3, 3) = m(4, 4) = 5.0e10;
  m(5, 5) = 1.6e10;
  p.m_rb = m;

  const double a_col = std::numbers::pi * kColumnRadius * kColumnRadius;
  const double a_wp = 3.0 * a_col;
  // Column centers at 26 m from the center line, 120 degrees apart.
  const double i_wp = 3.0 * std::numbers::pi * std::pow(kColumnRadius, 4) / 4.0 +
                      a_col * kColumnOffset * kColumnOffset * 1.5;
  Matrix6d k = Matrix6d::Zero();
  k(2, 2) = rho * g * a_wp;
  k(3, 3) = k(4, 4) = rho * g * (i_wp + kDisplacement * kZb) - mass * g * kZg;
  p.k_hydrostatic = k;

  p.a_inf = truth::default_added_mass_inf();
  Matrix6d bv = Matrix6d::Zero();
  bv(0, 0) = bv(1, 1) = 2.0e5;
  bv(2, 2) = 5.0e5;
  bv(3, 3) = bv(4, 4) = 1.0e9;
  bv(5, 5) = 5.0e8;
  p.b_viscous = bv;

  // Rotor-speed PI tuned at 16 m/s for 0.12 rad/s, damping ratio 0.7.
  p.controller.kp = 0.6788;
  p.controller.ki = 0.05934;

  p.truth_radiation = truth::default_truth_radiation();
  p.truth_wave = truth::default_truth_wave();
  return p;
}

}  // namespace moorfd::plant
