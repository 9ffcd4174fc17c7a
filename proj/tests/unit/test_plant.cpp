#include "moorfd/csv.hpp"
#include "moorfd/errors.hpp"
#include "moorfd/hydro.hpp"
#include "moorfd/plant.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace moorfd;

namespace {

hydro::WaveRealization sea(double duration, std::uint64_t seed = 5, double hs = 2.66) {
  hydro::WaveSpec ws;
  ws.hs = hs;
  ws.seed = seed;
  return hydro::realize_wave_elevation(ws, 0.1, duration);
}

}  // namespace

TEST_CASE("aerodynamic coefficients stay non-negative and vanish when feathered") {
  for (double lambda = 0.5; lambda < 15.0; lambda += 0.5) {
    for (double pitch = 0.0; pitch < 1.5; pitch += 0.1) {
      CHECK(plant::power_coefficient(lambda, pitch) >= 0.0);
      CHECK(plant::thrust_coefficient(lambda, pitch) >= 0.0);
    }
  }
  plant::RotorParams r;
  r.surface = plant::AeroSurface::Constant;
  const auto loads = plant::aero_loads(12.0, 1.0, 1.5707963, r, 1.225);
  CHECK(loads.q_aero == 0.0);
  CHECK(loads.thrust == 0.0);
}

TEST_CASE("generator torque follows constant power up to the rated torque") {
  const auto p = plant::default_plant_params();
  const double rated = p.rotor.rated_speed;
  const auto hi = plant::control_step(1.1 * rated, 0.1, {}, p);
  CHECK(hi.q_g == doctest::Approx(p.rotor.rated_power / (p.rotor.tau * 1.1 * rated)));
  const auto lo = plant::control_step(0.8 * rated, 0.1, {}, p);
  CHECK(lo.q_g == doctest::Approx(p.rotor.rated_gen_torque()));
  // Saturated pitch command does not keep integrating.
  plant::ControllerState s;
  for (int i = 0; i < 1000; ++i) s = plant::control_step(0.5 * rated, 0.1, s, p).state;
  const auto out = plant::control_step(0.5 * rated, 0.1, s, p);
  CHECK(out.pitch_cmd == p.controller.pitch_min);
  CHECK(std::abs(p.controller.kp * (0.5 * rated - rated) + p.controller.ki * s.integrator) < 1.0);
}

TEST_CASE("operating point holds rated speed at 16 m/s") {
  const auto p = plant::default_plant_params();
  const auto eq = plant::find_equilibrium(16.0, p);
  CHECK(std::abs(eq.omega / p.rotor.rated_speed - 1.0) <= 0.02);
  CHECK(eq.pitch > 0.0);
  CHECK(eq.thrust > 0.0);
  CHECK(eq.xi(0) > 0.0);
  CHECK(eq.q_aero == doctest::Approx(p.rotor.tau * eq.q_g).epsilon(1e-9));
}

TEST_CASE("still air leaves the platform at its design position") {
  const auto p = plant::default_plant_params();
  const auto eq = plant::find_equilibrium(0.0, p);
  CHECK(eq.xi.norm() < 1e-6);
  CHECK(eq.omega == p.rotor.rated_speed);
}

TEST_CASE("undamped platform conserves energy") {
  auto p = plant::default_plant_params();
  p.aero_enabled = false;
  p.controller_enabled = false;
  p.lines.clear();
  p.buoyancy_offset.setZero();
  p.b_viscous.setZero();
  p.truth_radiation.c.setZero();
  p.truth_radiation.d.setZero();
  p.truth_wave.c.setZero();
  p.truth_wave.d.setZero();
  // Only surge and pitch move: they are the measured DOFs, so the final
  // state can be rebuilt from the clean outputs.
  plant::PlantState s = plant::equilibrium_state(p, plant::find_equilibrium(0.0, p));
  s.xi(4) = 0.02;
  const double e0 = plant::platform_energy(p, s);
  const auto r = plant::simulate_plant_from(p, s, sea(100.0), 0.0, 100.0, {}, {0, 0, 0}, 1);
  const int k = static_cast<int>(r.size()) - 2;
  plant::PlantState e = s;
  e.xi.setZero();
  e.xi(0) = r.y_clean(1, k);
  e.xi(4) = r.y_clean(2, k);
  e.xi_dot.setZero();
  e.xi_dot(0) = (r.y_clean(1, k + 1) - r.y_clean(1, k - 1)) / 0.2;
  e.xi_dot(4) = (r.y_clean(2, k + 1) - r.y_clean(2, k - 1)) / 0.2;
  CHECK(std::abs(plant::platform_energy(p, e) - e0) <= 1e-3 * e0);
}

TEST_CASE("outputs before a fault equal the healthy twin bit for bit") {
  const auto p = plant::default_plant_params();
  const auto wave = sea(220.0);
  const auto healthy = plant::simulate_plant(p, wave, 16.0, 200.0, {}, {}, 9);
  const std::vector<mooring::FaultEvent> f{{mooring::FaultKind::FairleadRelease, 1, 150.0, 0.0}};
  const auto faulted = plant::simulate_plant(p, wave, 16.0, 200.0, f, {}, 9);
  REQUIRE(healthy.size() == faulted.size());
  int k_fault = 0;
  while (healthy.t[static_cast<std::size_t>(k_fault)] < 150.0 - 1e-9) ++k_fault;
  CHECK(healthy.y.leftCols(k_fault) == faulted.y.leftCols(k_fault));
  CHECK(healthy.u.leftCols(k_fault) == faulted.u.leftCols(k_fault));
  CHECK(healthy.y.col(k_fault + 50) != faulted.y.col(k_fault + 50));
  CHECK(faulted.fault_log.size() == 1);
  CHECK(faulted.tensions(0, k_fault + 1) == 0.0);
}

TEST_CASE("fairlead release of the upwind line drifts the platform downwind") {
  const auto p = plant::default_plant_params();
  const std::vector<mooring::FaultEvent> f{{mooring::FaultKind::FairleadRelease, 1, 10.0, 0.0}};
  const auto r = plant::simulate_plant(p, sea(100.0), 16.0, 80.0, f, {0, 0, 0}, 1);
  CHECK(r.y_clean(1, 700) - r.y_clean(1, 100) > 5.0);
  for (int k = 110; k < 700; k += 10) CHECK(r.y_clean(1, k + 10) >= r.y_clean(1, k));
}

TEST_CASE("integration converges with the inner step") {
  const auto p = plant::default_plant_params();
  const auto wave = sea(120.0);
  plant::SimOptions coarse, fine;
  fine.dt_in = coarse.dt_in / 2.0;
  const auto a = plant::simulate_plant(p, wave, 16.0, 100.0, {}, {0, 0, 0}, 1, coarse);
  const auto b = plant::simulate_plant(p, wave, 16.0, 100.0, {}, {0, 0, 0}, 1, fine);
  for (int i = 0; i < 3; ++i) {
    const Eigen::ArrayXd x = a.y_clean.row(i).transpose().array();
    const Eigen::ArrayXd y = b.y_clean.row(i).transpose().array();
    const double sd = std::sqrt((x - x.mean()).square().mean());
    CHECK(std::sqrt((x - y).square().mean()) <= 1e-5 * sd);
  }
}

TEST_CASE("noise is seeded and the run CSV has the documented layout") {
  const auto p = plant::default_plant_params();
  const auto wave = sea(120.0);
  const auto a = plant::simulate_plant(p, wave, 16.0, 100.0, {}, {}, 3);
  const auto b = plant::simulate_plant(p, wave, 16.0, 100.0, {}, {}, 3);
  const auto c = plant::simulate_plant(p, wave, 16.0, 100.0, {}, {}, 4);
  CHECK(a.y == b.y);
  CHECK(a.y != c.y);
  CHECK(a.y_clean == c.y_clean);
  CHECK(a.size() == 1001);
  const auto path = std::filesystem::temp_directory_path() / "moorfd_run.csv";
  plant::write_run_csv(a, path);
  const auto lines = csv::read_lines(path);
  CHECK(lines.front() == "t,theta,v,qg,eta,omega_rotor,surge,pitch_platform,T1,T2,T3");
  CHECK(lines.size() == 1002);
  std::filesystem::remove(path);
}
