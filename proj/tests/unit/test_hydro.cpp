#include "moorfd/errors.hpp"
#include "moorfd/hydro.hpp"
#include "moorfd/sysid.hpp"
#include "moorfd/truth_models.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <numeric>

using namespace moorfd;

TEST_CASE("JONSWAP variance matches the significant wave height on the grid") {
  hydro::WaveSpec spec;
  const auto s = hydro::jonswap_on_grid(spec);
  const double m0 = std::accumulate(s.begin(), s.end(), 0.0) * spec.grid_step();
  CHECK(4.0 * std::sqrt(m0) == doctest::Approx(2.66).epsilon(0.01));
}

TEST_CASE("JONSWAP peak sits at the peak frequency and vanishes at low frequency") {
  hydro::WaveSpec spec;
  spec.n_omega = 4000;
  const auto grid = spec.grid();
  const auto s = hydro::jonswap_on_grid(spec);
  const auto k = std::max_element(s.begin(), s.end()) - s.begin();
  CHECK(std::abs(grid[k] - 2.0 * std::numbers::pi / spec.tp) <= spec.grid_step());
  CHECK(hydro::jonswap_spectrum(spec, 0.01) < 1e-6 * s[k]);
  CHECK_THROWS_AS(hydro::jonswap_spectrum(spec, 0.0), std::domain_error);
}

TEST_CASE("wave realization length, determinism and variance") {
  hydro::WaveSpec spec;
  const auto a = hydro::realize_wave_elevation(spec, 0.1, 1600.0);
  CHECK(a.eta.size() == 16001);
  const auto b = hydro::realize_wave_elevation(spec, 0.1, 1600.0);
  CHECK(a.eta == b.eta);

  const auto s = hydro::jonswap_on_grid(spec);
  const double grid_var = std::accumulate(s.begin(), s.end(), 0.0) * spec.grid_step();
  double mean_var = 0.0;
  for (int seed = 1; seed <= 10; ++seed) {
    spec.seed = static_cast<std::uint64_t>(seed);
    const auto r = hydro::realize_wave_elevation(spec, 0.1, 1600.0);
    double v = 0.0;
    for (double e : r.eta) v += e * e;
    mean_var += v / static_cast<double>(r.eta.size()) / 10.0;
  }
  CHECK(mean_var == doctest::Approx(grid_var).epsilon(0.05));
  CHECK_THROWS_AS(hydro::realize_wave_elevation(spec, 0.1, 50.0), ConfigError);
}

TEST_CASE("constant real radiation response maps to constant damping") {
  const Eigen::MatrixXd b0 = Eigen::MatrixXd::Identity(6, 6) * 3e5;
  sysid::StateSpaceModel rad(Eigen::MatrixXd::Zero(0, 0), Eigen::MatrixXd::Zero(0, 6),
                             Eigen::MatrixXd::Zero(6, 0), b0);
  const auto wave = truth::default_truth_wave();
  const auto a_inf = truth::default_added_mass_inf();
  hydro::WaveSpec spec;
  const auto frd = hydro::generate_synthetic_hydro_dataset(rad, wave, a_inf, spec.grid(), 4.0);
  for (std::size_t i = 0; i < frd.size(); ++i) {
    CHECK((frd.b_omega[i] - b0).norm() < 1e-9 * b0.norm());
    CHECK((frd.a_omega[i] - a_inf).norm() < 1e-9 * a_inf.norm());
  }
}

TEST_CASE("shipped dataset is valid, decays at high frequency and round-trips") {
  const auto frd = truth::default_hydro_dataset();
  CHECK_NOTHROW(frd.validate());
  const auto rad = truth::default_truth_radiation();
  const double top = 10.0 * frd.omega.back();
  const auto k_top = sysid::model_frf(rad, std::span<const double>(&top, 1))[0];
  double b_peak = 0.0;
  for (const auto& b : frd.b_omega) b_peak = std::max(b_peak, b.diagonal().cwiseAbs().maxCoeff());
  CHECK(k_top.real().diagonal().cwiseAbs().maxCoeff() < 0.05 * b_peak);

  const auto dir = std::filesystem::temp_directory_path() / "moorfd_frd_test";
  hydro::write_hydro_frd(frd, dir / "frd.csv", dir / "ainf.csv");
  const auto back = hydro::read_hydro_frd(dir / "frd.csv", dir / "ainf.csv");
  REQUIRE(back.size() == frd.size());
  for (std::size_t i = 0; i < frd.size(); ++i) {
    CHECK(back.omega[i] == frd.omega[i]);
    CHECK(back.b_omega[i] == frd.b_omega[i]);
    CHECK(back.x_omega[i] == frd.x_omega[i]);
  }
  CHECK(truth::default_hydro_dataset().b_omega[7] == frd.b_omega[7]);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unstable truth models are rejected") {
  auto rad = truth::default_truth_radiation();
  rad.a(0, 0) = 5.0;
  hydro::WaveSpec spec;
  CHECK_THROWS_AS(hydro::generate_synthetic_hydro_dataset(rad, truth::default_truth_wave(),
                                                          truth::default_added_mass_inf(),
                                                          spec.grid(), 4.0),
                  ValidationError);
}
