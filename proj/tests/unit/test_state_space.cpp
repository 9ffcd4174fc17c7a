#include "moorfd/errors.hpp"
#include "moorfd/model_io.hpp"
#include "moorfd/state_space.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>

using moorfd::sysid::StateSpaceModel;

namespace {

StateSpaceModel random_model(int n, int m, int p, double dt, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto rnd = [&](int r, int c) {
    Eigen::MatrixXd x(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) x(i, j) = nd(rng);
    return x;
  };
  Eigen::MatrixXd a = rnd(n, n);
  a *= 0.8 / std::max(StateSpaceModel(a, rnd(n, m), rnd(p, n), rnd(p, m), dt).spectral_radius(),
                      1e-3);
  return {a, rnd(n, m), rnd(p, n), rnd(p, m), dt};
}

}  // namespace

TEST_CASE("dimension checks reject inconsistent models") {
  CHECK_THROWS_AS(StateSpaceModel(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Ones(2, 1),
                                  Eigen::MatrixXd::Ones(1, 3), Eigen::MatrixXd::Zero(1, 1), 0.1),
                  moorfd::ValidationError);
  auto m = StateSpaceModel::zeros(2, 1, 1, 0.1);
  m.c = Eigen::MatrixXd::Ones(1, 3);
  CHECK_THROWS_AS(m.validate(), moorfd::ValidationError);
  auto z = StateSpaceModel::zeros(3, 2, 4, 0.1);
  CHECK_NOTHROW(z.validate());
  CHECK(z.order() == 3);
  CHECK(z.inputs() == 2);
  CHECK(z.outputs() == 4);
}

TEST_CASE("stability follows the time domain of the model") {
  Eigen::MatrixXd a(1, 1);
  a << 0.5;
  const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  CHECK(StateSpaceModel(a, one, one, one * 0.0, 0.1).is_stable());
  CHECK_FALSE(StateSpaceModel(a, one, one, one * 0.0, 0.0).is_stable());
  CHECK(StateSpaceModel(-a, one, one, one * 0.0, 0.0).is_stable());
  CHECK(StateSpaceModel::zeros(0, 1, 1, 0.1).is_stable());
}

TEST_CASE("frequency response of first-order systems") {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  const double w[] = {0.3, 1.0, 2.5};
  // 1 / (s + 1)
  const auto ct = moorfd::sysid::model_frf(StateSpaceModel(-one, one, one, 0.0 * one), w);
  // 1 / (z - 0.9) at dt = 0.1
  const auto dt = moorfd::sysid::model_frf(StateSpaceModel(0.9 * one, one, one, 0.0 * one, 0.1), w);
  for (int i = 0; i < 3; ++i) {
    const std::complex<double> s(0.0, w[i]);
    CHECK(std::abs(ct[i](0, 0) - 1.0 / (s + 1.0)) < 1e-14);
    const auto z = std::exp(s * 0.1);
    CHECK(std::abs(dt[i](0, 0) - 1.0 / (z - 0.9)) < 1e-12);
  }
  const double above_nyquist[] = {std::numbers::pi / 0.1};
  CHECK_THROWS_AS(moorfd::sysid::model_frf(StateSpaceModel(0.9 * one, one, one, 0.0 * one, 0.1),
                                            above_nyquist),
                  std::domain_error);
}

TEST_CASE("simulated impulse response equals the Markov parameters") {
  const auto m = random_model(4, 2, 3, 0.1, 11);
  const auto markov = moorfd::sysid::markov_parameters(m, 20);
  for (int j = 0; j < 2; ++j) {
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2, 20);
    u(j, 0) = 1.0;
    const auto y = moorfd::sysid::simulate_discrete(m, u, Eigen::VectorXd::Zero(4));
    for (int k = 0; k < 20; ++k) CHECK((y.col(k) - markov[k].col(j)).norm() < 1e-12);
  }
  CHECK((markov[0] - m.d).norm() == 0.0);
  CHECK((markov[2] - m.c * m.a * m.b).norm() < 1e-12);
}

TEST_CASE("block diagonal stacks inputs, outputs and states") {
  const auto a = random_model(2, 1, 2, 0.1, 1);
  const auto b = random_model(3, 2, 1, 0.1, 2);
  const auto c = moorfd::sysid::block_diagonal(a, b);
  CHECK(c.order() == 5);
  CHECK(c.inputs() == 3);
  CHECK(c.outputs() == 3);
  CHECK(c.b.block(0, 1, 2, 2).norm() == 0.0);
  CHECK((c.a.bottomRightCorner(3, 3) - b.a).norm() == 0.0);
}

TEST_CASE("relative band error is zero for identical responses and scales linearly") {
  const auto m = random_model(3, 1, 2, 0.1, 5);
  const double w[] = {0.2, 0.7, 1.4};
  auto f = moorfd::sysid::model_frf(m, w);
  CHECK(moorfd::sysid::relative_band_error(f, f).maxCoeff() == 0.0);
  auto g = f;
  for (auto& x : g) x *= 1.1;
  CHECK(moorfd::sysid::relative_band_error(g, f).maxCoeff() == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("model exchange files round-trip exactly") {
  const auto m = random_model(5, 4, 3, 0.1, 9);
  const auto path = std::filesystem::temp_directory_path() / "moorfd_model_roundtrip.csv";
  moorfd::model_io::write_model_file(m, path);
  const auto r = moorfd::model_io::read_model_file(path);
  CHECK(r.a == m.a);
  CHECK(r.b == m.b);
  CHECK(r.c == m.c);
  CHECK(r.d == m.d);
  CHECK(r.dt == m.dt);
  const auto stat = StateSpaceModel::zeros(0, 2, 3, 0.1);
  moorfd::model_io::write_model_file(stat, path);
  CHECK(moorfd::model_io::read_model_file(path).order() == 0);
  std::filesystem::remove(path);
}
