#include "moorfd/errors.hpp"
#include "moorfd/linmodel.hpp"
#include "moorfd/mooring.hpp"
#include "moorfd/sysid.hpp"
#include "moorfd/truth_models.hpp"

#include <doctest.h>

#include <cmath>

using namespace moorfd;
using sysid::StateSpaceModel;

TEST_CASE("zero-order hold of a scalar lag") {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  const auto d = linmodel::discretize_zoh(StateSpaceModel(-one, one, one, 0.0 * one), 0.1);
  CHECK(std::abs(d.a(0, 0) - std::exp(-0.1)) <= 1e-12);
  CHECK(std::abs(d.b(0, 0) - (1.0 - std::exp(-0.1))) <= 1e-12);
  CHECK(d.dt == 0.1);
}

TEST_CASE("zero-order hold of a double integrator") {
  Eigen::MatrixXd a(2, 2), b(2, 1), c(1, 2), dd(1, 1);
  a << 0, 1, 0, 0;
  b << 0, 1;
  c << 1, 0;
  dd << 0;
  const auto d = linmodel::discretize_zoh(StateSpaceModel(a, b, c, dd), 0.1);
  CHECK(std::abs(d.a(0, 1) - 0.1) < 1e-15);
  CHECK(std::abs(d.b(0, 0) - 0.005) < 1e-15);
  CHECK(std::abs(d.b(1, 0) - 0.1) < 1e-15);
  CHECK_THROWS_AS(linmodel::discretize_zoh(d, 0.1), ValidationError);
}

TEST_CASE("DOF expansion places channels and rejects bad lists") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2) * 0.5;
  Eigen::MatrixXd b(2, 2), c(2, 2);
  b << 1, 2, 3, 4;
  c << 5, 6, 7, 8;
  const StateSpaceModel m(a, b, c, Eigen::MatrixXd::Zero(2, 2), 0.1);
  const auto e = linmodel::expand_to_dofs(m, {0, 4}, {2, 4});
  CHECK(e.inputs() == 6);
  CHECK(e.outputs() == 6);
  CHECK(e.b.col(4) == b.col(1));
  CHECK(e.b.col(1).norm() == 0.0);
  CHECK(e.c.row(2) == c.row(0));
  CHECK_THROWS_AS(linmodel::expand_to_dofs(m, {0}, {2, 4}), ValidationError);
}

TEST_CASE("aerodynamic gradients at the operating point") {
  const auto p = plant::default_plant_params();
  const auto op = linmodel::make_operating_point(p, 16.0);
  CHECK_FALSE(op.grad.sign_violation);
  CHECK(op.grad.dq_dpitch < 0.0);
  CHECK(op.grad.dq_dv > 0.0);
  CHECK(op.grad.dt_dv > 0.0);
}

TEST_CASE("assembled model is stable with the documented layout") {
  const auto p = plant::default_plant_params();
  const auto op = linmodel::make_operating_point(p, 16.0);
  const auto k = mooring::linearize_mooring_stiffness(p.lines, mooring::healthy_states(p.lines),
                                                      op.eq.xi);
  const auto frd = truth::default_hydro_dataset();
  const auto rad = linmodel::expand_to_dofs(
      sysid::block_diagonal(sysid::fit_radiation_model(frd, 6, sysid::kPlanarDofs).model,
                            sysid::fit_radiation_model(frd, 4, sysid::kOutOfPlaneDofs).model),
      {0, 2, 4, 1, 3, 5}, {0, 2, 4, 1, 3, 5});
  const auto wave = linmodel::expand_to_dofs(
      sysid::fit_wave_force_model(frd, 8, 4.0, sysid::kPlanarDofs).model, {}, {0, 2, 4});
  const auto m = linmodel::assemble_linear_model(op, k, rad, wave, p, 0.1);
  CHECK(m.dt_model.is_stable());
  CHECK(m.dt_model.inputs() == 4);
  CHECK(m.dt_model.outputs() == 3);
  CHECK(m.dt_model.order() == 13 + rad.order() + wave.order());
  CHECK(m.ct.order() == 13);
  CHECK(m.blocks.front().name == "omega_rotor");
  CHECK(m.y_op(0) == op.eq.omega);
  CHECK(m.u_op(0) == op.eq.pitch);

  // Zero input deviation keeps the model at rest.
  const Eigen::MatrixXd u = Eigen::MatrixXd::Zero(4, 50);
  CHECK(sysid::simulate_discrete(m.dt_model, u, Eigen::VectorXd::Zero(m.dt_model.order())).norm() ==
        0.0);

  auto singular = p;
  singular.m_rb.setZero();
  singular.a_inf.setZero();
  CHECK_THROWS_AS(linmodel::mechanical_model(op, k, singular), ConfigError);
}
