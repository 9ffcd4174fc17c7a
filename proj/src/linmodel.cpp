#include "moorfd/linmodel.hpp"

#include "moorfd/csv.hpp"
#include "moorfd/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace moorfd::linmodel {

using sysid::StateSpaceModel;

namespace {

constexpr int kMech = 13;  // omega, xi_dot(6), xi(6)

}  // namespace

AeroGradients linearize_aero(const plant::PlantParams& p, const plant::Equilibrium& eq,
                             double rel_step) {
  if (!(rel_step > 0.0)) throw ConfigError("aero linearization step must be positive");
  auto loads = [&](double w, double th, double v) {
    return plant::aero_loads(v, w, th, p.rotor, p.rho_air);
  };
  const double hw = rel_step * std::max(std::abs(eq.omega), 1e-3);
  const double hp = rel_step * std::max(std::abs(eq.pitch), 0.1);
  const double hv = rel_step * std::max(std::abs(eq.v_wind), 1.0);
  AeroGradients g;
  const auto wp = loads(eq.omega + hw, eq.pitch, eq.v_wind);
  const auto wm = loads(eq.omega - hw, eq.pitch, eq.v_wind);
  const auto pp = loads(eq.omega, eq.pitch + hp, eq.v_wind);
  const auto pm = loads(eq.omega, eq.pitch - hp, eq.v_wind);
  const auto vp = loads(eq.omega, eq.pitch, eq.v_wind + hv);
  const auto vm = loads(eq.omega, eq.pitch, eq.v_wind - hv);
  g.dq_domega = (wp.q_aero - wm.q_aero) / (2.0 * hw);
  g.dt_domega = (wp.thrust - wm.thrust) / (2.0 * hw);
  g.dq_dpitch = (pp.q_aero - pm.q_aero) / (2.0 * hp);
  g.dt_dpitch = (pp.thrust - pm.thrust) / (2.0 * hp);
  g.dq_dv = (vp.q_aero - vm.q_aero) / (2.0 * hv);
  g.dt_dv = (vp.thrust - vm.thrust) / (2.0 * hv);
  g.sign_violation = !(g.dq_dpitch < 0.0);
  return g;
}

OperatingPoint make_operating_point(const plant::PlantParams& p, double v_wind,
                                    double rel_step) {
  OperatingPoint op;
  op.eq = plant::find_equilibrium(v_wind, p);
  op.grad = p.aero_enabled ? linearize_aero(p, op.eq, rel_step) : AeroGradients{};
  return op;
}

StateSpaceModel expand_to_dofs(const StateSpaceModel& m, const std::vector<int>& input_dofs,
                               const std::vector<int>& output_dofs) {
  Eigen::MatrixXd pin = Eigen::MatrixXd::Identity(m.inputs(), m.inputs());
  Eigen::MatrixXd pout = Eigen::MatrixXd::Identity(m.outputs(), m.outputs());
  if (!input_dofs.empty()) {
    if (static_cast<int>(input_dofs.size()) != m.inputs()) {
      throw ValidationError("input DOF list does not match the model");
    }
    pin = Eigen::MatrixXd::Zero(m.inputs(), 6);
    for (std::size_t i = 0; i < input_dofs.size(); ++i) pin(static_cast<Eigen::Index>(i), input_dofs[i]) = 1.0;
  }
  if (!output_dofs.empty()) {
    if (static_cast<int>(output_dofs.size()) != m.outputs()) {
      throw ValidationError("output DOF list does not match the model");
    }
    pout = Eigen::MatrixXd::Zero(6, m.outputs());
    for (std::size_t i = 0; i < output_dofs.size(); ++i) pout(output_dofs[i], static_cast<Eigen::Index>(i)) = 1.0;
  }
  StateSpaceModel out(m.a, m.b * pin, pout * m.c, pout * m.d * pin, m.dt);
  return out;
}

StateSpaceModel mechanical_model(const OperatingPoint& op, const Matrix6d& k_moor,
                                 const plant::PlantParams& p) {
  const Matrix6d mass = p.generalized_mass();
  Eigen::LLT<Matrix6d> llt(mass);
  if (llt.info() != Eigen::Success) throw ConfigError("generalized mass is not positive definite");
  const Matrix6d minv = llt.solve(Matrix6d::Identity());
  const auto& g = op.grad;
  const double h = p.rotor.hub_height;
  const double j = p.rotor.inertia();

  // Relative wind perturbation: dv - dxi_dot_1 - h dxi_dot_5.
  Eigen::Matrix<double, 1, 6> vrel = Eigen::Matrix<double, 1, 6>::Zero();
  vrel(0) = -1.0;
  vrel(4) = -h;
  Eigen::Matrix<double, 6, 1> thrust_map = Eigen::Matrix<double, 6, 1>::Zero();
  thrust_map(0) = 1.0;
  thrust_map(4) = h;

  StateSpaceModel m = StateSpaceModel::zeros(kMech, 9, 3, 0.0);
  // Rotor: J domega' = dQ/dw dw + dQ/dpitch dpitch + dQ/dv dv_rel - tau dQ_G.
  m.a(0, 0) = g.dq_domega / j;
  m.a.block(0, 1, 1, 6) = g.dq_dv / j * vrel;
  m.b(0, 0) = g.dq_dpitch / j;
  m.b(0, 1) = g.dq_dv / j;
  m.b(0, 2) = -p.rotor.tau / j;
  // Platform: M xi'' = -(K_hs + K_moor) xi - B_v xi_dot + thrust + F.
  m.a.block(1, 0, 6, 1) = minv * thrust_map * g.dt_domega;
  m.a.block(1, 1, 6, 6) = minv * (thrust_map * g.dt_dv * vrel - p.b_viscous);
  m.a.block(1, 7, 6, 6) = -minv * (p.k_hydrostatic + k_moor);
  m.b.block(1, 0, 6, 1) = minv * thrust_map * g.dt_dpitch;
  m.b.block(1, 1, 6, 1) = minv * thrust_map * g.dt_dv;
  m.b.block(1, 3, 6, 6) = minv;
  m.a.block(7, 1, 6, 6) = Matrix6d::Identity();
  m.c(0, 0) = 1.0;
  m.c(1, 7) = 1.0;
  m.c(2, 11) = 1.0;
  m.input_labels = {"pitch", "wind", "gen_torque", "f_surge", "f_sway", "f_heave",
                    "f_roll", "f_pitch", "f_yaw"};
  m.output_labels = {"omega_rotor", "surge", "pitch_platform"};
  return m;
}

StateSpaceModel discretize_zoh(const StateSpaceModel& ct, double dt) {
  ct.validate();
  if (ct.is_discrete()) throw ValidationError("discretize_zoh needs a continuous model");
  if (!(dt > 0.0)) throw ConfigError("discretization step must be positive");
  const int n = ct.order(), m = ct.inputs();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = ct.a * dt;
  aug.topRightCorner(n, m) = ct.b * dt;
  const Eigen::MatrixXd e = aug.exp();
  StateSpaceModel d(e.topLeftCorner(n, n), e.topRightCorner(n, m), ct.c, ct.d, dt);
  d.input_labels = ct.input_labels;
  d.output_labels = ct.output_labels;
  return d;
}

AssembledModel assemble_linear_model(const OperatingPoint& op, const Matrix6d& k_moor,
                                     const StateSpaceModel& rad_model,
                                     const StateSpaceModel& wave_model,
                                     const plant::PlantParams& p, double dt) {
  rad_model.validate();
  wave_model.validate();
  if (rad_model.inputs() != 6 || rad_model.outputs() != 6) {
    throw ConfigError("radiation model must map 6 DOF velocities to 6 forces");
  }
  if (wave_model.inputs() != 1 || wave_model.outputs() != 6) {
    throw ConfigError("wave-force model must map eta to 6 forces");
  }
  for (const auto* m : {&rad_model, &wave_model}) {
    if (m->order() > 0 && std::abs(m->dt - dt) > 1e-12 * dt) {
      throw ConfigError("identified models must be discrete with the detector step");
    }
  }
  AssembledModel out;
  out.op = op;
  out.ct = mechanical_model(op, k_moor, p);
  const StateSpaceModel md = discretize_zoh(out.ct, dt);

  const int nr = rad_model.order(), nw = wave_model.order();
  const int n = kMech + nr + nw;
  const Eigen::MatrixXd bu = md.b.leftCols(3);
  const Eigen::MatrixXd bf = md.b.rightCols(6);
  Eigen::MatrixXd sv = Eigen::MatrixXd::Zero(6, kMech);
  sv.block(0, 1, 6, 6) = Matrix6d::Identity();

  StateSpaceModel d = StateSpaceModel::zeros(n, 4, 3, dt);
  d.a.topLeftCorner(kMech, kMech) = md.a - bf * rad_model.d * sv;
  if (nr > 0) {
    d.a.block(0, kMech, kMech, nr) = -bf * rad_model.c;
    d.a.block(kMech, 0, nr, kMech) = rad_model.b * sv;
    d.a.block(kMech, kMech, nr, nr) = rad_model.a;
  }
  if (nw > 0) {
    d.a.block(0, kMech + nr, kMech, nw) = bf * wave_model.c;
    d.a.block(kMech + nr, kMech + nr, nw, nw) = wave_model.a;
    d.b.block(kMech + nr, 3, nw, 1) = wave_model.b;
  }
  // A wave-model feedthrough would let eta act on the mechanical rows.
  if (wave_model.d.cwiseAbs().maxCoeff() > 0.0) {
    d.b.block(0, 3, kMech, 1) = bf * wave_model.d;
  }
  d.b.block(0, 0, kMech, 3) = bu;
  d.c.leftCols(kMech) = out.ct.c;
  d.input_labels = {"pitch", "wind", "gen_torque", "eta"};
  d.output_labels = out.ct.output_labels;
  out.dt_model = d;
  out.c_out = d.c;
  out.blocks = {{"omega_rotor", 0, 1}, {"xi_dot", 1, 6}, {"xi", 7, 6},
                {"x_r", kMech, nr}, {"x_w", kMech + nr, nw}};
  out.u_op << op.eq.pitch, op.eq.v_wind, op.eq.q_g, 0.0;
  out.y_op << op.eq.omega, op.eq.xi(0), op.eq.xi(4);
  return out;
}

Eigen::MatrixXd input_deviation(const AssembledModel& m, const plant::RunRecord& r) {
  return r.u.colwise() - m.u_op;
}

Eigen::MatrixXd output_deviation(const AssembledModel& m, const Eigen::MatrixXd& y) {
  return y.colwise() - m.y_op;
}

void write_block_map(const AssembledModel& m, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << "block,offset,size\n";
  for (const auto& b : m.blocks) out << b.name << ',' << b.offset << ',' << b.size << '\n';
  out << "input,0,pitch\ninput,1,wind\ninput,2,gen_torque\ninput,3,eta\n";
  out << "output,0,omega_rotor\noutput,1,surge\noutput,2,pitch_platform\n";
}

}  // namespace moorfd::linmodel
