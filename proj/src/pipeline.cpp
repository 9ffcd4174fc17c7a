#include "moorfd/pipeline.hpp"

#include "moorfd/csv.hpp"
#include "moorfd/errors.hpp"
#include "moorfd/model_io.hpp"
#include "moorfd/truth_models.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace moorfd::pipeline {

namespace {

sysid::IdentOptions ident_options(const config::RunConfig& cfg) {
  sysid::IdentOptions o;
  o.dt = cfg.dt;
  o.kernel_duration = cfg.ident.kernel_duration;
  o.band_min = cfg.ident.band_min;
  o.band_max = cfg.ident.band_max;
  return o;
}

int sample_index(const std::vector<double>& t, double time) {
  return static_cast<int>(std::lower_bound(t.begin(), t.end(), time - 1e-9) - t.begin());
}

std::string opt_text(const std::optional<double>& v) { return v ? csv::sig(*v, 9) : ""; }

void write_tracking_csv(const plant::RunRecord& run, const Eigen::MatrixXd& linear,
                        const linmodel::AssembledModel& m, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << "t,omega_truth,surge_truth,pitch_truth,omega_linear,surge_linear,pitch_linear\n";
  for (std::size_t k = 0; k < run.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out << csv::sig(run.t[k], 9);
    for (int i = 0; i < 3; ++i) out << ',' << csv::sig(run.y_clean(i, kk), 9);
    for (int i = 0; i < 3; ++i) out << ',' << csv::sig(linear(i, kk) + m.y_op(i), 9);
    out << '\n';
  }
}

std::string case_gate(const config::RunConfig& cfg, ScenarioOutcome& o, bool faulted) {
  std::ostringstream note;
  bool ok = true;
  if (o.far > cfg.far_gate()) {
    ok = false;
    note << "far " << csv::sig(o.far, 4) << " above " << csv::sig(cfg.far_gate(), 4) << "; ";
  }
  if (o.pre_fault_confirmed > 0) {
    ok = false;
    note << o.pre_fault_confirmed << " confirmed alarm(s) before the fault; ";
  }
  if (faulted && cfg.gates.require_detection) {
    if (!o.detected) {
      ok = false;
      note << "fault not detected; ";
    } else if (*o.delay > cfg.gates.max_delay) {
      ok = false;
      note << "delay " << csv::sig(*o.delay, 4) << " s above " << cfg.gates.max_delay << " s; ";
    }
  }
  o.gate_passed = ok;
  std::string s = note.str();
  if (s.size() >= 2) s.resize(s.size() - 2);
  return ok ? "pass" : s;
}

}  // namespace

hydro::HydroFrd load_or_synthesize_frd(const config::RunConfig& cfg) {
  if (!cfg.ident.frd_csv.empty()) return hydro::read_hydro_frd(cfg.ident.frd_csv, cfg.ident.ainf_csv);
  const plant::PlantParams p = cfg.plant_params();
  return hydro::generate_synthetic_hydro_dataset(p.truth_radiation, p.truth_wave, p.a_inf,
                                                 cfg.wave.grid(), truth::default_wave_params().shift);
}

IdentifiedModels identify_models(const config::RunConfig& cfg, const hydro::HydroFrd& frd) {
  const auto opts = ident_options(cfg);
  IdentifiedModels m;
  m.rad_planar = sysid::fit_radiation_model(frd, cfg.ident.rad_order, sysid::kPlanarDofs, opts);
  m.rad_out_of_plane = sysid::fit_radiation_model(frd, cfg.ident.rad_order_out_of_plane,
                                                  sysid::kOutOfPlaneDofs, opts);
  m.wave = sysid::fit_wave_force_model(frd, cfg.ident.wave_order, cfg.ident.t_d,
                                       sysid::kPlanarDofs, opts);
  const auto planar = sysid::dof_indices(sysid::kPlanarDofs);
  auto rad_dofs = planar;
  for (int i : sysid::dof_indices(sysid::kOutOfPlaneDofs)) rad_dofs.push_back(i);
  m.rad6 = linmodel::expand_to_dofs(
      sysid::block_diagonal(m.rad_planar.model, m.rad_out_of_plane.model), rad_dofs, rad_dofs);
  m.wave6 = linmodel::expand_to_dofs(m.wave.model, {}, planar);
  return m;
}

linmodel::AssembledModel build_linear_model(const config::RunConfig& cfg,
                                            const plant::PlantParams& p,
                                            const sysid::StateSpaceModel& rad6,
                                            const sysid::StateSpaceModel& wave6) {
  const auto op = linmodel::make_operating_point(p, cfg.v_wind);
  const auto states = mooring::healthy_states(p.lines);
  const auto k_moor = mooring::linearize_mooring_stiffness(p.lines, states, op.eq.xi, 1e-3);
  return linmodel::assemble_linear_model(op, k_moor, rad6, wave6, p, cfg.dt);
}

plant::RunRecord simulate(const config::RunConfig& cfg, const plant::PlantParams& p,
                          std::uint64_t wave_seed, std::uint64_t noise_seed,
                          const std::vector<mooring::FaultEvent>& faults) {
  hydro::WaveSpec ws = cfg.wave;
  ws.seed = wave_seed;
  const auto wave = hydro::realize_wave_elevation(ws, cfg.dt, cfg.duration);
  plant::SimOptions so;
  so.dt_in = cfg.dt_in;
  so.dt_out = cfg.dt;
  return plant::simulate_plant(p, wave, cfg.v_wind, cfg.duration, faults, cfg.noise, noise_seed,
                               so);
}

Eigen::Vector3d tracking_nrmse(const linmodel::AssembledModel& m, const plant::RunRecord& run,
                               double t0, double t1, Eigen::MatrixXd* linear_out) {
  const Eigen::MatrixXd u = linmodel::input_deviation(m, run);
  const Eigen::MatrixXd yl =
      sysid::simulate_discrete(m.dt_model, u, Eigen::VectorXd::Zero(m.dt_model.order()));
  const Eigen::MatrixXd yt = linmodel::output_deviation(m, run.y_clean);
  const int k0 = sample_index(run.t, t0), k1 = sample_index(run.t, t1 + 1e-6);
  if (k1 - k0 < 10) throw ConfigError("tracking window holds too few samples");
  Eigen::Vector3d out;
  for (int i = 0; i < 3; ++i) {
    const Eigen::ArrayXd a = yt.row(i).segment(k0, k1 - k0).transpose().array();
    const Eigen::ArrayXd b = yl.row(i).segment(k0, k1 - k0).transpose().array();
    const double rmse = std::sqrt((a - b).square().mean());
    const double sd = std::sqrt((a - a.mean()).square().mean());
    out(i) = sd > 0.0 ? rmse / sd : (rmse > 0.0 ? INFINITY : 0.0);
  }
  if (linear_out) *linear_out = yl;
  return out;
}

IdentifyOutcome cmd_identify(const config::RunConfig& cfg, const Paths& out) {
  IdentifyOutcome o;
  o.models = identify_models(cfg, load_or_synthesize_frd(cfg));
  model_io::write_model_file(o.models.rad6, out.rad_model());
  model_io::write_model_file(o.models.wave6, out.wave_model());
  auto rep = csv::open_out(out.fit_report());
  rep << "[radiation_planar]\n" << o.models.rad_planar.report.to_text()
      << "[radiation_out_of_plane]\n" << o.models.rad_out_of_plane.report.to_text()
      << "[wave]\n" << o.models.wave.report.to_text();
  o.targets_met = o.models.rad_planar.report.hinf_max() <= 0.05 &&
                  o.models.rad_out_of_plane.report.hinf_max() <= 0.05 &&
                  o.models.wave.report.hinf_max() <= 0.08;
  rep << "targets_met=" << (o.targets_met ? "true" : "false") << '\n';
  return o;
}

CalibrateOutcome cmd_calibrate(const config::RunConfig& cfg, const Paths& out) {
  sysid::StateSpaceModel rad6, wave6;
  if (std::filesystem::exists(out.rad_model()) && std::filesystem::exists(out.wave_model())) {
    rad6 = model_io::read_model_file(out.rad_model());
    wave6 = model_io::read_model_file(out.wave_model());
  } else {
    auto id = cmd_identify(cfg, out);
    rad6 = id.models.rad6;
    wave6 = id.models.wave6;
  }
  const plant::PlantParams p = cfg.plant_params();
  const auto am = build_linear_model(cfg, p, rad6, wave6);
  model_io::write_model_file(am.dt_model, out.linear_model());
  linmodel::write_block_map(am, out.block_map());

  const auto healthy =
      simulate(cfg, p, cfg.seeds.calibration_wave, cfg.seeds.calibration_noise, {});
  detect::CalibrationOptions co;
  co.alpha = cfg.detect.alpha;
  co.tuning.window_start = cfg.detect.window_start;
  co.tuning.window_end = cfg.detect.window_end;
  CalibrateOutcome o;
  o.cal = detect::calibrate_detector(am, cfg.noise, healthy, co);
  detect::write_calibration(o.cal.det, out.calibration());

  Eigen::MatrixXd linear;
  o.tracking = tracking_nrmse(am, healthy, cfg.detect.window_start, cfg.detect.window_end, &linear);
  write_tracking_csv(healthy, linear, am, out.tracking());

  const auto& det = o.cal.det;
  const Eigen::MatrixXd a_cl = det.sys.a - det.l_gain * det.sys.c;
  const double rho_cl = sysid::StateSpaceModel(a_cl, det.sys.b, det.sys.c, det.sys.d, det.sys.dt)
                            .spectral_radius();
  auto rep = csv::open_out(out.calibration_report());
  rep << "q_knobs=" << csv::sig(o.cal.tuning.q_knobs(0), 6) << ','
      << csv::sig(o.cal.tuning.q_knobs(1), 6) << ',' << csv::sig(o.cal.tuning.q_knobs(2), 6)
      << "\ninnovation_ratio=" << csv::sig(o.cal.tuning.innovation_ratio(0), 6) << ','
      << csv::sig(o.cal.tuning.innovation_ratio(1), 6) << ','
      << csv::sig(o.cal.tuning.innovation_ratio(2), 6)
      << "\ntuning_converged=" << (o.cal.tuning.converged ? "true" : "false")
      << "\ntuning_iterations=" << o.cal.tuning.iterations
      << "\nobserver_spectral_radius=" << csv::sig(rho_cl, 9)
      << "\nmean_d=" << csv::sig(det.mean_d, 9) << "\nstd_d=" << csv::sig(det.std_d, 9)
      << "\nthreshold=" << csv::sig(det.threshold, 9) << "\nalpha=" << csv::sig(det.alpha, 9)
      << "\ntracking_nrmse=" << csv::sig(o.tracking(0), 6) << ',' << csv::sig(o.tracking(1), 6)
      << ',' << csv::sig(o.tracking(2), 6) << '\n';
  return o;
}

std::vector<mooring::FaultEvent> case_faults(const config::RunConfig& cfg, int load_case) {
  if (load_case == 0) return {};
  const auto it = cfg.cases.find(load_case);
  if (it == cfg.cases.end()) {
    throw ConfigError("load case " + std::to_string(load_case) + " is not configured");
  }
  return it->second;
}

ScenarioOutcome evaluate_case(const config::RunConfig& cfg, const detect::DetectorModel& det,
                              int load_case, const plant::PlantParams& p, const Paths* out) {
  const auto faults = case_faults(cfg, load_case);
  const auto run = simulate(cfg, p, cfg.seeds.scenario_wave, cfg.seeds.scenario_noise, faults);
  detect::DetectionOptions dopt;
  dopt.hold = cfg.detect.hold;
  dopt.warmup = cfg.detect.warmup;
  const auto rep = detect::run_detection(det, run, dopt);

  ScenarioOutcome o;
  o.load_case = load_case;
  o.detected = rep.detected();
  o.delay = rep.detection_delay;
  o.far = rep.far;
  o.confirmed_alarms = static_cast<int>(rep.confirmations.size());
  const double t_fault = rep.fault_time.value_or(INFINITY);
  o.pre_fault_confirmed = static_cast<int>(
      std::count_if(rep.confirmations.begin(), rep.confirmations.end(),
                    [&](double t) { return t < t_fault - 1e-9; }));
  o.threshold = rep.threshold;
  o.alpha = rep.alpha;
  o.gate_note = case_gate(cfg, o, !faults.empty());
  if (out) {
    plant::write_run_csv(run, out->run_csv(load_case));
    detect::write_detection_csv(rep, out->detect_csv(load_case));
    auto txt = csv::open_out(out->report(load_case));
    txt << "case=" << load_case << '\n' << detect::detection_summary(rep) << "gate=" << o.gate_note
        << '\n';
    o.files = {out->run_csv(load_case), out->detect_csv(load_case), out->report(load_case)};
  }
  return o;
}

ScenarioOutcome cmd_run(const config::RunConfig& cfg, const Paths& out, int load_case) {
  if (!std::filesystem::exists(out.calibration())) {
    throw ConfigError("no calibration at " + out.calibration().string() + "; run calibrate first");
  }
  const auto det = detect::read_calibration(out.calibration());
  return evaluate_case(cfg, det, load_case, cfg.plant_params(), &out);
}

bool BatchOutcome::gates_passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const auto& c) { return c.gate_passed; });
}

BatchOutcome cmd_batch(const config::RunConfig& cfg, const Paths& out, bool parallel) {
  if (!std::filesystem::exists(out.calibration())) cmd_calibrate(cfg, out);
  const auto det = detect::read_calibration(out.calibration());
  const plant::PlantParams p = cfg.plant_params();
  std::vector<int> ids{0};
  for (const auto& [id, faults] : cfg.cases) ids.push_back(id);

  BatchOutcome b;
  if (parallel) {
    std::vector<std::future<ScenarioOutcome>> jobs;
    for (int id : ids) {
      jobs.push_back(std::async(std::launch::async,
                                [&, id] { return evaluate_case(cfg, det, id, p, &out); }));
    }
    for (auto& j : jobs) b.cases.push_back(j.get());
  } else {
    for (int id : ids) b.cases.push_back(evaluate_case(cfg, det, id, p, &out));
  }
  write_summary(b, out.summary());
  return b;
}

void cmd_wave_export(const config::RunConfig& cfg, const Paths& out) {
  hydro::WaveSpec ws = cfg.wave;
  ws.seed = cfg.seeds.scenario_wave;
  hydro::write_wave_csv(hydro::realize_wave_elevation(ws, cfg.dt, cfg.duration),
                        out.dir / "wave.csv");
}

void cmd_frd_synth(const config::RunConfig& cfg, const Paths& out) {
  config::RunConfig synth = cfg;
  synth.ident.frd_csv.clear();
  synth.ident.ainf_csv.clear();
  hydro::write_hydro_frd(load_or_synthesize_frd(synth), out.dir / "frd.csv", out.dir / "ainf.csv");
}

void write_summary(const BatchOutcome& b, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << "case,detected,delay_s,far,threshold,alpha\n";
  for (const auto& c : b.cases) {
    out << c.load_case << ',' << (c.detected ? "true" : "false") << ',' << opt_text(c.delay) << ','
        << csv::sig(c.far, 9) << ',' << csv::sig(c.threshold, 9) << ',' << csv::sig(c.alpha, 9)
        << '\n';
  }
}

}  // namespace moorfd::pipeline
