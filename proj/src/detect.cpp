#include "moorfd/detect.hpp"

#include "moorfd/csv.hpp"
#include "moorfd/errors.hpp"
#include "moorfd/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace moorfd::detect {

namespace {

void check_dare_inputs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c,
                       const Eigen::MatrixXd& q, const Eigen::MatrixXd& r) {
  const auto n = a.rows(), p = c.rows();
  if (a.cols() != n || c.cols() != n || q.rows() != n || q.cols() != n || r.rows() != p ||
      r.cols() != p) {
    throw ValidationError("DARE: inconsistent matrix dimensions");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(r).info() != Eigen::Success) {
    throw ValidationError("DARE: measurement covariance is not positive definite");
  }
}

Eigen::MatrixXd sym(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

double rel_change(const Eigen::MatrixXd& next, const Eigen::MatrixXd& prev) {
  const double scale = std::max(next.norm(), 1e-300);
  return (next - prev).norm() / scale;
}

// Structure-preserving doubling on the dual (filtering) Riccati equation.
DareResult dare_doubling(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c,
                         const Eigen::MatrixXd& q, const Eigen::MatrixXd& r, double tol,
                         int max_iter) {
  const auto n = a.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd ak = a.transpose();
  Eigen::MatrixXd gk = sym(c.transpose() * r.llt().solve(c));
  Eigen::MatrixXd hk = q;
  DareResult res;
  for (int it = 1; it <= std::min(max_iter, 200); ++it) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> w(eye + gk * hk);
    const Eigen::MatrixXd w_a = w.solve(ak);
    const Eigen::MatrixXd w_g = w.solve(gk);
    const Eigen::MatrixXd h_next = sym(hk + ak.transpose() * hk * w_a);
    gk = sym(gk + ak * w_g * ak.transpose());
    ak = ak * w_a;
    res.iterations = it;
    if (!h_next.allFinite()) {
      throw NumericalError("DARE doubling diverged after " + std::to_string(it) + " steps");
    }
    const double change = rel_change(h_next, hk);
    hk = h_next;
    if (change <= tol) {
      res.p = hk;
      return res;
    }
  }
  throw NumericalError("DARE doubling did not converge in " + std::to_string(res.iterations) +
                       " steps");
}

DareResult dare_fixed_point(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c,
                            const Eigen::MatrixXd& q, const Eigen::MatrixXd& r, double tol,
                            int max_iter) {
  Eigen::MatrixXd p = q;
  DareResult res;
  double change = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::MatrixXd s = c * p * c.transpose() + r;
    const Eigen::MatrixXd apc = a * p * c.transpose();
    const Eigen::MatrixXd next =
        sym(a * p * a.transpose() - apc * s.llt().solve(apc.transpose()) + q);
    res.iterations = it;
    if (!next.allFinite()) {
      throw NumericalError("DARE iteration diverged after " + std::to_string(it) + " steps");
    }
    change = rel_change(next, p);
    p = next;
    if (change <= tol) {
      res.p = p;
      return res;
    }
  }
  throw NumericalError("DARE iteration did not converge in " + std::to_string(max_iter) +
                       " steps (last relative change " + csv::sig(change, 3) + ")");
}

std::optional<double> fault_time_of(const plant::RunRecord& run) {
  if (run.fault_log.empty()) return std::nullopt;
  double t = run.fault_log.front().time;
  for (const auto& f : run.fault_log) t = std::min(t, f.time);
  return t;
}

int sample_at_or_after(const std::vector<double>& t, double time) {
  const auto it = std::lower_bound(t.begin(), t.end(), time - 1e-9);
  return static_cast<int>(it - t.begin());
}

Eigen::VectorXd channel_variance(const Eigen::MatrixXd& z) {
  const Eigen::VectorXd mean = z.rowwise().mean();
  const Eigen::MatrixXd c = z.colwise() - mean;
  return c.rowwise().squaredNorm() / static_cast<double>(z.cols() - 1);
}

// Process-noise knob indices: rotor speed, surge velocity, pitch velocity.
constexpr int kKnobState[3] = {0, 1, 5};

}  // namespace

DareResult solve_dare_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                           DareMethod method, double tol, int max_iter) {
  check_dare_inputs(a, c, q, r);
  DareResult res = method == DareMethod::Doubling ? dare_doubling(a, c, q, r, tol, max_iter)
                                                  : dare_fixed_point(a, c, q, r, tol, max_iter);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(res.p, Eigen::EigenvaluesOnly);
  const double floor = -1e-9 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < floor) {
    throw NumericalError("DARE solution is indefinite (min eigenvalue " +
                         csv::sig(es.eigenvalues().minCoeff(), 3) + ")");
  }
  const Eigen::MatrixXd s = c * res.p * c.transpose() + r;
  res.l = s.llt().solve(c * res.p * a.transpose()).transpose();
  return res;
}

double mahalanobis_distance(const Eigen::VectorXd& z, const Eigen::VectorXd& z_bar,
                            const Eigen::LLT<Eigen::MatrixXd>& sigma_llt) {
  const Eigen::VectorXd w = sigma_llt.matrixL().solve(z - z_bar);
  return w.norm();
}

BaselineStats baseline_statistics(const Eigen::MatrixXd& z, int discard, int min_samples) {
  if (discard < 0 || z.cols() - discard < min_samples) {
    throw ConfigError("baseline needs at least " + std::to_string(min_samples) +
                      " retained residual samples");
  }
  const Eigen::MatrixXd zr = z.rightCols(z.cols() - discard);
  const auto n = static_cast<double>(zr.cols());
  BaselineStats s;
  s.z_bar = zr.rowwise().mean();
  const Eigen::MatrixXd c = zr.colwise() - s.z_bar;
  s.sigma = c * c.transpose() / (n - 1.0);
  Eigen::LLT<Eigen::MatrixXd> llt(s.sigma);
  const double tr = s.sigma.trace();
  if (llt.info() != Eigen::Success || !(tr > 0.0) ||
      llt.matrixL().toDenseMatrix().diagonal().minCoeff() <= 1e-12 * std::sqrt(tr)) {
    throw NumericalError(
        "residual covariance is singular; collect more data or review the residual channels");
  }
  Eigen::ArrayXd d(zr.cols());
  for (Eigen::Index k = 0; k < zr.cols(); ++k) d(k) = mahalanobis_distance(zr.col(k), s.z_bar, llt);
  s.mean_d = d.mean();
  s.std_d = std::sqrt((d - s.mean_d).square().sum() / (n - 1.0));
  return s;
}

Threshold chebyshev_threshold(double mean_d, double std_d, double alpha) {
  if (!(alpha > 0.0) || !(std_d >= 0.0)) throw ConfigError("threshold needs alpha > 0, std >= 0");
  return {mean_d + alpha * std_d, 1.0 / (alpha * alpha)};
}

void DetectorModel::prepare() {
  llt_.compute(sigma);
  if (llt_.info() != Eigen::Success) throw NumericalError("residual covariance is not PD");
}

ObserverOutput observer_step(const DetectorModel& det, const Eigen::VectorXd& x_hat,
                             const Eigen::VectorXd& u, const Eigen::VectorXd& y) {
  ObserverOutput o;
  o.y_hat = det.sys.c * x_hat + det.sys.d * u;
  o.z = y - o.y_hat;
  o.x_next = det.sys.a * x_hat + det.sys.b * u + det.l_gain * o.z;
  return o;
}

Eigen::MatrixXd residual_series(const DetectorModel& det, const Eigen::MatrixXd& u,
                                const Eigen::MatrixXd& y) {
  if (u.cols() != y.cols() || u.rows() != det.sys.inputs() || y.rows() != det.sys.outputs()) {
    throw ValidationError("residual_series: data and model dimensions differ");
  }
  Eigen::MatrixXd z(y.rows(), y.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(det.sys.order());
  for (Eigen::Index k = 0; k < y.cols(); ++k) {
    auto o = observer_step(det, x, u.col(k), y.col(k));
    z.col(k) = o.z;
    x = std::move(o.x_next);
  }
  return z;
}

DetectionReport run_detection(const DetectorModel& det, const plant::RunRecord& run,
                              const DetectionOptions& opts) {
  if (std::abs(run.dt_out - det.sys.dt) > 1e-12) {
    throw ConfigError("run step " + csv::exact(run.dt_out) + " s differs from detector step " +
                      csv::exact(det.sys.dt) + " s");
  }
  if (opts.hold < 1) throw ConfigError("hold must be >= 1");
  const Eigen::MatrixXd u = run.u.colwise() - det.u_op;
  const Eigen::MatrixXd y = run.y.colwise() - det.y_op;
  const Eigen::MatrixXd z = residual_series(det, u, y);

  DetectionReport r;
  r.t = run.t;
  r.threshold = det.threshold;
  r.alpha = det.alpha;
  r.fault_time = fault_time_of(run);
  const int n = static_cast<int>(run.t.size());
  const int k_warm = sample_at_or_after(run.t, opts.warmup);
  const int k_fault = r.fault_time ? sample_at_or_after(run.t, *r.fault_time) : n;
  r.d_series.resize(static_cast<std::size_t>(n));
  r.raw.assign(static_cast<std::size_t>(n), false);
  int streak = 0, healthy_hits = 0;
  for (int k = 0; k < n; ++k) {
    const double d = mahalanobis_distance(z.col(k), det.z_bar, det.sigma_llt());
    const auto ks = static_cast<std::size_t>(k);
    r.d_series[ks] = d;
    if (k < k_warm) continue;
    const bool hit = d > det.threshold;
    r.raw[ks] = hit;
    if (hit) r.alarms.push_back({run.t[ks], d});
    if (k < k_fault) {
      ++r.far_samples;
      if (hit) ++healthy_hits;
    }
    streak = hit ? streak + 1 : 0;
    if (streak == opts.hold) r.confirmations.push_back(run.t[ks]);
  }
  if (!r.confirmations.empty()) r.first_confirmed_alarm = r.confirmations.front();
  r.far = r.far_samples > 0 ? static_cast<double>(healthy_hits) / r.far_samples : 0.0;
  if (r.fault_time) {
    for (double tc : r.confirmations) {
      if (tc >= *r.fault_time - 1e-9) {
        r.detection_delay = std::max(0.0, tc - *r.fault_time);
        break;
      }
    }
  }
  return r;
}

Eigen::MatrixXd process_noise(const linmodel::AssembledModel& m, const Eigen::Vector3d& knobs,
                              double floor) {
  const int n = m.dt_model.order();
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, floor);
  for (int i = 0; i < 3; ++i) diag(kKnobState[i]) = knobs(i);
  return diag.asDiagonal();
}

Eigen::MatrixXd measurement_noise(const plant::NoiseSpec& noise) {
  Eigen::Vector3d sd(noise.omega_rotor, noise.surge, noise.pitch);
  const Eigen::Vector3d floor(1e-5, 1e-4, 1e-6);
  return sd.cwiseMax(floor).array().square().matrix().asDiagonal();
}

TuningResult tune_process_noise(const linmodel::AssembledModel& m, const Eigen::MatrixXd& r_cov,
                                const plant::RunRecord& healthy, const TuningOptions& opts) {
  DetectorModel det;
  det.sys = m.dt_model;
  det.r_cov = r_cov;
  const Eigen::MatrixXd u = linmodel::input_deviation(m, healthy);
  const Eigen::MatrixXd y = linmodel::output_deviation(m, healthy.y);
  const int k0 = sample_at_or_after(healthy.t, opts.window_start);
  const int k1 = sample_at_or_after(healthy.t, opts.window_end + 1e-6);
  if (k1 - k0 < 100) throw ConfigError("tuning window holds too few samples");

  TuningResult res;
  res.q_knobs = opts.q_initial;
  for (int it = 1; it <= opts.max_iter; ++it) {
    res.iterations = it;
    det.q_cov = process_noise(m, res.q_knobs, opts.q_floor);
    const DareResult g = solve_dare_gain(det.sys.a, det.sys.c, det.q_cov, r_cov);
    det.l_gain = g.l;
    const Eigen::MatrixXd z = residual_series(det, u, y).middleCols(k0, k1 - k0);
    const Eigen::VectorXd theory = (det.sys.c * g.p * det.sys.c.transpose() + r_cov).diagonal();
    res.innovation_ratio = channel_variance(z).cwiseQuotient(theory);
    if (((res.innovation_ratio.array() - 1.0).abs() <= opts.tolerance).all()) {
      res.converged = true;
      break;
    }
    for (int i = 0; i < 3; ++i) {
      const double step = std::clamp(res.innovation_ratio(i), 0.05, 20.0);
      res.q_knobs(i) = std::max(res.q_knobs(i) * step * step, opts.q_floor);
    }
  }
  return res;
}

Calibration calibrate_detector(const linmodel::AssembledModel& m, const plant::NoiseSpec& noise,
                               const plant::RunRecord& healthy, const CalibrationOptions& opts) {
  Calibration cal;
  auto& det = cal.det;
  det.sys = m.dt_model;
  det.u_op = m.u_op;
  det.y_op = m.y_op;
  det.alpha = opts.alpha;
  det.r_cov = measurement_noise(noise);
  cal.tuning = tune_process_noise(m, det.r_cov, healthy, opts.tuning);
  det.q_cov = process_noise(m, cal.tuning.q_knobs, opts.tuning.q_floor);
  det.l_gain = solve_dare_gain(det.sys.a, det.sys.c, det.q_cov, det.r_cov).l;

  const Eigen::MatrixXd z = residual_series(det, linmodel::input_deviation(m, healthy),
                                            linmodel::output_deviation(m, healthy.y));
  const int k0 = sample_at_or_after(healthy.t, opts.tuning.window_start);
  const int k1 = sample_at_or_after(healthy.t, opts.tuning.window_end + 1e-6);
  const BaselineStats s = baseline_statistics(z.leftCols(k1), k0);
  det.z_bar = s.z_bar;
  det.sigma = s.sigma;
  det.mean_d = s.mean_d;
  det.std_d = s.std_d;
  det.threshold = chebyshev_threshold(s.mean_d, s.std_d, opts.alpha).value;
  det.prepare();
  return cal;
}

void write_calibration(const DetectorModel& det, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  model_io::write_model(out, det.sys);
  model_io::write_matrix(out, "l_gain", det.l_gain);
  model_io::write_matrix(out, "q_cov", det.q_cov);
  model_io::write_matrix(out, "r_cov", det.r_cov);
  model_io::write_matrix(out, "u_op", det.u_op);
  model_io::write_matrix(out, "y_op", det.y_op);
  model_io::write_matrix(out, "zbar", det.z_bar);
  model_io::write_matrix(out, "sigma", det.sigma);
  model_io::write_scalar(out, "mean_d", det.mean_d);
  model_io::write_scalar(out, "std_d", det.std_d);
  model_io::write_scalar(out, "alpha", det.alpha);
  model_io::write_scalar(out, "threshold", det.threshold);
}

DetectorModel read_calibration(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path);
  std::size_t pos = 0;
  DetectorModel det;
  det.sys = model_io::read_model(lines, pos);
  const int n = det.sys.order(), p = det.sys.outputs();
  if (!det.sys.is_discrete() || p != 3 || det.sys.inputs() != 4) {
    throw ConfigError("calibration: model must be discrete with 4 inputs and 3 outputs");
  }
  auto expect = [&](const Eigen::MatrixXd& m, Eigen::Index r, Eigen::Index c, const char* what) {
    if (m.rows() != r || m.cols() != c) throw ConfigError(std::string("calibration: bad ") + what);
  };
  det.l_gain = model_io::read_matrix(lines, pos, "l_gain");
  expect(det.l_gain, n, p, "l_gain");
  det.q_cov = model_io::read_matrix(lines, pos, "q_cov");
  expect(det.q_cov, n, n, "q_cov");
  det.r_cov = model_io::read_matrix(lines, pos, "r_cov");
  expect(det.r_cov, p, p, "r_cov");
  const Eigen::MatrixXd u_op = model_io::read_matrix(lines, pos, "u_op");
  expect(u_op, 4, 1, "u_op");
  det.u_op = u_op;
  const Eigen::MatrixXd y_op = model_io::read_matrix(lines, pos, "y_op");
  expect(y_op, 3, 1, "y_op");
  det.y_op = y_op;
  det.z_bar = model_io::read_matrix(lines, pos, "zbar");
  expect(det.z_bar, p, 1, "zbar");
  det.sigma = model_io::read_matrix(lines, pos, "sigma");
  expect(det.sigma, p, p, "sigma");
  det.mean_d = model_io::read_scalar(lines, pos, "mean_d");
  det.std_d = model_io::read_scalar(lines, pos, "std_d");
  det.alpha = model_io::read_scalar(lines, pos, "alpha");
  det.threshold = model_io::read_scalar(lines, pos, "threshold");
  if (pos != lines.size()) throw ConfigError("calibration: trailing content");
  det.prepare();
  return det;
}

void write_detection_csv(const DetectionReport& r, const std::filesystem::path& path) {
  auto out = csv::open_out(path);
  out << "t,d,threshold,alarm\n";
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    out << csv::sig(r.t[k], 9) << ',' << csv::sig(r.d_series[k], 9) << ','
        << csv::sig(r.threshold, 9) << ',' << (r.raw[k] ? 1 : 0) << '\n';
  }
}

std::string detection_summary(const DetectionReport& r) {
  std::ostringstream s;
  auto opt = [](const std::optional<double>& v) { return v ? csv::sig(*v, 9) : std::string("none"); };
  s << "detected=" << (r.detected() ? "true" : "false") << '\n'
    << "fault_time=" << opt(r.fault_time) << '\n'
    << "first_confirmed_alarm=" << opt(r.first_confirmed_alarm) << '\n'
    << "detection_delay=" << opt(r.detection_delay) << '\n'
    << "far=" << csv::sig(r.far, 9) << '\n'
    << "far_samples=" << r.far_samples << '\n'
    << "confirmed_alarms=" << r.confirmations.size() << '\n'
    << "raw_alarms=" << r.alarms.size() << '\n'
    << "threshold=" << csv::sig(r.threshold, 9) << '\n'
    << "alpha=" << csv::sig(r.alpha, 9) << '\n';
  return s.str();
}

}  // namespace moorfd::detect
