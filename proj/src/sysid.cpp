#include "moorfd/sysid.hpp"

#include "moorfd/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace moorfd::sysid {

namespace {

constexpr const char* kDofNames[6] = {"surge", "sway", "heave",
                                      "roll",  "pitch", "yaw"};

std::vector<double> trapezoid_weights(std::span<const double> omega) {
  const auto n = omega.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double half = 0.5 * (omega[i + 1] - omega[i]);
    w[i] += half;
    w[i + 1] += half;
  }
  return w;
}

bool uniform(std::span<const double> omega) {
  if (omega.size() < 2) return false;
  const double step =
      (omega.back() - omega.front()) / static_cast<double>(omega.size() - 1);
  for (std::size_t i = 1; i < omega.size(); ++i) {
    if (std::abs(omega[i] - omega[i - 1] - step) > 1e-9 * std::abs(step)) {
      return false;
    }
  }
  return step > 0.0;
}

int grid_steps(double t, double dt, const char* what) {
  const double r = t / dt;
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-9 * std::max(1.0, std::abs(r))) {
    throw ConfigError(std::string(what) + " must be a multiple of dt");
  }
  return static_cast<int>(k);
}

Frf select_band(const Frf& g, std::span<const double> omega, double lo,
                double hi, std::vector<double>& band) {
  Frf out;
  band.clear();
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (omega[i] >= lo - 1e-12 && omega[i] <= hi + 1e-12) {
      out.push_back(g[i]);
      band.push_back(omega[i]);
    }
  }
  return out;
}

double h2_relative(const Frf& fit, const Frf& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < fit.size(); ++k) {
    num += (fit[k] - ref[k]).squaredNorm();
    den += ref[k].squaredNorm();
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::sqrt(num);
  return std::sqrt(num / den);
}

void fill_band_errors(FitReport& report, const StateSpaceModel& model,
                      const Frf& reference, std::span<const double> omega,
                      double lo, double hi) {
  std::vector<double> band;
  const Frf ref = select_band(reference, omega, lo, hi, band);
  if (band.empty()) {
    throw ConfigError("identification band contains no grid frequencies");
  }
  const Frf fit = model_frf(model, band);
  report.hinf_rel = relative_band_error(fit, ref);
  report.h2_rel = h2_relative(fit, ref);
}

// Reflects eigenvalues outside the unit circle to 1/conj(lambda) and clamps
// the radius; returns the number of modified modes.
int reflect_unstable(Eigen::MatrixXd& a, double radius_clamp) {
  if (a.rows() == 0) return 0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXcd lambda = es.eigenvalues();
  int changed = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double r = std::abs(lambda(i));
    if (r >= 1.0) {
      std::complex<double> l = lambda(i) / (r * r);
      if (std::abs(l) > radius_clamp) l *= radius_clamp / std::abs(l);
      lambda(i) = l;
      ++changed;
    }
  }
  if (changed == 0) return 0;
  const Eigen::MatrixXcd v = es.eigenvectors();
  const Eigen::MatrixXcd rebuilt =
      v * lambda.asDiagonal() * v.partialPivLu().inverse();
  a = rebuilt.real();
  return changed;
}

}  // namespace

Eigen::MatrixXd ImpulseResponse::at_index(int k) const {
  const int i = k - first_index;
  if (i < 0 || i >= static_cast<int>(h.size())) {
    return Eigen::MatrixXd::Zero(outputs(), inputs());
  }
  return h[static_cast<std::size_t>(i)];
}

std::vector<Eigen::MatrixXd> ImpulseResponse::causal_part() const {
  std::vector<Eigen::MatrixXd> out;
  const int last = first_index + static_cast<int>(h.size()) - 1;
  for (int k = 0; k <= last; ++k) out.push_back(at_index(k));
  return out;
}

void ImpulseResponse::validate() const {
  if (h.size() < 2) throw ValidationError("impulse response needs >= 2 samples");
  if (!(dt > 0.0)) throw ValidationError("impulse response needs dt > 0");
  for (const auto& s : h) {
    if (s.rows() != h[0].rows() || s.cols() != h[0].cols() || !s.allFinite()) {
      throw ValidationError("impulse response samples inconsistent or non-finite");
    }
  }
}

double FitReport::hinf_max() const {
  return hinf_rel.size() ? hinf_rel.maxCoeff() : 0.0;
}

std::string FitReport::to_text() const {
  std::ostringstream os;
  os.precision(9);
  os << "requested_order=" << requested_order << '\n'
     << "order=" << order << '\n';
  for (Eigen::Index i = 0; i < hinf_rel.size(); ++i) {
    os << "hinf_rel_" << i << '=' << hinf_rel(i) << '\n';
  }
  os << "hinf_rel_max=" << hinf_max() << '\n'
     << "h2_rel=" << h2_rel << '\n'
     << "stable=" << (stable ? 1 : 0) << '\n'
     << "rank_reduced=" << (rank_reduced ? 1 : 0) << '\n'
     << "reflected_modes=" << reflected_modes << '\n'
     << "converged=" << (converged ? 1 : 0) << '\n'
     << "iterations=" << iterations << '\n'
     << "fit_error_initial=" << fit_error_initial << '\n'
     << "fit_error_final=" << fit_error_final << '\n'
     << "noncausal_ratio=" << noncausal_ratio << '\n'
     << "t_shift=" << t_shift << '\n';
  return os.str();
}

std::vector<int> dof_indices(const DofMask& mask) {
  std::vector<int> idx;
  for (int i = 0; i < 6; ++i) {
    if (mask[i]) idx.push_back(i);
  }
  return idx;
}

Frf ogilvie_frf(const hydro::HydroFrd& frd) {
  frd.validate();
  Frf k;
  k.reserve(frd.size());
  for (std::size_t i = 0; i < frd.size(); ++i) {
    Eigen::MatrixXcd g(6, 6);
    g.real() = frd.b_omega[i];
    g.imag() = frd.omega[i] * (frd.a_omega[i] - frd.a_inf);
    k.push_back(std::move(g));
  }
  return k;
}

ImpulseResponse impulse_response_from_frd(const Frf& frf,
                                          std::span<const double> omega,
                                          double dt, double duration,
                                          KernelKind kind) {
  if (frf.size() != omega.size() || frf.empty()) {
    throw ValidationError("FRF and frequency grid sizes differ");
  }
  if (!uniform(omega)) throw ConfigError("frequency grid must be uniform");
  if (!(dt > 0.0) || std::numbers::pi / dt < omega.back()) {
    throw ConfigError("sample step violates Nyquist for the frequency grid");
  }
  if (!(duration > 0.0)) throw ConfigError("kernel duration must be positive");
  const auto wq = trapezoid_weights(omega);
  const int n_pos = static_cast<int>(std::floor(duration / dt + 1e-9));
  const int first = kind == KernelKind::Radiation ? 0 : -n_pos;
  const auto rows = frf.front().rows(), cols = frf.front().cols();

  ImpulseResponse out;
  out.dt = dt;
  out.first_index = first;
  out.h.reserve(static_cast<std::size_t>(n_pos - first + 1));
  for (int k = first; k <= n_pos; ++k) {
    const double t = dt * k;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(rows, cols);
    for (std::size_t i = 0; i < omega.size(); ++i) {
      if (kind == KernelKind::Radiation) {
        s += (wq[i] * std::cos(omega[i] * t)) * frf[i].real();
      } else {
        const std::complex<double> e(std::cos(omega[i] * t),
                                     std::sin(omega[i] * t));
        s += wq[i] * (frf[i] * e).real();
      }
    }
    const double scale =
        kind == KernelKind::Radiation ? 2.0 / std::numbers::pi : 1.0 / std::numbers::pi;
    out.h.push_back(dt * scale * s);
  }
  return out;
}

ImpulseResponse shift_impulse_response(const ImpulseResponse& h, double t_d) {
  ImpulseResponse out = h;
  out.first_index += grid_steps(t_d, h.dt, "shift t_d");
  out.t_shift += t_d;
  return out;
}

ImpulseResponse causalize(const ImpulseResponse& h, double t_d) {
  if (t_d < 0.0) throw ConfigError("causalize: t_d must be non-negative");
  return shift_impulse_response(h, t_d);
}

double noncausal_ratio(const ImpulseResponse& h) {
  double peak = 0.0, pre = 0.0;
  for (std::size_t i = 0; i < h.h.size(); ++i) {
    const double v = h.h[i].norm();
    peak = std::max(peak, v);
    if (h.first_index + static_cast<int>(i) < 0) pre = std::max(pre, v);
  }
  return peak > 0.0 ? pre / peak : 0.0;
}

std::vector<ShiftScanEntry> scan_causal_shift(const ImpulseResponse& h,
                                              std::span<const double> t_d) {
  std::vector<ShiftScanEntry> out;
  for (double t : t_d) out.push_back({t, noncausal_ratio(causalize(h, t))});
  return out;
}

FitResult fit_state_space_era(const ImpulseResponse& h, int order,
                              const EraOptions& opts) {
  h.validate();
  if (order < 1) throw ConfigError("ERA order must be >= 1");
  const auto g = h.causal_part();
  const int n_samples = static_cast<int>(g.size());
  const int p = h.outputs(), m = h.inputs();
  int rows = opts.block_rows, cols = opts.block_cols;
  if (rows <= 0 || cols <= 0) {
    const int half = (n_samples - 1) / 2;
    rows = rows > 0 ? rows : std::min(half, 200);
    cols = cols > 0 ? cols : std::min(half, 200);
  }
  if (rows < 2 * order || cols < 1 || rows + cols > n_samples - 1) {
    throw ConfigError("not enough samples for a Hankel matrix with " +
                      std::to_string(2 * order) + " block rows");
  }

  Eigen::MatrixXd h0(p * rows, m * cols), h1(p * rows, m * cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      h0.block(i * p, j * m, p, m) = g[static_cast<std::size_t>(i + j + 1)];
      h1.block(i * p, j * m, p, m) = g[static_cast<std::size_t>(i + j + 2)];
    }
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(h0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  int rank = 0;
  if (sv.size() > 0 && sv(0) > 0.0) {
    while (rank < sv.size() && sv(rank) > opts.rank_tol * sv(0)) ++rank;
  }
  const int n = std::min(order, rank);

  FitResult res;
  res.report.requested_order = order;
  res.report.rank_reduced = n < order;
  res.report.t_shift = h.t_shift;
  if (n == 0) {
    res.model = StateSpaceModel::zeros(0, m, p, h.dt);
    res.model.d = g[0];
  } else {
    const Eigen::VectorXd s_half = sv.head(n).cwiseSqrt();
    const Eigen::VectorXd s_ihalf = s_half.cwiseInverse();
    const Eigen::MatrixXd un = svd.matrixU().leftCols(n);
    const Eigen::MatrixXd vn = svd.matrixV().leftCols(n);
    Eigen::MatrixXd a = s_ihalf.asDiagonal() * (un.transpose() * h1 * vn) *
                        s_ihalf.asDiagonal();
    const Eigen::MatrixXd obs = un * s_half.asDiagonal();
    const Eigen::MatrixXd ctrl = s_half.asDiagonal() * vn.transpose();
    res.report.reflected_modes = reflect_unstable(a, opts.radius_clamp);
    res.model = StateSpaceModel(a, ctrl.leftCols(m), obs.topRows(p), g[0], h.dt);
  }
  res.report.order = res.model.order();
  res.report.stable = res.model.is_stable();
  res.report.fit_error_initial = fitting_error(res.model, h);
  res.report.fit_error_final = res.report.fit_error_initial;
  return res;
}

FitResult fit_radiation_model(const hydro::HydroFrd& frd, int order,
                              const DofMask& dofs, const IdentOptions& opts) {
  const auto idx = dof_indices(dofs);
  if (idx.empty()) throw ConfigError("radiation fit needs at least one DOF");
  const Frf k_full = ogilvie_frf(frd);
  const int q = static_cast<int>(idx.size());
  Frf k(k_full.size());
  for (std::size_t w = 0; w < k_full.size(); ++w) {
    k[w].resize(q, q);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) k[w](i, j) = k_full[w](idx[i], idx[j]);
  }
  // Symmetric channel scaling so that each DOF carries comparable weight in
  // the Hankel factorization and the PEM cost.
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(q);
  for (int i = 0; i < q; ++i) {
    double peak = 0.0;
    for (const auto& kw : k) peak = std::max(peak, std::abs(kw(i, i)));
    if (peak > 0.0) scale(i) = std::sqrt(peak);
  }
  Frf k_scaled = k;
  for (auto& kw : k_scaled) {
    kw = scale.cwiseInverse().asDiagonal() * kw * scale.cwiseInverse().asDiagonal();
  }
  ImpulseResponse h = impulse_response_from_frd(k_scaled, frd.omega, opts.dt,
                                                opts.kernel_duration,
                                                KernelKind::Radiation);
  // Trapezoidal end correction: the causal kernel starts at t = 0.
  h.h[0] *= 0.5;

  FitResult era = fit_state_space_era(h, order, opts.era);
  FitResult res = era;
  if (era.model.order() > 0) {
    res = pem_refine(era.model, h, opts.pem);
    res.report.requested_order = order;
    res.report.rank_reduced = era.report.rank_reduced;
    res.report.reflected_modes = era.report.reflected_modes;
  }
  res.model.b = res.model.b * scale.asDiagonal();
  res.model.c = scale.asDiagonal() * res.model.c;
  res.model.d = scale.asDiagonal() * res.model.d * scale.asDiagonal();
  for (int i = 0; i < q; ++i) {
    res.model.input_labels.push_back(std::string("xi_dot_") + kDofNames[idx[i]]);
    res.model.output_labels.push_back(std::string("mu_") + kDofNames[idx[i]]);
  }
  fill_band_errors(res.report, res.model, k, frd.omega, opts.band_min,
                   opts.band_max);
  res.report.stable = res.model.is_stable();
  return res;
}

FitResult fit_wave_force_model(const hydro::HydroFrd& frd, int order,
                               double t_d, const DofMask& dofs,
                               const IdentOptions& opts) {
  frd.validate();
  const auto idx = dof_indices(dofs);
  if (idx.empty()) throw ConfigError("wave-force fit needs at least one DOF");
  const int q = static_cast<int>(idx.size());
  Frf x(frd.size());
  for (std::size_t w = 0; w < frd.size(); ++w) {
    x[w].resize(q, 1);
    for (int i = 0; i < q; ++i) x[w](i, 0) = frd.x_omega[w](idx[i]);
  }
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(q);
  for (int i = 0; i < q; ++i) {
    double peak = 0.0;
    for (const auto& xw : x) peak = std::max(peak, std::abs(xw(i, 0)));
    if (peak > 0.0) scale(i) = peak;
  }
  Frf x_scaled = x;
  for (auto& xw : x_scaled) xw = scale.cwiseInverse().asDiagonal() * xw;
  const ImpulseResponse raw = impulse_response_from_frd(
      x_scaled, frd.omega, opts.dt, opts.kernel_duration, KernelKind::WaveForce);
  const ImpulseResponse shifted = causalize(raw, t_d);
  const double ratio = noncausal_ratio(shifted);
  if (ratio >= 0.05) {
    std::ostringstream os;
    os << "wave-force kernel still has " << ratio * 100.0
       << "% of its peak at t < 0 after shifting by " << t_d
       << " s; increase t_d";
    throw ConfigError(os.str());
  }

  // Running integral of the shifted kernel; its pulse response is dt * W.
  ImpulseResponse integrated = shifted;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(q, 1);
  for (auto& s : integrated.h) {
    acc += s;
    s = opts.dt * acc;
  }

  const double dt = opts.dt;
  StateSpaceModel v_model;
  FitReport report;
  FitResult era = fit_state_space_era(integrated, order, opts.era);
  // The shifted kernel is (nearly) causal, so the integrated response has no
  // feedthrough; holding D at zero keeps the differentiated model strictly
  // proper.
  era.model.d.setZero();
  if (era.model.order() > 0) {
    FitResult ref = pem_refine(era.model, integrated, opts.pem);
    v_model = ref.model;
    report = ref.report;
    report.rank_reduced = era.report.rank_reduced;
    report.reflected_modes = era.report.reflected_modes;
  } else {
    v_model = era.model;
    report = era.report;
  }
  report.requested_order = order;
  report.noncausal_ratio = ratio;
  report.t_shift = t_d;

  // Differentiator stage: F_k = (V_k - V_{k-1}) / dt with V = C x, realized
  // with extra states q_k = V_k - V_{k-1}.
  const int n = v_model.order();
  StateSpaceModel f = StateSpaceModel::zeros(n + q, 1, q, dt);
  if (n > 0) {
    f.a.topLeftCorner(n, n) = v_model.a;
    f.a.bottomLeftCorner(q, n) =
        v_model.c * (v_model.a - Eigen::MatrixXd::Identity(n, n));
    f.b.topRows(n) = v_model.b;
    f.b.bottomRows(q) = v_model.c * v_model.b;
    f.c.rightCols(q) = scale.asDiagonal() * Eigen::MatrixXd::Identity(q, q) / dt;
  }
  f.input_labels = {"eta"};
  for (int i = 0; i < q; ++i) {
    f.output_labels.push_back(std::string("f_wave_") + kDofNames[idx[i]]);
  }
  f.validate();

  Frf target(frd.size());
  for (std::size_t w = 0; w < frd.size(); ++w) {
    target[w] = x[w] * std::exp(std::complex<double>(0.0, -frd.omega[w] * t_d));
  }
  fill_band_errors(report, f, target, frd.omega, opts.band_min, opts.band_max);
  report.order = f.order();
  report.stable = f.is_stable();
  return {f, report};
}

}  // namespace moorfd::sysid
