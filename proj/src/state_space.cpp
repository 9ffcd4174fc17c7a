#include "moorfd/state_space.hpp"

#include "moorfd/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace moorfd::sysid {

StateSpaceModel::StateSpaceModel(Eigen::MatrixXd a_, Eigen::MatrixXd b_,
                                 Eigen::MatrixXd c_, Eigen::MatrixXd d_,
                                 double dt_)
    : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)),
      dt(dt_) {
  validate();
}

StateSpaceModel StateSpaceModel::zeros(int order, int inputs, int outputs,
                                       double dt) {
  return {Eigen::MatrixXd::Zero(order, order),
          Eigen::MatrixXd::Zero(order, inputs),
          Eigen::MatrixXd::Zero(outputs, order),
          Eigen::MatrixXd::Zero(outputs, inputs), dt};
}

void StateSpaceModel::validate() const {
  const auto n = a.rows();
  if (a.cols() != n || b.rows() != n || c.cols() != n ||
      c.rows() != d.rows() || b.cols() != d.cols()) {
    throw ValidationError("state-space model has inconsistent dimensions");
  }
  if (dt < 0.0 || !std::isfinite(dt)) {
    throw ValidationError("state-space model has invalid sample step");
  }
  if (!a.allFinite() || !b.allFinite() || !c.allFinite() || !d.allFinite()) {
    throw ValidationError("state-space model has non-finite entries");
  }
  if (!input_labels.empty() &&
      static_cast<Eigen::Index>(input_labels.size()) != b.cols()) {
    throw ValidationError("input label count does not match B");
  }
  if (!output_labels.empty() &&
      static_cast<Eigen::Index>(output_labels.size()) != c.rows()) {
    throw ValidationError("output label count does not match C");
  }
}

double StateSpaceModel::spectral_radius() const {
  if (order() == 0) return 0.0;
  return a.eigenvalues().cwiseAbs().maxCoeff();
}

double StateSpaceModel::max_real_eigenvalue() const {
  if (order() == 0) return -std::numeric_limits<double>::infinity();
  return a.eigenvalues().real().maxCoeff();
}

bool StateSpaceModel::is_stable() const {
  return is_discrete() ? spectral_radius() < 1.0 : max_real_eigenvalue() < 0.0;
}

Frf model_frf(const StateSpaceModel& m, std::span<const double> omega) {
  using cd = std::complex<double>;
  const int n = m.order();
  Frf out;
  out.reserve(omega.size());
  const Eigen::MatrixXcd ac = m.a.cast<cd>();
  const Eigen::MatrixXcd bc = m.b.cast<cd>();
  const Eigen::MatrixXcd cc = m.c.cast<cd>();
  for (double w : omega) {
    cd s;
    if (m.is_discrete()) {
      if (std::abs(w) * m.dt >= std::numbers::pi) {
        throw std::domain_error("model_frf: frequency at or above Nyquist");
      }
      s = std::exp(cd(0.0, w * m.dt));
    } else {
      s = cd(0.0, w);
    }
    Eigen::MatrixXcd g = m.d.cast<cd>();
    if (n > 0) {
      Eigen::MatrixXcd si = s * Eigen::MatrixXcd::Identity(n, n) - ac;
      g += cc * si.partialPivLu().solve(bc);
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<Eigen::MatrixXd> markov_parameters(const StateSpaceModel& m,
                                               int count) {
  std::vector<Eigen::MatrixXd> h;
  if (count <= 0) return h;
  h.reserve(count);
  h.push_back(m.d);
  Eigen::MatrixXd x = m.b;
  for (int k = 1; k < count; ++k) {
    h.push_back(m.c * x);
    x = m.a * x;
  }
  return h;
}

Eigen::MatrixXd simulate_discrete(const StateSpaceModel& m,
                                  const Eigen::MatrixXd& u,
                                  const Eigen::VectorXd& x0) {
  if (u.rows() != m.inputs()) {
    throw ValidationError("simulate_discrete: input dimension mismatch");
  }
  Eigen::MatrixXd y(m.outputs(), u.cols());
  Eigen::VectorXd x = x0.size() == 0 ? Eigen::VectorXd::Zero(m.order()) : x0;
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    y.col(k) = m.c * x + m.d * u.col(k);
    x = m.a * x + m.b * u.col(k);
  }
  return y;
}

StateSpaceModel block_diagonal(const StateSpaceModel& first,
                               const StateSpaceModel& second) {
  if (first.dt != second.dt) {
    throw ValidationError("block_diagonal: sample steps differ");
  }
  const int n1 = first.order(), n2 = second.order();
  const int m1 = first.inputs(), m2 = second.inputs();
  const int p1 = first.outputs(), p2 = second.outputs();
  StateSpaceModel out = StateSpaceModel::zeros(n1 + n2, m1 + m2, p1 + p2,
                                               first.dt);
  out.a.topLeftCorner(n1, n1) = first.a;
  out.a.bottomRightCorner(n2, n2) = second.a;
  out.b.topLeftCorner(n1, m1) = first.b;
  out.b.bottomRightCorner(n2, m2) = second.b;
  out.c.topLeftCorner(p1, n1) = first.c;
  out.c.bottomRightCorner(p2, n2) = second.c;
  out.d.topLeftCorner(p1, m1) = first.d;
  out.d.bottomRightCorner(p2, m2) = second.d;
  if (!first.input_labels.empty() && !second.input_labels.empty()) {
    out.input_labels = first.input_labels;
    out.input_labels.insert(out.input_labels.end(),
                            second.input_labels.begin(),
                            second.input_labels.end());
  }
  if (!first.output_labels.empty() && !second.output_labels.empty()) {
    out.output_labels = first.output_labels;
    out.output_labels.insert(out.output_labels.end(),
                             second.output_labels.begin(),
                             second.output_labels.end());
  }
  return out;
}

Eigen::VectorXd relative_band_error(const Frf& fit, const Frf& reference) {
  if (fit.size() != reference.size() || fit.empty()) {
    throw ValidationError("relative_band_error: sample count mismatch");
  }
  const auto p = reference.front().rows();
  Eigen::VectorXd err_peak = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd ref_peak = Eigen::VectorXd::Zero(p);
  for (std::size_t k = 0; k < fit.size(); ++k) {
    for (Eigen::Index i = 0; i < p; ++i) {
      err_peak(i) = std::max(err_peak(i),
                             (fit[k].row(i) - reference[k].row(i)).norm());
      ref_peak(i) = std::max(ref_peak(i), reference[k].row(i).norm());
    }
  }
  Eigen::VectorXd rel(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (ref_peak(i) > 0.0) {
      rel(i) = err_peak(i) / ref_peak(i);
    } else {
      rel(i) = err_peak(i) > 0.0 ? std::numeric_limits<double>::infinity()
                                 : 0.0;
    }
  }
  return rel;
}

}  // namespace moorfd::sysid
