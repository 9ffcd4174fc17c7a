#include "moorfd/errors.hpp"
#include "moorfd/sysid.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>

namespace moorfd::sysid {

namespace {

struct Experiment {
  Eigen::MatrixXd u;  // m x N
  Eigen::MatrixXd y;  // p x N
};

std::vector<Experiment> experiments(
    const std::variant<ImpulseResponse, IoData>& data, int m_expected,
    int p_expected) {
  std::vector<Experiment> out;
  if (const auto* h = std::get_if<ImpulseResponse>(&data)) {
    h->validate();
    const auto g = h->causal_part();
    const int n_s = static_cast<int>(g.size());
    const int m = h->inputs(), p = h->outputs();
    if (m != m_expected || p != p_expected) {
      throw ValidationError("impulse response and model dimensions differ");
    }
    for (int j = 0; j < m; ++j) {
      Experiment e;
      e.u = Eigen::MatrixXd::Zero(m, n_s);
      e.u(j, 0) = 1.0;
      e.y.resize(p, n_s);
      for (int k = 0; k < n_s; ++k) e.y.col(k) = g[static_cast<std::size_t>(k)].col(j);
      out.push_back(std::move(e));
    }
  } else {
    const auto& io = std::get<IoData>(data);
    if (io.u.rows() != m_expected || io.y.rows() != p_expected ||
        io.u.cols() != io.y.cols() || io.u.cols() < 2) {
      throw ValidationError("input/output data and model dimensions differ");
    }
    out.push_back({io.u, io.y});
  }
  return out;
}

struct Residual {
  Eigen::VectorXd r;  // stacked model - data
  double ref_sq = 0.0;
};

Residual residual(const StateSpaceModel& m, const std::vector<Experiment>& ex) {
  Eigen::Index total = 0;
  for (const auto& e : ex) total += e.y.size();
  Residual res;
  res.r.resize(total);
  Eigen::Index off = 0;
  for (const auto& e : ex) {
    const Eigen::MatrixXd yhat =
        simulate_discrete(m, e.u, Eigen::VectorXd::Zero(m.order()));
    const Eigen::MatrixXd diff = yhat - e.y;
    res.r.segment(off, diff.size()) = Eigen::Map<const Eigen::VectorXd>(diff.data(), diff.size());
    off += diff.size();
    res.ref_sq += e.y.squaredNorm();
  }
  return res;
}

double relative(double err_sq, double ref_sq) {
  if (ref_sq == 0.0) return std::sqrt(err_sq);
  return std::sqrt(err_sq / ref_sq);
}

// Parameter vector layout: vec(A), vec(B), vec(C) (column-major).
Eigen::VectorXd pack(const StateSpaceModel& m) {
  const auto na = m.a.size(), nb = m.b.size(), nc = m.c.size();
  Eigen::VectorXd th(na + nb + nc);
  th.segment(0, na) = Eigen::Map<const Eigen::VectorXd>(m.a.data(), na);
  th.segment(na, nb) = Eigen::Map<const Eigen::VectorXd>(m.b.data(), nb);
  th.segment(na + nb, nc) = Eigen::Map<const Eigen::VectorXd>(m.c.data(), nc);
  return th;
}

StateSpaceModel unpack(const StateSpaceModel& like, const Eigen::VectorXd& th) {
  StateSpaceModel m = like;
  const auto na = m.a.size(), nb = m.b.size(), nc = m.c.size();
  Eigen::Map<Eigen::VectorXd>(m.a.data(), na) = th.segment(0, na);
  Eigen::Map<Eigen::VectorXd>(m.b.data(), nb) = th.segment(na, nb);
  Eigen::Map<Eigen::VectorXd>(m.c.data(), nc) = th.segment(na + nb, nc);
  return m;
}

// Output sensitivities by forward recursion of the state derivative.
Eigen::MatrixXd jacobian(const StateSpaceModel& m,
                         const std::vector<Experiment>& ex, Eigen::Index rows) {
  const int n = m.order(), mi = m.inputs(), p = m.outputs();
  const int n_par = n * n + n * mi + p * n;
  Eigen::MatrixXd jac(rows, n_par);
  Eigen::Index off = 0;
  for (const auto& e : ex) {
    const Eigen::Index n_s = e.u.cols();
    Eigen::MatrixXd x(n, n_s);
    x.col(0).setZero();
    for (Eigen::Index k = 0; k + 1 < n_s; ++k) {
      x.col(k + 1) = m.a * x.col(k) + m.b * e.u.col(k);
    }
    Eigen::MatrixXd dx(n, n_s);
    int col = 0;
    auto emit = [&](const Eigen::MatrixXd& dy) {
      jac.block(off, col, dy.size(), 1) =
          Eigen::Map<const Eigen::VectorXd>(dy.data(), dy.size());
      ++col;
    };
    // A(i, j), column-major order.
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        dx.col(0).setZero();
        for (Eigen::Index k = 0; k + 1 < n_s; ++k) {
          dx.col(k + 1) = m.a * dx.col(k);
          dx(i, k + 1) += x(j, k);
        }
        emit(m.c * dx);
      }
    }
    for (int j = 0; j < mi; ++j) {
      for (int i = 0; i < n; ++i) {
        dx.col(0).setZero();
        for (Eigen::Index k = 0; k + 1 < n_s; ++k) {
          dx.col(k + 1) = m.a * dx.col(k);
          dx(i, k + 1) += e.u(j, k);
        }
        emit(m.c * dx);
      }
    }
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < p; ++i) {
        Eigen::MatrixXd dy = Eigen::MatrixXd::Zero(p, n_s);
        dy.row(i) = x.row(j);
        emit(dy);
      }
    }
    off += static_cast<Eigen::Index>(p) * n_s;
  }
  return jac;
}

}  // namespace

double fitting_error(const StateSpaceModel& m,
                     const std::variant<ImpulseResponse, IoData>& data) {
  m.validate();
  const auto ex = experiments(data, m.inputs(), m.outputs());
  const Residual r = residual(m, ex);
  return relative(r.r.squaredNorm(), r.ref_sq);
}

FitResult pem_refine(const StateSpaceModel& init,
                     const std::variant<ImpulseResponse, IoData>& data,
                     const PemOptions& opts) {
  init.validate();
  if (!init.is_discrete()) throw ValidationError("PEM needs a discrete model");
  const auto ex = experiments(data, init.inputs(), init.outputs());
  const bool keep_stable = init.is_stable();

  StateSpaceModel best = init;
  Residual cur = residual(best, ex);
  double cost = cur.r.squaredNorm();

  FitResult res;
  res.report.requested_order = init.order();
  res.report.fit_error_initial = relative(cost, cur.ref_sq);
  res.report.converged = false;

  double lambda = 1e-3;
  int iter = 0;
  bool converged = cost == 0.0 || init.order() == 0;
  while (!converged && iter < opts.max_iter) {
    ++iter;
    const Eigen::MatrixXd jac = jacobian(best, ex, cur.r.size());
    const Eigen::VectorXd theta = pack(best);
    Eigen::VectorXd scale = jac.colwise().norm().transpose();
    const double smax = scale.maxCoeff();
    for (Eigen::Index i = 0; i < scale.size(); ++i) {
      scale(i) = std::max(scale(i), 1e-12 * std::max(smax, 1e-300));
    }
    bool accepted = false;
    for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
      const Eigen::Index rows = jac.rows(), cols = jac.cols();
      Eigen::MatrixXd aug(rows + cols, cols);
      aug.topRows(rows) = jac;
      aug.bottomRows(cols) = (std::sqrt(lambda) * scale).asDiagonal();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows + cols);
      rhs.head(rows) = -cur.r;
      const Eigen::VectorXd step = aug.colPivHouseholderQr().solve(rhs);
      const StateSpaceModel trial = unpack(best, theta + step);
      if (!trial.a.allFinite() || (keep_stable && !trial.is_stable())) {
        lambda *= 10.0;
        continue;
      }
      const Residual r_trial = residual(trial, ex);
      const double c_trial = r_trial.r.squaredNorm();
      if (std::isfinite(c_trial) && c_trial < cost) {
        const double rel_drop = (cost - c_trial) / cost;
        best = trial;
        cur = r_trial;
        cost = c_trial;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (rel_drop < opts.tol) converged = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted) converged = true;  // no descent direction left
  }

  res.model = best;
  res.report.order = best.order();
  res.report.iterations = iter;
  res.report.converged = converged;
  res.report.fit_error_final = relative(cost, cur.ref_sq);
  res.report.stable = best.is_stable();
  return res;
}

}  // namespace moorfd::sysid
