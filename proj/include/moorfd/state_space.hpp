#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace moorfd::sysid {

/// Complex frequency response samples, one p x m matrix per frequency.
using Frf = std::vector<Eigen::MatrixXcd>;

/// Linear time-invariant model x' = A x + B u, y = C x + D u.
///
/// `dt == 0` marks a continuous-time model; otherwise the model is discrete
/// with sample step `dt` seconds. A model of order zero is a static gain D.
struct StateSpaceModel {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd c;
  Eigen::MatrixXd d;
  double dt = 0.0;
  std::vector<std::string> input_labels;
  std::vector<std::string> output_labels;

  StateSpaceModel() = default;
  StateSpaceModel(Eigen::MatrixXd a_, Eigen::MatrixXd b_, Eigen::MatrixXd c_,
                  Eigen::MatrixXd d_, double dt_ = 0.0);

  /// Zero model with the given dimensions (all matrices zero).
  static StateSpaceModel zeros(int order, int inputs, int outputs, double dt);

  [[nodiscard]] int order() const { return static_cast<int>(a.rows()); }
  [[nodiscard]] int inputs() const { return static_cast<int>(d.cols()); }
  [[nodiscard]] int outputs() const { return static_cast<int>(d.rows()); }
  [[nodiscard]] bool is_discrete() const { return dt > 0.0; }

  /// Throws ValidationError on inconsistent dimensions or non-finite entries.
  void validate() const;

  /// Spectral radius of A (0 for a static model).
  [[nodiscard]] double spectral_radius() const;
  /// Largest real part among eigenvalues of A (-inf for a static model).
  [[nodiscard]] double max_real_eigenvalue() const;
  /// Discrete: spectral radius < 1. Continuous: max Re(eig) < 0.
  [[nodiscard]] bool is_stable() const;
};

/// Evaluates C (sI - A)^-1 B + D at s = j w (continuous) or z = e^{j w dt}.
/// Throws std::domain_error for a discrete model when w * dt >= pi.
Frf model_frf(const StateSpaceModel& m, std::span<const double> omega);

/// Markov parameters D, CB, CAB, ... (count entries) of a discrete model.
std::vector<Eigen::MatrixXd> markov_parameters(const StateSpaceModel& m,
                                               int count);

/// Simulates a discrete model from state x0. `u` holds one input column per
/// sample; the result holds one output column per sample.
Eigen::MatrixXd simulate_discrete(const StateSpaceModel& m,
                                  const Eigen::MatrixXd& u,
                                  const Eigen::VectorXd& x0);

/// Block-diagonal composition (inputs and outputs stacked in order).
StateSpaceModel block_diagonal(const StateSpaceModel& first,
                               const StateSpaceModel& second);

/// Relative band error per output channel:
///   max_w |G_fit,i(w) - G_ref,i(w)| / max_w |G_ref,i(w)|
/// using the row 2-norm for multi-input channels.
Eigen::VectorXd relative_band_error(const Frf& fit, const Frf& reference);

}  // namespace moorfd::sysid
