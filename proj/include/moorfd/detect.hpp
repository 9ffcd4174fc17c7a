#pragma once

#include "moorfd/linmodel.hpp"
#include "moorfd/plant.hpp"
#include "moorfd/state_space.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace moorfd::detect {

enum class DareMethod { Doubling, FixedPoint };

struct DareResult {
  Eigen::MatrixXd p;
  Eigen::MatrixXd l;  // predictor gain A P C^T (C P C^T + R)^-1
  int iterations = 0;
};

/// Steady-state Kalman predictor gain from the filtering Riccati equation
///   P = A P A^T - A P C^T (C P C^T + R)^-1 C P A^T + Q.
DareResult solve_dare_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                           DareMethod method = DareMethod::Doubling,
                           double tol = 1e-12, int max_iter = 100000);

struct BaselineStats {
  Eigen::VectorXd z_bar;
  Eigen::MatrixXd sigma;
  double mean_d = 0.0;
  double std_d = 0.0;
};

double mahalanobis_distance(const Eigen::VectorXd& z, const Eigen::VectorXd& z_bar,
                            const Eigen::LLT<Eigen::MatrixXd>& sigma_llt);

/// Sample statistics of residual columns [discard, end). Needs >= 1000
/// retained samples and a positive definite covariance.
BaselineStats baseline_statistics(const Eigen::MatrixXd& z, int discard,
                                  int min_samples = 1000);

struct Threshold {
  double value = 0.0;
  double far_bound = 0.0;  // 1 / alpha^2
};

Threshold chebyshev_threshold(double mean_d, double std_d, double alpha);

struct DetectorModel {
  sysid::StateSpaceModel sys;
  Eigen::MatrixXd l_gain;
  Eigen::MatrixXd q_cov;
  Eigen::MatrixXd r_cov;
  Eigen::Vector4d u_op = Eigen::Vector4d::Zero();
  Eigen::Vector3d y_op = Eigen::Vector3d::Zero();
  Eigen::VectorXd z_bar;
  Eigen::MatrixXd sigma;
  double mean_d = 0.0;
  double std_d = 0.0;
  double alpha = 6.0;
  double threshold = 0.0;

  /// Refreshes the cached Cholesky factor of sigma; throws when not PD.
  void prepare();
  [[nodiscard]] const Eigen::LLT<Eigen::MatrixXd>& sigma_llt() const { return llt_; }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

struct ObserverOutput {
  Eigen::VectorXd x_next;
  Eigen::VectorXd y_hat;
  Eigen::VectorXd z;
};

ObserverOutput observer_step(const DetectorModel& det, const Eigen::VectorXd& x_hat,
                             const Eigen::VectorXd& u, const Eigen::VectorXd& y);

/// Innovation sequence of the predictor over a run (inputs and outputs in
/// deviation form, columns per sample).
Eigen::MatrixXd residual_series(const DetectorModel& det, const Eigen::MatrixXd& u,
                                const Eigen::MatrixXd& y);

struct DetectionOptions {
  int hold = 3;
  /// Alarms and exceedance counting start after this time [s].
  double warmup = 200.0;
};

struct Alarm {
  double t = 0.0;
  double d = 0.0;
};

struct DetectionReport {
  std::vector<double> t;
  std::vector<double> d_series;
  std::vector<bool> raw;
  std::vector<Alarm> alarms;  // raw exceedances
  /// Times at which a run of `hold` consecutive exceedances completes.
  std::vector<double> confirmations;
  std::optional<double> first_confirmed_alarm;
  std::optional<double> fault_time;
  std::optional<double> detection_delay;
  double far = 0.0;
  int far_samples = 0;
  double threshold = 0.0;
  double alpha = 0.0;

  [[nodiscard]] bool detected() const { return detection_delay.has_value(); }
};

DetectionReport run_detection(const DetectorModel& det, const plant::RunRecord& run,
                              const DetectionOptions& opts = {});

struct TuningOptions {
  double window_start = 200.0;
  double window_end = 1400.0;
  int max_iter = 30;
  double tolerance = 0.2;  // relative innovation-variance mismatch
  /// Initial diagonal process noise for rotor speed, surge and pitch velocity.
  /// Deliberately small: the knobs only grow while the healthy innovations
  /// exceed their predicted variance, so the observer trusts the model as far
  /// as the data allow and does not absorb slow fault drifts.
  Eigen::Vector3d q_initial{1e-12, 1e-10, 1e-12};
  /// Value of the remaining diagonal entries.
  double q_floor = 1e-14;
};

struct TuningResult {
  Eigen::Vector3d q_knobs;
  Eigen::Vector3d innovation_ratio;  // empirical / theoretical variance
  int iterations = 0;
  bool converged = false;
};

/// Process-noise covariance for the assembled state layout.
Eigen::MatrixXd process_noise(const linmodel::AssembledModel& m, const Eigen::Vector3d& knobs,
                              double floor);
Eigen::MatrixXd measurement_noise(const plant::NoiseSpec& noise);

/// Multiplicative adjustment of the three process-noise knobs until the
/// empirical innovation variance over the window matches C P C^T + R.
TuningResult tune_process_noise(const linmodel::AssembledModel& m, const Eigen::MatrixXd& r_cov,
                                const plant::RunRecord& healthy, const TuningOptions& opts = {});

struct CalibrationOptions {
  TuningOptions tuning;
  double alpha = 6.0;
};

struct Calibration {
  DetectorModel det;
  TuningResult tuning;
};

/// Gain design, baseline statistics over the tuning window and threshold.
Calibration calibrate_detector(const linmodel::AssembledModel& m, const plant::NoiseSpec& noise,
                               const plant::RunRecord& healthy,
                               const CalibrationOptions& opts = {});

void write_calibration(const DetectorModel& det, const std::filesystem::path& path);
DetectorModel read_calibration(const std::filesystem::path& path);

void write_detection_csv(const DetectionReport& r, const std::filesystem::path& path);
std::string detection_summary(const DetectionReport& r);

}  // namespace moorfd::detect
