#pragma once

#include <Eigen/Core>

#include <vector>

#include "eatune/domain.hpp"

namespace eatune {

inline constexpr int kFeatureCount = kCounterCount + 2;
using FeatureVector = Eigen::Matrix<double, kFeatureCount, 1>;

/// The fixed (CF, UCF) at which counters and the reference energy are taken.
struct CalibrationPoint {
  Frequency core = Frequency::from_deci(20);
  Frequency uncore = Frequency::from_deci(15);
  double reference_energy = 0.0;  // joules, same node and benchmark
};

double normalize_energy(double energy, const CalibrationPoint& cal);

/// Raw counts -> counts per second of one phase iteration.
PmcVector normalize_counters(const PmcVector& raw, double phase_duration);

/// Model input: seven counter rates followed by core and uncore GHz.
FeatureVector make_features(const PmcVector& rates, Frequency core, Frequency uncore);

/// Zero-mean / unit-variance scaling fitted on training rows.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(Eigen::VectorXd means, Eigen::VectorXd scales);

  /// Rows are observations. Population standard deviation.
  static Standardizer fit(const Eigen::Ref<const Eigen::MatrixXd>& features);

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::MatrixXd apply_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows) const;

  const Eigen::VectorXd& means() const { return means_; }
  const Eigen::VectorXd& scales() const { return scales_; }

 private:
  Eigen::VectorXd means_;
  Eigen::VectorXd scales_;
};

/// Ordinary least squares with an intercept. Columns are centred and scaled
/// internally; the normal equations carry a 1e-12 ridge on the diagonal.
struct OlsFit {
  double r_squared = 0.0;
  double adjusted_r_squared = 0.0;
};

OlsFit fit_ols(const Eigen::Ref<const Eigen::MatrixXd>& predictors,
               const Eigen::Ref<const Eigen::VectorXd>& target);

/// 1 / (1 - R^2) of `column` regressed on the remaining columns.
double compute_vif(const Eigen::Ref<const Eigen::MatrixXd>& features, Eigen::Index column);

/// Mean VIF over all columns; 1 for a single column.
double mean_vif(const Eigen::Ref<const Eigen::MatrixXd>& features);

struct CounterSelectionOptions {
  double vif_limit = 10.0;
  double min_improvement = 1e-3;
};

/// Forward stepwise selection by adjusted R^2 with a mean-VIF admission guard.
/// Returns candidate column indices in the order they were added.
std::vector<Eigen::Index> select_counters(const Eigen::Ref<const Eigen::MatrixXd>& candidates,
                                          const Eigen::Ref<const Eigen::VectorXd>& target,
                                          const CounterSelectionOptions& options = {});

struct TrainingRow {
  FeatureVector features;  // unstandardized
  double target = 0.0;     // E_norm
};

/// One benchmark's sweep turned into model rows. The first sample at the
/// calibration frequencies supplies the reference energy and the counter rates;
/// samples at other thread counts are skipped.
struct BenchmarkRows {
  PmcVector calibration_rates;
  std::vector<TrainingRow> rows;
};

BenchmarkRows rows_from_sweep(const std::vector<PhaseSample>& sweep,
                              const CalibrationPoint& cal_frequencies = {});

}  // namespace eatune
