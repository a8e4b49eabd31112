#include "eatune/features.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eatune {

double normalize_energy(double energy, const CalibrationPoint& cal) {
  if (!(cal.reference_energy > 0.0) || !std::isfinite(cal.reference_energy)) {
    throw Error(ErrorKind::InvalidCalibration, "reference energy must be positive");
  }
  return energy / cal.reference_energy;
}

PmcVector normalize_counters(const PmcVector& raw, double phase_duration) {
  if (raw.normalized) {
    throw Error(ErrorKind::InvalidSample, "counters are already normalized");
  }
  if (!(phase_duration > 0.0)) {
    throw Error(ErrorKind::InvalidSample, "phase duration must be positive");
  }
  return PmcVector(raw.values / phase_duration, true);
}

FeatureVector make_features(const PmcVector& rates, Frequency core, Frequency uncore) {
  if (!rates.normalized) {
    throw Error(ErrorKind::InvalidInput, "model features require normalized counter rates");
  }
  FeatureVector x;
  x.head<kCounterCount>() = rates.values;
  x(kCounterCount) = core.ghz();
  x(kCounterCount + 1) = uncore.ghz();
  return x;
}

Standardizer::Standardizer(Eigen::VectorXd means, Eigen::VectorXd scales)
    : means_(std::move(means)), scales_(std::move(scales)) {
  if (means_.size() != scales_.size()) {
    throw Error(ErrorKind::InvalidInput, "standardizer means and scales differ in length");
  }
  if (!(scales_.array() > 0.0).all() || !scales_.allFinite() || !means_.allFinite()) {
    throw Error(ErrorKind::DegenerateFeature, "standardizer scales must be finite and positive");
  }
}

Standardizer Standardizer::fit(const Eigen::Ref<const Eigen::MatrixXd>& features) {
  if (features.rows() < 2) {
    throw Error(ErrorKind::InvalidInput, "standardizer needs at least two rows");
  }
  const Eigen::VectorXd means = features.colwise().mean().transpose();
  const Eigen::MatrixXd centred = features.rowwise() - means.transpose();
  Eigen::VectorXd scales =
      (centred.array().square().colwise().sum() / static_cast<double>(features.rows()))
          .sqrt()
          .transpose();
  for (Eigen::Index j = 0; j < scales.size(); ++j) {
    // constant up to rounding, relative to the column magnitude
    const double magnitude = std::max(1.0, std::abs(means(j)));
    if (!(scales(j) > 1e-12 * magnitude)) {
      throw Error(ErrorKind::DegenerateFeature,
                  "feature column " + std::to_string(j) + " is constant");
    }
  }
  return Standardizer(means, scales);
}

Eigen::VectorXd Standardizer::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != means_.size()) {
    throw Error(ErrorKind::InvalidInput, "feature vector length does not match standardizer");
  }
  return (x - means_).cwiseQuotient(scales_);
}

Eigen::MatrixXd Standardizer::apply_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows) const {
  if (rows.cols() != means_.size()) {
    throw Error(ErrorKind::InvalidInput, "feature matrix width does not match standardizer");
  }
  return (rows.rowwise() - means_.transpose()).array().rowwise() /
         scales_.transpose().array();
}

OlsFit fit_ols(const Eigen::Ref<const Eigen::MatrixXd>& predictors,
               const Eigen::Ref<const Eigen::VectorXd>& target) {
  const Eigen::Index n = predictors.rows();
  const Eigen::Index p = predictors.cols();
  if (target.size() != n) {
    throw Error(ErrorKind::InvalidInput, "predictor rows and target length differ");
  }
  if (n < p + 2) {
    throw Error(ErrorKind::InvalidInput, "too few rows for least squares with intercept");
  }

  const Eigen::VectorXd yc = target.array() - target.mean();
  const double ss_total = yc.squaredNorm();
  if (!(ss_total > 0.0)) {
    throw Error(ErrorKind::DegenerateFeature, "regression target is constant");
  }

  Eigen::MatrixXd xs = predictors.rowwise() - predictors.colwise().mean();
  for (Eigen::Index j = 0; j < p; ++j) {
    const double norm = xs.col(j).norm();
    if (!(norm > 0.0)) {
      throw Error(ErrorKind::DegenerateFeature,
                  "predictor column " + std::to_string(j) + " is constant");
    }
    xs.col(j) /= norm;
  }

  Eigen::MatrixXd gram = xs.transpose() * xs;
  gram.diagonal().array() += 1e-12;
  const Eigen::VectorXd beta = gram.ldlt().solve(xs.transpose() * yc);
  const double ss_residual = (yc - xs * beta).squaredNorm();
  if (!std::isfinite(ss_residual)) {
    throw Error(ErrorKind::Numerical, "least-squares solve produced non-finite residuals");
  }

  OlsFit fit;
  fit.r_squared = std::clamp(1.0 - ss_residual / ss_total, 0.0, 1.0);
  fit.adjusted_r_squared = 1.0 - (1.0 - fit.r_squared) * static_cast<double>(n - 1) /
                                     static_cast<double>(n - p - 1);
  return fit;
}

double compute_vif(const Eigen::Ref<const Eigen::MatrixXd>& features, Eigen::Index column) {
  const Eigen::Index p = features.cols();
  if (column < 0 || column >= p) {
    throw Error(ErrorKind::InvalidInput, "VIF column out of range");
  }
  if (p < 2) {
    throw Error(ErrorKind::InvalidInput, "VIF needs at least two columns");
  }
  if (features.rows() < p + 1) {
    throw Error(ErrorKind::InvalidInput, "VIF needs more rows than columns");
  }

  Eigen::MatrixXd others(features.rows(), p - 1);
  for (Eigen::Index j = 0, k = 0; j < p; ++j) {
    if (j != column) others.col(k++) = features.col(j);
  }
  const double r2 = fit_ols(others, features.col(column)).r_squared;
  if (r2 >= 1.0 - 1e-12) {
    throw Error(ErrorKind::CollinearFeature,
                "column " + std::to_string(column) + " is a linear combination of the others");
  }
  return 1.0 / (1.0 - r2);
}

double mean_vif(const Eigen::Ref<const Eigen::MatrixXd>& features) {
  if (features.cols() < 2) return 1.0;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < features.cols(); ++j) sum += compute_vif(features, j);
  return sum / static_cast<double>(features.cols());
}

namespace {
Eigen::MatrixXd gather(const Eigen::Ref<const Eigen::MatrixXd>& m,
                       const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = m.col(cols[k]);
  }
  return out;
}
}  // namespace

std::vector<Eigen::Index> select_counters(const Eigen::Ref<const Eigen::MatrixXd>& candidates,
                                          const Eigen::Ref<const Eigen::VectorXd>& target,
                                          const CounterSelectionOptions& options) {
  if (candidates.cols() == 0) {
    throw Error(ErrorKind::InvalidInput, "no candidate counters");
  }
  if (candidates.rows() != target.size()) {
    throw Error(ErrorKind::InvalidInput, "candidate rows and target length differ");
  }

  std::vector<Eigen::Index> selected;
  std::vector<bool> used(static_cast<std::size_t>(candidates.cols()), false);
  double current = 0.0;  // adjusted R^2 of the intercept-only model

  while (true) {
    Eigen::Index best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < candidates.cols(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      auto trial = selected;
      trial.push_back(j);
      const Eigen::MatrixXd x = gather(candidates, trial);
      if (x.rows() < x.cols() + 2) continue;
      try {
        if (mean_vif(x) > options.vif_limit) continue;
        const double score = fit_ols(x, target).adjusted_r_squared;
        if (score > best_score) {
          best_score = score;
          best = j;
        }
      } catch (const Error& e) {
        // constant or collinear candidates are never admitted
        if (e.kind() != ErrorKind::CollinearFeature && e.kind() != ErrorKind::DegenerateFeature) {
          throw;
        }
      }
    }
    if (best < 0 || best_score - current < options.min_improvement) break;
    selected.push_back(best);
    used[static_cast<std::size_t>(best)] = true;
    current = best_score;
  }
  return selected;
}

BenchmarkRows rows_from_sweep(const std::vector<PhaseSample>& sweep,
                              const CalibrationPoint& cal_frequencies) {
  const PhaseSample* cal = nullptr;
  for (const auto& s : sweep) {
    if (s.config.core == cal_frequencies.core && s.config.uncore == cal_frequencies.uncore) {
      cal = &s;
      break;
    }
  }
  if (cal == nullptr) {
    throw Error(ErrorKind::InvalidCalibration,
                "sweep has no sample at the calibration frequencies " +
                    format_ghz(cal_frequencies.core) + "|" + format_ghz(cal_frequencies.uncore));
  }
  if (!cal->counters) {
    throw Error(ErrorKind::InvalidCalibration, "calibration sample carries no counters");
  }
  check_sample(*cal);

  CalibrationPoint point = cal_frequencies;
  point.reference_energy = cal->node_energy;

  BenchmarkRows out;
  out.calibration_rates = normalize_counters(*cal->counters, cal->duration);
  out.rows.reserve(sweep.size());
  for (const auto& s : sweep) {
    if (s.config.omp_threads != cal->config.omp_threads) continue;
    check_sample(s);
    out.rows.push_back(TrainingRow{
        make_features(out.calibration_rates, s.config.core, s.config.uncore),
        normalize_energy(s.node_energy, point)});
  }
  return out;
}

}  // namespace eatune
