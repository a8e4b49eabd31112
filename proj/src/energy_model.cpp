#include "eatune/energy_model.hpp"

#include <cmath>
#include <numeric>

namespace eatune {

double EnergyModel::predict(const FeatureVector& features) const {
  const NetworkParamsd::Input x = standardizer.apply(features);
  return forward(params, x);
}

double EnergyModel::predict(const PmcVector& rates, Frequency core, Frequency uncore) const {
  return predict(make_features(rates, core, uncore));
}

NetworkFit train_network(std::span<const LabeledInput<double>> samples, const TrainingConfig& cfg) {
  if (samples.empty()) {
    throw Error(ErrorKind::InvalidInput, "training set is empty");
  }
  if (cfg.epochs < 0) {
    throw Error(ErrorKind::InvalidInput, "epoch count must be non-negative");
  }
  NetworkFit fit{init_params<double>(cfg.seed), {}};

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // shuffle stream is separate from the initialisation stream
  CounterRng shuffle_rng(hash_combine(cfg.seed, 0x53485546464c45ULL));
  AdamMoments<double> moments;
  long step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    for (std::size_t idx : order) {
      const auto lg = loss_and_gradients<double>(fit.params, samples.subspan(idx, 1));
      adam_step(fit.params, lg.grads, moments, ++step, cfg);
    }
    if (!fit.params.all_finite()) {
      throw Error(ErrorKind::Numerical, "training diverged in epoch " + std::to_string(epoch + 1));
    }
    fit.epoch_mse.push_back(loss_and_gradients<double>(fit.params, samples).mse);
  }
  return fit;
}

TrainResult train(std::span<const TrainingRow> rows, const TrainingConfig& cfg) {
  if (rows.empty()) {
    throw Error(ErrorKind::InvalidInput, "training set is empty");
  }

  Eigen::MatrixXd raw(static_cast<Eigen::Index>(rows.size()), kFeatureCount);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    raw.row(static_cast<Eigen::Index>(i)) = rows[i].features.transpose();
  }

  TrainResult result;
  result.model.standardizer = Standardizer::fit(raw);
  result.model.config = cfg;

  const Eigen::MatrixXd standardized = result.model.standardizer.apply_rows(raw);
  std::vector<LabeledInput<double>> samples(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    samples[i].x = standardized.row(static_cast<Eigen::Index>(i)).transpose();
    samples[i].target = rows[i].target;
  }

  NetworkFit fit = train_network(samples, cfg);
  result.model.params = fit.params;
  result.epoch_mse = std::move(fit.epoch_mse);
  return result;
}

double mape(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size() || targets.empty()) {
    throw Error(ErrorKind::InvalidInput, "MAPE needs equal, nonzero lengths");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] == 0.0) {
      throw Error(ErrorKind::InvalidInput, "MAPE target " + std::to_string(i) + " is zero");
    }
    sum += std::abs(predictions[i] - targets[i]) / std::abs(targets[i]);
  }
  return 100.0 * sum / static_cast<double>(targets.size());
}

EvalReport loocv(const BenchmarkSet& benchmarks, const TrainingConfig& cfg) {
  if (benchmarks.size() < 2) {
    throw Error(ErrorKind::InvalidInput, "leave-one-out needs at least two benchmarks");
  }
  EvalReport report;
  for (const auto& [held_out, test_rows] : benchmarks) {
    std::vector<TrainingRow> training;
    for (const auto& [name, rows] : benchmarks) {
      if (name != held_out) training.insert(training.end(), rows.begin(), rows.end());
    }
    const EnergyModel model = train(training, cfg).model;

    std::vector<double> predicted, actual;
    for (const auto& row : test_rows) {
      predicted.push_back(model.predict(row.features));
      actual.push_back(row.target);
    }
    report.per_benchmark_mape[held_out] = mape(predicted, actual);
  }
  double total = 0.0;
  for (const auto& [name, value] : report.per_benchmark_mape) total += value;
  report.mean_mape = total / static_cast<double>(report.per_benchmark_mape.size());
  return report;
}

double EnergySurface::at(Frequency core, Frequency uncore) const {
  if (!grid.contains_core(core) || !grid.contains_uncore(uncore)) {
    throw Error(ErrorKind::InvalidInput, "frequency pair is outside the surface grid");
  }
  return values((core.deci() - grid.cf_min().deci()) / grid.cf_step(),
                (uncore.deci() - grid.ucf_min().deci()) / grid.ucf_step());
}

EnergySurface predict_surface(const EnergyModel& model, const PmcVector& rates,
                              const FrequencyGrid& grid) {
  const auto cores = grid.core_values();
  const auto uncores = grid.uncore_values();
  EnergySurface surface{grid, Eigen::MatrixXd(static_cast<Eigen::Index>(cores.size()),
                                              static_cast<Eigen::Index>(uncores.size()))};
  for (std::size_t i = 0; i < cores.size(); ++i) {
    for (std::size_t j = 0; j < uncores.size(); ++j) {
      surface.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          model.predict(rates, cores[i], uncores[j]);
    }
  }
  return surface;
}

}  // namespace eatune
