#pragma once

#include <Eigen/Core>

#include <map>
#include <span>
#include <string>
#include <vector>

#include "eatune/domain.hpp"
#include "eatune/features.hpp"
#include "eatune/network.hpp"

namespace eatune {

/// Trained predictor of normalized node energy.
struct EnergyModel {
  Standardizer standardizer;
  NetworkParamsd params;
  TrainingConfig config;

  double predict(const FeatureVector& features) const;
  double predict(const PmcVector& rates, Frequency core, Frequency uncore) const;
};

struct TrainResult {
  EnergyModel model;
  std::vector<double> epoch_mse;  // training MSE after each epoch
};

struct NetworkFit {
  NetworkParamsd params;
  std::vector<double> epoch_mse;
};

/// Adam on already-standardized inputs: `cfg.epochs` passes, one step per
/// sample, order reshuffled each epoch from `cfg.seed`.
NetworkFit train_network(std::span<const LabeledInput<double>> samples, const TrainingConfig& cfg);

/// Fits the standardizer on `rows`, then runs `cfg.epochs` shuffled passes with
/// one Adam step per sample.
TrainResult train(std::span<const TrainingRow> rows, const TrainingConfig& cfg);

/// Mean absolute percentage error, in percent.
double mape(std::span<const double> predictions, std::span<const double> targets);

struct EvalReport {
  std::map<std::string, double> per_benchmark_mape;
  double mean_mape = 0.0;

  bool operator==(const EvalReport&) const = default;
};

using BenchmarkSet = std::map<std::string, std::vector<TrainingRow>>;

/// Leave-one-benchmark-out: each fold trains on the remaining benchmarks and
/// scores the held-out one across all its frequency states.
EvalReport loocv(const BenchmarkSet& benchmarks, const TrainingConfig& cfg);

/// Predicted E_norm over a frequency grid; rows follow core frequencies and
/// columns uncore frequencies, both ascending.
struct EnergySurface {
  FrequencyGrid grid;
  Eigen::MatrixXd values;

  double at(Frequency core, Frequency uncore) const;
};

EnergySurface predict_surface(const EnergyModel& model, const PmcVector& rates,
                              const FrequencyGrid& grid);

}  // namespace eatune
