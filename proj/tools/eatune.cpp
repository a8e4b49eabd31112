// eatune: energy-aware region tuning on a simulated node.
//
//   eatune simulate --experiment corpus.json --out profiles/
//   eatune train    --profiles profiles/ --out model.json
//   eatune loocv    --profiles profiles/
//   eatune tune     --experiment app.json --model model.json --out tm.json
//   eatune compare  --experiment app.json --tuning-model tm.json

#include <CLI11.hpp>

#include <iostream>

#include "eatune/commands.hpp"

namespace {

struct SweepFlag {
  int lower = 12;
  int step = 4;
};

SweepFlag parse_sweep(const std::string& text) {
  const auto colon = text.find(':');
  SweepFlag s;
  try {
    if (colon == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    s.lower = std::stoi(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(text);
    const std::string rest = text.substr(colon + 1);
    s.step = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--sweep", "expected lower:step, got \"" + text + "\"");
  }
  if (s.lower < 1 || s.step < 1) {
    throw CLI::ValidationError("--sweep", "lower bound and step must be at least 1");
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  using eatune::ExitCode;

  CLI::App app{"Energy-aware core/uncore frequency and OpenMP thread tuning"};
  app.require_subcommand(1);

  std::string grid_text = "1.2:2.5:0.1,1.3:3.0:0.1";
  std::string sweep_text = "12:4";
  std::uint64_t seed = 0;
  std::optional<double> noise;
  int epochs = -1;
  double lr = 1e-3;

  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid", grid_text, "cf_min:cf_max[:step],ucf_min:ucf_max[:step] in GHz")
        ->capture_default_str();
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "seed for all randomness")->capture_default_str();
  };
  auto add_noise = [&](CLI::App* sub) {
    sub->add_option("--noise", noise, "override the node's relative energy noise");
  };
  auto add_sweep = [&](CLI::App* sub) {
    sub->add_option("--sweep", sweep_text, "thread sweep lower:step (upper = node cores)")
        ->capture_default_str();
  };

  eatune::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "write per-benchmark profiles from the simulator");
  simulate->add_option("--experiment", sim.experiment, "experiment document")->required();
  simulate->add_option("--out", sim.out_dir, "output directory")->required();
  simulate->add_option("--threads", sim.threads, "OpenMP threads for the sweep")
      ->capture_default_str();
  add_grid(simulate);
  add_seed(simulate);
  add_noise(simulate);

  eatune::TrainOptions tr;
  auto* train = app.add_subcommand("train", "train the energy model on a profile directory");
  train->add_option("--profiles", tr.profiles_dir, "directory of profile documents")->required();
  train->add_option("--out", tr.out_model, "model output path")->required();
  train->add_option("--epochs", epochs, "training epochs (default 10)");
  train->add_option("--lr", lr, "Adam learning rate")->capture_default_str();
  add_seed(train);

  eatune::LoocvOptions lo;
  auto* loocv = app.add_subcommand("loocv", "leave-one-benchmark-out evaluation");
  loocv->add_option("--profiles", lo.profiles_dir, "directory of profile documents")->required();
  loocv->add_option("--out", lo.out_report, "optional report document path");
  loocv->add_option("--epochs", epochs, "training epochs per fold (default 5)");
  loocv->add_option("--lr", lr, "Adam learning rate")->capture_default_str();
  add_seed(loocv);

  eatune::TuneOptions tu;
  auto* tune = app.add_subcommand("tune", "run the tuning workflow and write a tuning model");
  tune->add_option("--experiment", tu.experiment, "experiment document")->required();
  tune->add_option("--app", tu.application, "application name (default: first)");
  tune->add_option("--model", tu.model, "trained energy model")->required();
  tune->add_option("--out", tu.out_tuning_model, "tuning model output path")->required();
  add_grid(tune);
  add_sweep(tune);
  add_seed(tune);
  add_noise(tune);

  eatune::CompareOptions co;
  auto* compare = app.add_subcommand("compare", "static vs dynamic savings against the default");
  compare->add_option("--experiment", co.experiment, "experiment document")->required();
  compare->add_option("--app", co.application, "application name (default: first)");
  compare->add_option("--tuning-model", co.tuning_model, "tuning model document")->required();
  compare->add_option("--out", co.out_report, "optional comparison document path");
  add_grid(compare);
  add_sweep(compare);
  add_seed(compare);
  add_noise(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::Usage);
  }

  SweepFlag sweep;
  eatune::FrequencyGrid grid;
  try {
    sweep = parse_sweep(sweep_text);
    grid = eatune::io::parse_grid(grid_text);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Usage);
  } catch (const eatune::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Usage);
  }
  const eatune::SimulationOverrides overrides{noise, seed};

  ExitCode code = ExitCode::Ok;
  if (*simulate) {
    sim.grid = grid;
    sim.sim = overrides;
    code = eatune::run_command([&] { eatune::cmd_simulate(sim, std::cout, std::cerr); }, std::cerr);
  } else if (*train) {
    tr.training.epochs = epochs >= 0 ? epochs : 10;
    tr.training.learning_rate = lr;
    tr.training.seed = seed;
    code = eatune::run_command([&] { eatune::cmd_train(tr, std::cout, std::cerr); }, std::cerr);
  } else if (*loocv) {
    lo.training.epochs = epochs >= 0 ? epochs : 5;
    lo.training.learning_rate = lr;
    lo.training.seed = seed;
    code = eatune::run_command([&] { eatune::cmd_loocv(lo, std::cout, std::cerr); }, std::cerr);
  } else if (*tune) {
    tu.grid = grid;
    tu.sweep_lower = sweep.lower;
    tu.sweep_step = sweep.step;
    tu.sim = overrides;
    code = eatune::run_command([&] { eatune::cmd_tune(tu, std::cout, std::cerr); }, std::cerr);
  } else if (*compare) {
    co.grid = grid;
    co.sweep_lower = sweep.lower;
    co.sweep_step = sweep.step;
    co.sim = overrides;
    code = eatune::run_command([&] { eatune::cmd_compare(co, std::cout, std::cerr); }, std::cerr);
  }
  return static_cast<int>(code);
}
