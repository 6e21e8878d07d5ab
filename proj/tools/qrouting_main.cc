// Copyright 2026 The qrouting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver for the quantum routing game.
//
//   qrouting run       --gamma pi/4 --seed0 3 --format json
//   qrouting sweep     --calibrated --seeds 20 --out sweep.csv
//   qrouting ensemble  --gamma pi/4 --seeds 100
//   qrouting classical --network braess.net
//   qrouting compare   --seeds 10
//   qrouting calibrate --seeds 10

#include <cstdint>
#include <exception>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrouting/dynamics.h"
#include "qrouting/errors.h"
#include "qrouting/experiments.h"
#include "qrouting/io.h"
#include "qrouting/network.h"

namespace {

using namespace qrouting;

struct GameFlags {
  std::string config_path;
  bool calibrated = false;
  std::optional<std::string> gamma;
  std::optional<double> gain;
  std::optional<double> fd_step;
  std::optional<int> iters;
  std::optional<std::uint64_t> seed0;
  std::optional<std::string> mode;
  std::optional<std::string> sign;
};

struct OutputFlags {
  std::string out;
  std::string format = "csv";
};

void AddGameFlags(CLI::App* app, GameFlags& f, bool with_gamma) {
  app->add_option("--config", f.config_path, "Config file (key = value)");
  app->add_flag("--calibrated", f.calibrated,
                "Start from the calibrated path-diff / paper configuration");
  if (with_gamma) {
    app->add_option("--gamma", f.gamma, "Entanglement, number or k*pi/n");
  }
  app->add_option("--gain", f.gain, "Learning gain M");
  app->add_option("--fd-step", f.fd_step, "Finite-difference step d");
  app->add_option("--iters", f.iters, "Rounds per run");
  app->add_option("--seed0", f.seed0, "First seed");
  app->add_option("--mode", f.mode, "edge-diff | path-diff | own-latency");
  app->add_option("--sign", f.sign, "paper | descent");
}

void AddOutputFlags(CLI::App* app, OutputFlags& o) {
  app->add_option("--out", o.out, "Output path (default: stdout)");
  app->add_option("--format", o.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
}

dynamics::GameConfig BuildConfig(const GameFlags& f) {
  dynamics::GameConfig c = f.calibrated ? experiments::CalibratedConfig()
                                        : dynamics::GameConfig{};
  if (!f.config_path.empty()) {
    c = io::ParseConfig(io::ReadFile(f.config_path), c);
  }
  if (f.gamma) c.gamma = io::ParseAngle(*f.gamma);
  if (f.gain) c.gain = *f.gain;
  if (f.fd_step) c.fd_step = *f.fd_step;
  if (f.iters) c.iterations = *f.iters;
  if (f.seed0) c.seed = *f.seed0;
  if (f.mode) c.mode = dynamics::ParseObjectiveMode(*f.mode);
  if (f.sign) c.sign = dynamics::ParseStepSign(*f.sign);
  c.Validate();
  if (c.gamma < 0.0 || c.gamma > std::numbers::pi / 2.0) {
    throw InvalidInputError("gamma must lie in [0, pi/2]");
  }
  return c;
}

network::RoutingNetwork LoadNetwork(const std::string& path) {
  if (path.empty()) return network::MakeBraess(true);
  return io::ParseNetwork(io::ReadFile(path));
}

void Emit(const OutputFlags& o, const std::string& csv,
          const nlohmann::ordered_json& json) {
  const std::string content = o.format == "json" ? io::DumpJson(json) : csv;
  if (o.out.empty()) {
    std::cout << content;
  } else {
    io::WriteFile(o.out, content);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum routing game on Braess-type networks"};
  app.require_subcommand(1);

  GameFlags game;
  OutputFlags output;
  std::string network_path;
  int seeds = 10;
  int points = 33;
  std::vector<std::string> gamma_list;
  std::vector<std::string> variant_paths;

  auto* run = app.add_subcommand("run", "Single learning run");
  AddGameFlags(run, game, true);
  AddOutputFlags(run, output);
  run->add_option("--network", network_path, "Network file (default: Braess)");

  auto* sweep = app.add_subcommand("sweep", "Entanglement sweep");
  AddGameFlags(sweep, game, false);
  AddOutputFlags(sweep, output);
  sweep->add_option("--network", network_path, "Network file (default: Braess)");
  sweep->add_option("--seeds", seeds, "Seeds per gamma")->check(CLI::PositiveNumber);
  sweep->add_option("--points", points, "Grid points on [0, pi/2]")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--gamma", gamma_list, "Explicit gamma values");

  auto* ens = app.add_subcommand("ensemble", "Seed ensemble at one gamma");
  AddGameFlags(ens, game, true);
  AddOutputFlags(ens, output);
  ens->add_option("--network", network_path, "Network file (default: Braess)");
  ens->add_option("--seeds", seeds, "Number of seeds")->check(CLI::PositiveNumber);

  auto* classical = app.add_subcommand(
      "classical", "Wardrop equilibrium, optimum and price of anarchy");
  AddOutputFlags(classical, output);
  classical->add_option("--network", network_path,
                        "Network file (default: Braess)");

  auto* compare = app.add_subcommand("compare", "Latency-variant comparison");
  AddGameFlags(compare, game, false);
  AddOutputFlags(compare, output);
  compare->add_option("--network", variant_paths,
                      "Variant network files (default: built-in set)");
  compare->add_option("--seeds", seeds, "Seeds per variant")
      ->check(CLI::PositiveNumber);

  auto* calibrate = app.add_subcommand(
      "calibrate", "Every objective / sign pairing against the sweep anchors");
  AddGameFlags(calibrate, game, false);
  AddOutputFlags(calibrate, output);
  calibrate->add_option("--seeds", seeds, "Seeds per anchor")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto config = BuildConfig(game);
      const auto net = LoadNetwork(network_path);
      const auto trace = dynamics::RunRepeatedGame(config, net);
      Emit(output, io::TraceCsv(trace, net), io::TraceJson(trace, net));
    } else if (sweep->parsed()) {
      const auto config = BuildConfig(game);
      const auto net = LoadNetwork(network_path);
      std::vector<double> grid;
      if (gamma_list.empty()) {
        grid = experiments::GammaGrid(points);
      } else {
        for (const auto& g : gamma_list) grid.push_back(io::ParseAngle(g));
      }
      const auto result = experiments::GammaSweep(config, net, grid, seeds);
      Emit(output, io::SweepCsv(result), io::SweepJson(result));
    } else if (ens->parsed()) {
      const auto config = BuildConfig(game);
      const auto net = LoadNetwork(network_path);
      const auto result = experiments::RunEnsemble(config, net, seeds);
      Emit(output, io::EnsembleCsv(result, net), io::EnsembleJson(result, net));
    } else if (classical->parsed()) {
      const auto net = LoadNetwork(network_path);
      const auto eq = network::ClassicalEquilibrium(net);
      const auto opt = network::OptimalFlow(net);
      Emit(output, io::ClassicalCsv(net, eq, opt),
           io::ClassicalJson(net, eq, opt));
    } else if (compare->parsed()) {
      const auto config = BuildConfig(game);
      std::vector<experiments::Variant> variants;
      if (variant_paths.empty()) {
        variants = experiments::StandardVariants();
      } else {
        for (const auto& p : variant_paths) {
          variants.push_back({p, io::ParseNetwork(io::ReadFile(p))});
        }
      }
      const auto report = experiments::CompareVariants(variants, config, seeds);
      Emit(output, io::VariantCsv(report), io::VariantJson(report));
    } else if (calibrate->parsed()) {
      const auto config = BuildConfig(game);
      const auto rows = experiments::CalibrationTable(config, seeds);
      Emit(output, io::CalibrationCsv(rows), io::CalibrationJson(rows));
    }
  } catch (const std::exception& e) {
    std::cerr << "qrouting: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
