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

#ifndef QROUTING_EXPERIMENTS_H_
#define QROUTING_EXPERIMENTS_H_

// Experiment drivers: seed ensembles, entanglement sweeps and the
// latency-variant comparison. Independent runs execute on a small thread
// pool (QROUTING_THREADS, default hardware concurrency); results are always
// assembled in seed / gamma order, so the thread count never changes output.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qrouting/dynamics.h"
#include "qrouting/network.h"

namespace qrouting::experiments {

// path-diff objective with the literal update sign, 400 rounds, M = 10,
// d = 0.01. This is the pairing that reproduces the entanglement sweep
// anchors; see README for the full calibration table.
dynamics::GameConfig CalibratedConfig();

// Worker count from QROUTING_THREADS, falling back to the hardware count.
int ThreadCount();

struct EnsembleMember {
  std::uint64_t seed = 0;
  double equilibrium_cost = 0.0;
  bool converged = false;
  int convergence_iteration = 0;
  dynamics::Strategies final_strategies;
  std::vector<double> final_marginals;
  // Empty if the final strategies diverge.
  std::vector<double> final_flows;
};

struct EnsembleResult {
  double gamma = 0.0;
  std::vector<EnsembleMember> members;

  double MedianCost() const;
  // max - min of the equilibrium costs.
  double CostSpread() const;
  double ConvergenceRate() const;
  // Cross-seed standard deviation of each final angle, player-major.
  std::vector<double> ParameterStdDev() const;
  // Member whose cost is the (lower) median; ties broken by seed.
  const EnsembleMember& MedianMember() const;
};

// Runs seeds config.seed, ..., config.seed + n_seeds - 1.
EnsembleResult RunEnsemble(const dynamics::GameConfig& config,
                           const network::RoutingNetwork& network,
                           int n_seeds);

struct SweepRow {
  double gamma = 0.0;
  double median_cost = 0.0;
  double spread = 0.0;
  // median_cost / optimal cost.
  double kappa_q = 0.0;
  double convergence_rate = 0.0;
};

struct SweepResult {
  double optimal_cost = 0.0;
  std::vector<SweepRow> rows;
};

// `points` evenly spaced values on [0, pi/2]; the default is 33.
std::vector<double> GammaGrid(int points = 33);

// Throws InvalidInputError if a gamma lies outside [0, pi/2].
SweepResult GammaSweep(const dynamics::GameConfig& config,
                       const network::RoutingNetwork& network,
                       std::span<const double> gammas, int seeds_per_point);

struct Variant {
  std::string name;
  network::RoutingNetwork network;
};

struct VariantRow {
  std::string name;
  network::BraessSymmetry symmetry;
  double classical_cost = 0.0;
  double optimal_cost = 0.0;
  double quantum_cost = 0.0;
  double kappa_c = 0.0;
  double kappa_q = 0.0;
  std::vector<double> classical_flows;
  std::vector<double> optimal_flows;
  // Final flows of the median-cost quantum run.
  std::vector<double> quantum_flows;
  std::vector<std::string> edge_labels;
};

struct VariantReport {
  double gamma = 0.0;
  std::vector<VariantRow> rows;
};

// Braess topologies (central edge present) with constant, linear and
// quadratic latencies: the canonical instance, diagonally symmetric and
// asymmetric variants, and one with a costly central edge (kappa_C = 1).
std::vector<Variant> StandardVariants();

// kappa_C from the classical solvers, kappa_Q from a quantum ensemble at
// gamma = pi/4 (config.gamma is overridden).
VariantReport CompareVariants(std::span<const Variant> variants,
                              const dynamics::GameConfig& config,
                              int seeds);

struct CalibrationRow {
  dynamics::ObjectiveMode mode;
  dynamics::StepSign sign;
  // Median equilibrium cost at gamma = 0, pi/4, pi/2.
  std::vector<double> anchor_costs;
  bool meets_anchors = false;
};

// Every (mode, sign) pairing against the canonical sweep anchors
// 2.0 / 1.5 / 2.0 with tolerance 0.05.
std::vector<CalibrationRow> CalibrationTable(const dynamics::GameConfig& base,
                                             int seeds);

}  // namespace qrouting::experiments

#endif  // QROUTING_EXPERIMENTS_H_
