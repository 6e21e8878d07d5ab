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

#ifndef QROUTING_DYNAMICS_H_
#define QROUTING_DYNAMICS_H_

// Repeated quantum routing game. Each round every player observes the
// current outcome, probes each of its three rotation angles with a forward
// difference, and all players update simultaneously.
//
// Player k owns qubit k and decision node k of the network; the probability
// that qubit k measures 0 is the fraction node k sends along option 0.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrouting/network.h"
#include "qrouting/quantum.h"

namespace qrouting::dynamics {

using Strategies = std::vector<quantum::StrategyParams>;

enum class ObjectiveMode {
  // L_opt0(f_opt0) - L_opt1(f_opt1): immediate edge latencies only.
  kEdgeDiff,
  // Lambda_0 - Lambda_1: expected latency-to-sink of each option.
  kPathDiff,
  // p Lambda_0 + (1 - p) Lambda_1: the node's own expected latency.
  kOwnLatency,
};

enum class StepSign {
  // param <- param - M (C_base - C_perturbed)
  kPaper,
  // param <- param + M (C_base - C_perturbed): moves against the forward
  // difference of the player's cost.
  kDescent,
};

std::string ToString(ObjectiveMode mode);
std::string ToString(StepSign sign);
// Accepts the names produced by ToString ("edge-diff", "path-diff",
// "own-latency", "paper", "descent"). Throws InvalidInputError otherwise.
ObjectiveMode ParseObjectiveMode(const std::string& name);
StepSign ParseStepSign(const std::string& name);

struct GameConfig {
  double gamma = 0.0;
  double gain = 10.0;
  double fd_step = 0.01;
  int iterations = 400;
  std::uint64_t seed = 0;
  ObjectiveMode mode = ObjectiveMode::kOwnLatency;
  StepSign sign = StepSign::kDescent;
  double penalty_cost = 1e6;
  int convergence_window = 50;
  double convergence_tol = 1e-3;

  // Throws InvalidInputError naming the first offending field.
  void Validate() const;

  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

struct Evaluation {
  std::vector<double> marginals;
  // Absent when the fractions make flow circulate forever.
  std::optional<network::FlowAssignment> flows;
  std::optional<network::OptionLatencies> latencies;
  double total_cost = 0.0;

  bool diverged() const { return !flows.has_value(); }
};

// final state -> marginals -> fractions -> flows -> option latencies -> cost.
// Divergent circulation yields total_cost = penalty_cost.
Evaluation Evaluate(std::span<const quantum::StrategyParams> strategies,
                    double gamma, const network::RoutingNetwork& network,
                    double penalty_cost);

// Player `player`'s cost under `mode`; penalty_cost when evaluation diverged.
double LocalCost(const network::RoutingNetwork& network, int player,
                 ObjectiveMode mode, const Evaluation& evaluation,
                 double penalty_cost);

// 0 = theta, 1 = phi, 2 = alpha.
inline constexpr int kParamsPerPlayer = 3;

double& Param(quantum::StrategyParams& s, int index);
double Param(const quantum::StrategyParams& s, int index);

// The player's local cost after shifting one of its own angles by d.
double PerturbedCost(int player, int param_index,
                     std::span<const quantum::StrategyParams> strategies,
                     double d, const GameConfig& config,
                     const network::RoutingNetwork& network);

// Simultaneous update of every angle. `base_costs` holds one cost per player;
// `perturbed_costs` holds kParamsPerPlayer entries per player, in player-major
// order.
Strategies UpdateStep(std::span<const quantum::StrategyParams> strategies,
                      std::span<const double> base_costs,
                      std::span<const double> perturbed_costs,
                      const GameConfig& config);

struct IterationRecord {
  Strategies strategies;
  std::vector<double> marginals;
  // Empty when the evaluation diverged.
  std::vector<double> edge_flow;
  std::vector<double> local_costs;
  double total_cost = 0.0;
};

struct ConvergenceVerdict {
  bool converged = false;
  // 1-based iteration count at which the trailing window first became flat.
  int iteration = 0;

  friend bool operator==(const ConvergenceVerdict&,
                         const ConvergenceVerdict&) = default;
};

// First k >= window with max - min of costs[k - window, k) below tol.
ConvergenceVerdict DetectConvergence(std::span<const double> costs, int window,
                                     double tol);

struct RunTrace {
  std::vector<IterationRecord> iterations;
  ConvergenceVerdict verdict;
  // Mean total cost over the final convergence window.
  double equilibrium_cost = 0.0;
  Strategies final_strategies;
  Evaluation final_evaluation;

  std::vector<double> TotalCosts() const;
};

// Angles of every player drawn uniformly from [0, 2 pi).
Strategies RandomStrategies(int players, std::uint64_t seed);

// Plays config.iterations rounds from RandomStrategies(seed). Record n holds
// the strategies played in round n and their outcome; final_strategies are
// the strategies after the last update.
RunTrace RunRepeatedGame(const GameConfig& config,
                         const network::RoutingNetwork& network);

// Same as above from explicit initial strategies.
RunTrace RunRepeatedGame(const GameConfig& config,
                         const network::RoutingNetwork& network,
                         Strategies initial);

}  // namespace qrouting::dynamics

#endif  // QROUTING_DYNAMICS_H_
