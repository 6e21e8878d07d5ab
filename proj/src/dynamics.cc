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

#include "qrouting/dynamics.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qrouting/errors.h"

namespace qrouting::dynamics {

using network::RoutingNetwork;
using quantum::StrategyParams;

std::string ToString(ObjectiveMode mode) {
  switch (mode) {
    case ObjectiveMode::kEdgeDiff:
      return "edge-diff";
    case ObjectiveMode::kPathDiff:
      return "path-diff";
    case ObjectiveMode::kOwnLatency:
      return "own-latency";
  }
  return "unknown";
}

std::string ToString(StepSign sign) {
  return sign == StepSign::kPaper ? "paper" : "descent";
}

ObjectiveMode ParseObjectiveMode(const std::string& name) {
  for (ObjectiveMode m : {ObjectiveMode::kEdgeDiff, ObjectiveMode::kPathDiff,
                          ObjectiveMode::kOwnLatency}) {
    if (ToString(m) == name) return m;
  }
  throw InvalidInputError("unknown objective mode '" + name + "'");
}

StepSign ParseStepSign(const std::string& name) {
  if (name == "paper") return StepSign::kPaper;
  if (name == "descent") return StepSign::kDescent;
  throw InvalidInputError("unknown step sign '" + name + "'");
}

void GameConfig::Validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) {
      throw InvalidInputError(std::string(field) + " " + what);
    }
  };
  require(std::isfinite(gamma), "gamma", "must be finite");
  require(std::isfinite(gain) && gain >= 0.0, "gain",
          "must be finite and nonnegative");
  require(std::isfinite(fd_step) && fd_step > 0.0, "fd_step",
          "must be positive");
  require(iterations > 0, "iterations", "must be positive");
  require(std::isfinite(penalty_cost) && penalty_cost > 0.0, "penalty_cost",
          "must be positive");
  require(convergence_window > 0, "convergence_window", "must be positive");
  require(std::isfinite(convergence_tol) && convergence_tol > 0.0,
          "convergence_tol", "must be positive");
}

Evaluation Evaluate(std::span<const StrategyParams> strategies, double gamma,
                    const RoutingNetwork& network, double penalty_cost) {
  if (static_cast<int>(strategies.size()) != network.num_decision_nodes()) {
    throw InvalidInputError("one strategy per decision node required");
  }
  Evaluation ev;
  ev.marginals = quantum::Marginals(quantum::FinalState(strategies, gamma));
  try {
    ev.flows = network::SolveFlows(network, ev.marginals);
    ev.latencies =
        network::ComputeOptionLatencies(network, ev.marginals, *ev.flows);
    ev.total_cost = network::TotalCost(network, *ev.flows);
  } catch (const LoopDivergenceError&) {
    ev.flows.reset();
    ev.latencies.reset();
    ev.total_cost = penalty_cost;
  }
  return ev;
}

double LocalCost(const RoutingNetwork& network, int player,
                 ObjectiveMode mode, const Evaluation& evaluation,
                 double penalty_cost) {
  if (evaluation.diverged()) return penalty_cost;
  const network::DecisionNode& node = network.decision_nodes()[player];
  switch (mode) {
    case ObjectiveMode::kEdgeDiff: {
      const auto edges = network.edges();
      const auto& f = evaluation.flows->edge_flow;
      const int e0 = node.options[0];
      const int e1 = node.options[1];
      return edges[e0].latency(f[e0]) - edges[e1].latency(f[e1]);
    }
    case ObjectiveMode::kPathDiff: {
      const auto& lam = evaluation.latencies->option[player];
      return lam[0] - lam[1];
    }
    case ObjectiveMode::kOwnLatency: {
      const auto& lam = evaluation.latencies->option[player];
      const double p = evaluation.marginals[player];
      return p * lam[0] + (1.0 - p) * lam[1];
    }
  }
  return penalty_cost;
}

double& Param(StrategyParams& s, int index) {
  switch (index) {
    case 0:
      return s.theta;
    case 1:
      return s.phi;
    case 2:
      return s.alpha;
  }
  throw InvalidInputError("parameter index must be 0, 1 or 2");
}

double Param(const StrategyParams& s, int index) {
  return Param(const_cast<StrategyParams&>(s), index);
}

double PerturbedCost(int player, int param_index,
                     std::span<const StrategyParams> strategies, double d,
                     const GameConfig& config, const RoutingNetwork& network) {
  if (player < 0 || player >= static_cast<int>(strategies.size())) {
    throw InvalidInputError("player index out of range");
  }
  Strategies shifted(strategies.begin(), strategies.end());
  Param(shifted[player], param_index) += d;
  const Evaluation ev =
      Evaluate(shifted, config.gamma, network, config.penalty_cost);
  return LocalCost(network, player, config.mode, ev, config.penalty_cost);
}

Strategies UpdateStep(std::span<const StrategyParams> strategies,
                      std::span<const double> base_costs,
                      std::span<const double> perturbed_costs,
                      const GameConfig& config) {
  const std::size_t players = strategies.size();
  if (base_costs.size() != players ||
      perturbed_costs.size() != players * kParamsPerPlayer) {
    throw InvalidInputError("cost arrays do not match the player count");
  }
  const double sign = config.sign == StepSign::kPaper ? -1.0 : 1.0;
  Strategies next(strategies.begin(), strategies.end());
  for (std::size_t k = 0; k < players; ++k) {
    for (int i = 0; i < kParamsPerPlayer; ++i) {
      const double diff =
          base_costs[k] - perturbed_costs[k * kParamsPerPlayer + i];
      Param(next[k], i) += sign * config.gain * diff;
    }
  }
  return next;
}

ConvergenceVerdict DetectConvergence(std::span<const double> costs, int window,
                                     double tol) {
  if (window <= 0) throw InvalidInputError("window must be positive");
  const int n = static_cast<int>(costs.size());
  for (int k = window; k <= n; ++k) {
    const auto begin = costs.begin() + (k - window);
    const auto [lo, hi] = std::minmax_element(begin, costs.begin() + k);
    if (*hi - *lo < tol) return {true, k};
  }
  return {false, 0};
}

std::vector<double> RunTrace::TotalCosts() const {
  std::vector<double> out;
  out.reserve(iterations.size());
  for (const IterationRecord& r : iterations) out.push_back(r.total_cost);
  return out;
}

Strategies RandomStrategies(int players, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // 53 random mantissa bits; avoids the implementation-defined
  // std::uniform_real_distribution so traces match across standard libraries.
  auto uniform = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 *
           std::numbers::pi;
  };
  Strategies s(players);
  for (StrategyParams& p : s) {
    p.theta = uniform();
    p.phi = uniform();
    p.alpha = uniform();
  }
  return s;
}

RunTrace RunRepeatedGame(const GameConfig& config,
                         const RoutingNetwork& network) {
  return RunRepeatedGame(
      config, network,
      RandomStrategies(network.num_decision_nodes(), config.seed));
}

RunTrace RunRepeatedGame(const GameConfig& config,
                         const RoutingNetwork& network, Strategies initial) {
  config.Validate();
  const int players = network.num_decision_nodes();
  if (static_cast<int>(initial.size()) != players) {
    throw InvalidInputError("one initial strategy per decision node required");
  }
  RunTrace trace;
  trace.iterations.reserve(config.iterations);
  Strategies current = std::move(initial);
  std::vector<double> base(players);
  std::vector<double> perturbed(players * kParamsPerPlayer);
  for (int n = 0; n < config.iterations; ++n) {
    const Evaluation ev =
        Evaluate(current, config.gamma, network, config.penalty_cost);
    IterationRecord rec;
    rec.strategies = current;
    rec.marginals = ev.marginals;
    if (ev.flows) rec.edge_flow = ev.flows->edge_flow;
    rec.total_cost = ev.total_cost;
    for (int k = 0; k < players; ++k) {
      base[k] = LocalCost(network, k, config.mode, ev, config.penalty_cost);
    }
    rec.local_costs = base;
    trace.iterations.push_back(std::move(rec));

    for (int k = 0; k < players; ++k) {
      for (int i = 0; i < kParamsPerPlayer; ++i) {
        perturbed[k * kParamsPerPlayer + i] =
            PerturbedCost(k, i, current, config.fd_step, config, network);
      }
    }
    current = UpdateStep(current, base, perturbed, config);
  }

  const std::vector<double> costs = trace.TotalCosts();
  trace.verdict = DetectConvergence(costs, config.convergence_window,
                                    config.convergence_tol);
  const int window =
      std::min<int>(config.convergence_window, static_cast<int>(costs.size()));
  double sum = 0.0;
  for (int i = static_cast<int>(costs.size()) - window;
       i < static_cast<int>(costs.size()); ++i) {
    sum += costs[i];
  }
  trace.equilibrium_cost = sum / window;
  trace.final_evaluation =
      Evaluate(current, config.gamma, network, config.penalty_cost);
  trace.final_strategies = std::move(current);
  return trace;
}

}  // namespace qrouting::dynamics
