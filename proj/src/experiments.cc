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

#include "qrouting/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "qrouting/errors.h"

namespace qrouting::experiments {

using dynamics::GameConfig;
using network::RoutingNetwork;

namespace {

// Runs body(0..n-1) on up to ThreadCount() workers. Each index writes only
// its own output slot, so ordering is fixed by the caller.
void ParallelFor(int n, const std::function<void(int)>& body) {
  const int workers = std::min(ThreadCount(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

EnsembleMember MemberFromTrace(std::uint64_t seed,
                               const dynamics::RunTrace& trace) {
  EnsembleMember m;
  m.seed = seed;
  m.equilibrium_cost = trace.equilibrium_cost;
  m.converged = trace.verdict.converged;
  m.convergence_iteration = trace.verdict.iteration;
  m.final_strategies = trace.final_strategies;
  m.final_marginals = trace.final_evaluation.marginals;
  if (trace.final_evaluation.flows) {
    m.final_flows = trace.final_evaluation.flows->edge_flow;
  }
  return m;
}

}  // namespace

GameConfig CalibratedConfig() {
  GameConfig c;
  c.mode = dynamics::ObjectiveMode::kPathDiff;
  c.sign = dynamics::StepSign::kPaper;
  return c;
}

int ThreadCount() {
  if (const char* env = std::getenv("QROUTING_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) {
      return static_cast<int>(std::min(v, 256L));
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

double EnsembleResult::MedianCost() const {
  std::vector<double> costs;
  for (const auto& m : members) costs.push_back(m.equilibrium_cost);
  return Median(std::move(costs));
}

double EnsembleResult::CostSpread() const {
  if (members.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(
      members.begin(), members.end(), [](const auto& a, const auto& b) {
        return a.equilibrium_cost < b.equilibrium_cost;
      });
  return hi->equilibrium_cost - lo->equilibrium_cost;
}

double EnsembleResult::ConvergenceRate() const {
  if (members.empty()) return 0.0;
  const auto n = std::count_if(members.begin(), members.end(),
                               [](const auto& m) { return m.converged; });
  return static_cast<double>(n) / static_cast<double>(members.size());
}

std::vector<double> EnsembleResult::ParameterStdDev() const {
  if (members.empty()) return {};
  const size_t players = members.front().final_strategies.size();
  std::vector<double> out(players * dynamics::kParamsPerPlayer, 0.0);
  const double n = static_cast<double>(members.size());
  for (size_t k = 0; k < players; ++k) {
    for (int j = 0; j < dynamics::kParamsPerPlayer; ++j) {
      double sum = 0.0, sum2 = 0.0;
      for (const auto& m : members) {
        const double x = dynamics::Param(m.final_strategies[k], j);
        sum += x;
        sum2 += x * x;
      }
      const double mean = sum / n;
      out[k * dynamics::kParamsPerPlayer + j] =
          std::sqrt(std::max(0.0, sum2 / n - mean * mean));
    }
  }
  return out;
}

const EnsembleMember& EnsembleResult::MedianMember() const {
  if (members.empty()) throw InvalidInputError("empty ensemble");
  std::vector<const EnsembleMember*> order;
  for (const auto& m : members) order.push_back(&m);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    if (a->equilibrium_cost != b->equilibrium_cost) {
      return a->equilibrium_cost < b->equilibrium_cost;
    }
    return a->seed < b->seed;
  });
  return *order[(order.size() - 1) / 2];
}

EnsembleResult RunEnsemble(const GameConfig& config,
                           const RoutingNetwork& network, int n_seeds) {
  config.Validate();
  if (n_seeds < 1) throw InvalidInputError("seeds must be at least 1");
  EnsembleResult result;
  result.gamma = config.gamma;
  result.members.resize(n_seeds);
  ParallelFor(n_seeds, [&](int i) {
    GameConfig c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(i);
    result.members[i] =
        MemberFromTrace(c.seed, dynamics::RunRepeatedGame(c, network));
  });
  return result;
}

std::vector<double> GammaGrid(int points) {
  if (points < 1) throw InvalidInputError("gamma grid needs >= 1 point");
  std::vector<double> grid(points, 0.0);
  if (points == 1) return grid;
  for (int i = 0; i < points; ++i) {
    grid[i] = (std::numbers::pi / 2.0) * i / (points - 1);
  }
  return grid;
}

SweepResult GammaSweep(const GameConfig& config, const RoutingNetwork& network,
                       std::span<const double> gammas, int seeds_per_point) {
  config.Validate();
  if (seeds_per_point < 1) throw InvalidInputError("seeds must be at least 1");
  for (double g : gammas) {
    if (!(g >= 0.0 && g <= std::numbers::pi / 2.0 + 1e-12)) {
      throw InvalidInputError("gamma out of range [0, pi/2]: " +
                              std::to_string(g));
    }
  }
  SweepResult result;
  if (gammas.empty()) return result;
  result.optimal_cost = network::OptimalFlow(network).cost;

  // Flatten (gamma, seed) so a single pool covers the whole sweep.
  const int n_gamma = static_cast<int>(gammas.size());
  std::vector<double> costs(static_cast<size_t>(n_gamma) * seeds_per_point);
  std::vector<char> converged(costs.size(), 0);
  ParallelFor(static_cast<int>(costs.size()), [&](int idx) {
    GameConfig c = config;
    c.gamma = std::min(gammas[idx / seeds_per_point], std::numbers::pi / 2.0);
    c.seed = config.seed + static_cast<std::uint64_t>(idx % seeds_per_point);
    const auto trace = dynamics::RunRepeatedGame(c, network);
    costs[idx] = trace.equilibrium_cost;
    converged[idx] = trace.verdict.converged ? 1 : 0;
  });

  for (int g = 0; g < n_gamma; ++g) {
    EnsembleResult e;
    e.gamma = gammas[g];
    for (int s = 0; s < seeds_per_point; ++s) {
      EnsembleMember m;
      m.seed = config.seed + s;
      m.equilibrium_cost = costs[g * seeds_per_point + s];
      m.converged = converged[g * seeds_per_point + s] != 0;
      e.members.push_back(std::move(m));
    }
    SweepRow row;
    row.gamma = gammas[g];
    row.median_cost = e.MedianCost();
    row.spread = e.CostSpread();
    row.kappa_q = result.optimal_cost > 1e-15
                      ? row.median_cost / result.optimal_cost
                      : std::nan("");
    row.convergence_rate = e.ConvergenceRate();
    result.rows.push_back(row);
  }
  return result;
}

std::vector<Variant> StandardVariants() {
  using network::BraessLatencies;
  using network::LatencyFn;
  using network::MakeBraess;
  auto make = [](std::string name, LatencyFn su, LatencyFn sv, LatencyFn ut,
                 LatencyFn vt) {
    BraessLatencies l;
    l.su = su;
    l.sv = sv;
    l.ut = ut;
    l.vt = vt;
    return Variant{std::move(name), MakeBraess(true, l)};
  };
  const auto one = LatencyFn::Constant(1.0);
  const auto f = LatencyFn::Linear(1.0);
  const auto f2 = LatencyFn::Quadratic(1.0);
  std::vector<Variant> variants = {
      make("canonical", f, one, one, f),
      make("diagonal-quadratic", f2, one, one, f2),
      make("diagonal-affine", LatencyFn::Linear(1.0, 0.5),
           LatencyFn::Constant(1.5), LatencyFn::Constant(1.5),
           LatencyFn::Linear(1.0, 0.5)),
      make("asym-quadratic-su", f2, one, one, f),
      make("asym-quadratic-vt", f, one, one, f2),
      make("asym-steep-su", LatencyFn::Linear(2.0), one, one, f),
      make("asym-constants", f, LatencyFn::Constant(1.2),
           LatencyFn::Constant(0.8), f),
  };
  // Central edge too slow to use: no paradox, kappa_C = 1.
  BraessLatencies toll;
  toll.uv = toll.vu = LatencyFn::Constant(1.0);
  variants.push_back({"costly-bridge", MakeBraess(true, toll)});
  return variants;
}

VariantReport CompareVariants(std::span<const Variant> variants,
                              const GameConfig& config, int seeds) {
  VariantReport report;
  report.gamma = std::numbers::pi / 4.0;
  GameConfig c = config;
  c.gamma = report.gamma;
  for (const auto& v : variants) {
    VariantRow row;
    row.name = v.name;
    row.symmetry = network::ClassifyBraessSymmetry(v.network);
    const auto eq = network::ClassicalEquilibrium(v.network);
    const auto opt = network::OptimalFlow(v.network);
    if (opt.cost <= 1e-15) {
      throw UndefinedRatioError("optimal cost is zero for variant " + v.name);
    }
    row.classical_cost = eq.cost;
    row.optimal_cost = opt.cost;
    row.kappa_c = eq.cost / opt.cost;
    row.classical_flows = eq.flows.edge_flow;
    row.optimal_flows = opt.flows.edge_flow;
    const auto ensemble = RunEnsemble(c, v.network, seeds);
    row.quantum_cost = ensemble.MedianCost();
    row.kappa_q = row.quantum_cost / opt.cost;
    row.quantum_flows = ensemble.MedianMember().final_flows;
    for (int e = 0; e < v.network.num_edges(); ++e) {
      row.edge_labels.push_back(v.network.EdgeLabel(e));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<CalibrationRow> CalibrationTable(const GameConfig& base,
                                             int seeds) {
  using dynamics::ObjectiveMode;
  using dynamics::StepSign;
  const auto braess = network::MakeBraess(true);
  const std::vector<double> anchors = {0.0, std::numbers::pi / 4.0,
                                       std::numbers::pi / 2.0};
  const std::vector<double> targets = {2.0, 1.5, 2.0};
  std::vector<CalibrationRow> rows;
  for (auto mode : {ObjectiveMode::kEdgeDiff, ObjectiveMode::kPathDiff,
                    ObjectiveMode::kOwnLatency}) {
    for (auto sign : {StepSign::kPaper, StepSign::kDescent}) {
      GameConfig c = base;
      c.mode = mode;
      c.sign = sign;
      const auto sweep = GammaSweep(c, braess, anchors, seeds);
      CalibrationRow row{mode, sign, {}, true};
      for (size_t i = 0; i < anchors.size(); ++i) {
        row.anchor_costs.push_back(sweep.rows[i].median_cost);
        if (std::abs(sweep.rows[i].median_cost - targets[i]) > 0.05) {
          row.meets_anchors = false;
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace qrouting::experiments
