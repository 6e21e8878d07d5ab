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

#ifndef QROUTING_NETWORK_H_
#define QROUTING_NETWORK_H_

// Single-commodity congestion networks with unit (or fixed) demand, routed by
// per-node splitting fractions. A decision node sends a fraction p of its
// inflow along its option-0 edge and 1 - p along its option-1 edge; every
// other non-sink node forwards its inflow along its single outgoing edge.
// Cycles are allowed (the Braess network's central edge is bidirectional);
// flows are then the fixed point of the conservation equations.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qrouting::network {

// L(f) = a + b f + c f^2 with a, b, c >= 0.
struct LatencyFn {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  static LatencyFn Constant(double a) { return {a, 0.0, 0.0}; }
  static LatencyFn Linear(double b, double a = 0.0) { return {a, b, 0.0}; }
  static LatencyFn Quadratic(double c, double b = 0.0, double a = 0.0) {
    return {a, b, c};
  }

  double operator()(double f) const { return a + (b + c * f) * f; }
  // Integral of L over [0, f].
  double Integral(double f) const {
    return (a + (b / 2.0 + c * f / 3.0) * f) * f;
  }
  LatencyFn Scaled(double lambda) const {
    return {lambda * a, lambda * b, lambda * c};
  }
  // Throws InvalidInputError if a coefficient is negative or non-finite.
  void Validate() const;

  friend bool operator==(const LatencyFn&, const LatencyFn&) = default;
};

struct Edge {
  int from = 0;
  int to = 0;
  LatencyFn latency;
};

struct DecisionNode {
  int node = 0;
  // Edge indices of option 0 and option 1.
  std::array<int, 2> options{};
};

// Fraction of each decision node's inflow sent along its option-0 edge, in
// decision-node order.
using RoutingFractions = std::vector<double>;

struct FlowAssignment {
  std::vector<double> edge_flow;
  // Total flow entering each node (the source counts its injection).
  std::vector<double> node_inflow;
};

struct OptionLatencies {
  // Expected latency from each node to the sink.
  std::vector<double> node_value;
  // Per decision node: L_e(f_e) + value(head(e)) for option 0 and option 1.
  std::vector<std::array<double, 2>> option;
};

class RoutingNetwork {
 public:
  struct DecisionSpec {
    std::string node;
    std::string option0_head;
    std::string option1_head;
  };
  struct EdgeSpec {
    std::string from;
    std::string to;
    LatencyFn latency;
  };

  // Validates and builds a network. Every node with more than one outgoing
  // edge must be listed as a decision node with exactly two; the sink has no
  // outgoing edges; every edge must lie on a source-to-sink walk. Throws
  // InvalidInputError otherwise.
  static RoutingNetwork Create(std::vector<std::string> nodes,
                               const std::string& source,
                               const std::string& sink, double demand,
                               const std::vector<EdgeSpec>& edges,
                               const std::vector<DecisionSpec>& decisions);

  std::span<const std::string> node_names() const { return node_names_; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const DecisionNode> decision_nodes() const { return decisions_; }
  int num_nodes() const { return static_cast<int>(node_names_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_decision_nodes() const { return static_cast<int>(decisions_.size()); }
  std::span<const int> out_edges(int node) const { return out_edges_[node]; }
  int source() const { return source_; }
  int sink() const { return sink_; }
  double demand() const { return demand_; }

  std::optional<int> FindNode(const std::string& name) const;
  std::optional<int> FindEdge(const std::string& from,
                              const std::string& to) const;
  // "su" for s->u when all node names are single characters, "s_u" otherwise.
  std::string EdgeLabel(int edge) const;

  // Copy with every latency coefficient multiplied by lambda > 0.
  RoutingNetwork ScaledLatencies(double lambda) const;
  // Copy with the latency of edge from->to replaced.
  RoutingNetwork WithLatency(const std::string& from, const std::string& to,
                             const LatencyFn& latency) const;

 private:
  RoutingNetwork() = default;

  std::vector<std::string> node_names_;
  std::vector<Edge> edges_;
  std::vector<DecisionNode> decisions_;
  // Outgoing edge indices per node.
  std::vector<std::vector<int>> out_edges_;
  int source_ = 0;
  int sink_ = 0;
  double demand_ = 1.0;
};

// Latency overrides for the four-node Braess network. Defaults are the
// canonical instance: L_su = f, L_sv = 1, L_ut = 1, L_vt = f, and zero
// latency on both directions of the central edge.
struct BraessLatencies {
  LatencyFn su = LatencyFn::Linear(1.0);
  LatencyFn sv = LatencyFn::Constant(1.0);
  LatencyFn ut = LatencyFn::Constant(1.0);
  LatencyFn vt = LatencyFn::Linear(1.0);
  LatencyFn uv = LatencyFn::Constant(0.0);
  LatencyFn vu = LatencyFn::Constant(0.0);
};

// Nodes s, u, v, t. Edge order: su, sv, ut, vt, then uv, vu when the central
// edge is present. Decision nodes: s (su | sv) and, with the central edge,
// u (ut | uv) and v (vt | vu).
RoutingNetwork MakeBraess(bool include_central,
                          const BraessLatencies& latencies = {});

// Loop determinants at or below this are treated as divergent circulation.
inline constexpr double kLoopDivergenceThreshold = 1e-12;

// Solves the conservation equations for the given fractions. Throws
// LoopDivergenceError when flow would circulate forever and
// InvalidInputError for fractions outside [0, 1] or of the wrong count.
FlowAssignment SolveFlows(const RoutingNetwork& network,
                          std::span<const double> fractions);

// sum_e f_e L_e(f_e).
double TotalCost(const RoutingNetwork& network, const FlowAssignment& flows);

// sum_e integral_0^{f_e} L_e.
double BeckmannPotential(const RoutingNetwork& network,
                         const FlowAssignment& flows);

// Expected latency-to-sink values under the given fractions and flows.
// Throws LoopDivergenceError like SolveFlows.
OptionLatencies ComputeOptionLatencies(const RoutingNetwork& network,
                                       std::span<const double> fractions,
                                       const FlowAssignment& flows);

struct SearchResult {
  RoutingFractions fractions;
  FlowAssignment flows;
  // Objective value at the minimizer (potential or total cost).
  double objective = 0.0;
  // Total cost of `flows`.
  double cost = 0.0;
};

struct SearchOptions {
  double grid_step = 0.01;
  double refine_tolerance = 1e-6;
};

// Minimizes `objective(flows)` over the fraction cube: full grid, then
// pattern-search refinement. Ties are broken toward smaller total edge flow
// (no idle circulation), then toward fractions closest to 1/2.
SearchResult MinimizeOverFractions(
    const RoutingNetwork& network,
    const std::function<double(const FlowAssignment&)>& objective,
    const SearchOptions& options = {});

// Wardrop equilibrium: minimizer of the Beckmann potential.
SearchResult ClassicalEquilibrium(const RoutingNetwork& network,
                                  const SearchOptions& options = {});

// Social optimum: minimizer of the total cost.
SearchResult OptimalFlow(const RoutingNetwork& network,
                         const SearchOptions& options = {});

// Equilibrium cost over optimal cost. Throws UndefinedRatioError when the
// optimal cost is zero.
double PriceOfAnarchy(const RoutingNetwork& network,
                      const SearchOptions& options = {});

struct BraessSymmetry {
  // L_su == L_sv and L_ut == L_vt.
  bool literal = false;
  // L_su == L_vt and L_sv == L_ut (mirror through the central edge).
  bool diagonal = false;
};

// Throws InvalidInputError if the network lacks the four outer Braess edges.
BraessSymmetry ClassifyBraessSymmetry(const RoutingNetwork& network);

}  // namespace qrouting::network

#endif  // QROUTING_NETWORK_H_
