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

#include "qrouting/network.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "qrouting/errors.h"

namespace qrouting::network {
namespace {

// Solves m x = rhs in place (m is n x n, row-major) by Gaussian elimination
// with partial pivoting; rhs receives x. Returns det(m).
double SolveInPlace(std::vector<double>& m, std::vector<double>& rhs, int n) {
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(m[r * n + col]) > std::abs(m[pivot * n + col])) pivot = r;
    }
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(m[col * n + c], m[pivot * n + c]);
      std::swap(rhs[col], rhs[pivot]);
      det = -det;
    }
    const double diag = m[col * n + col];
    det *= diag;
    if (diag == 0.0) return 0.0;
    for (int r = col + 1; r < n; ++r) {
      const double factor = m[r * n + col] / diag;
      if (factor == 0.0) continue;
      for (int c = col; c < n; ++c) m[r * n + c] -= factor * m[col * n + c];
      rhs[r] -= factor * rhs[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < n; ++c) acc -= m[r * n + c] * rhs[c];
    rhs[r] = acc / m[r * n + r];
  }
  return det;
}

// Share of the tail node's inflow carried by each edge.
void EdgeShares(const RoutingNetwork& network, std::span<const double> fractions,
                std::vector<double>& share) {
  share.assign(network.num_edges(), 1.0);
  const auto decisions = network.decision_nodes();
  if (fractions.size() != decisions.size()) {
    throw InvalidInputError("expected " + std::to_string(decisions.size()) +
                            " routing fractions, got " +
                            std::to_string(fractions.size()));
  }
  for (std::size_t k = 0; k < decisions.size(); ++k) {
    const double p = fractions[k];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidInputError("routing fraction " + std::to_string(p) +
                              " is outside [0, 1]");
    }
    share[decisions[k].options[0]] = p;
    share[decisions[k].options[1]] = 1.0 - p;
  }
}

// Reusable buffers so the grid search does not allocate per point.
struct Workspace {
  std::vector<double> share;
  std::vector<double> matrix;
  std::vector<double> rhs;
};

void SolveFlowsInto(const RoutingNetwork& network,
                    std::span<const double> fractions, Workspace& ws,
                    FlowAssignment& flows) {
  const int n = network.num_nodes();
  EdgeShares(network, fractions, ws.share);
  // (I - A) x = injection, A[to][from] = share of `from` sent to `to`.
  ws.matrix.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) ws.matrix[i * n + i] = 1.0;
  const auto edges = network.edges();
  for (int e = 0; e < network.num_edges(); ++e) {
    ws.matrix[edges[e].to * n + edges[e].from] -= ws.share[e];
  }
  ws.rhs.assign(n, 0.0);
  ws.rhs[network.source()] = network.demand();
  const double det = SolveInPlace(ws.matrix, ws.rhs, n);
  if (!(std::abs(det) > kLoopDivergenceThreshold)) {
    throw LoopDivergenceError("routing fractions circulate all flow (loop "
                              "determinant " + std::to_string(det) + ")");
  }
  flows.node_inflow.assign(ws.rhs.begin(), ws.rhs.end());
  flows.edge_flow.resize(network.num_edges());
  for (int e = 0; e < network.num_edges(); ++e) {
    // Clamp round-off negatives; true flows are nonnegative.
    flows.edge_flow[e] =
        std::max(0.0, ws.share[e] * flows.node_inflow[edges[e].from]);
  }
}

struct Candidate {
  double objective = std::numeric_limits<double>::infinity();
  double total_flow = std::numeric_limits<double>::infinity();
  double distance = std::numeric_limits<double>::infinity();
};

bool Better(const Candidate& a, const Candidate& b) {
  const double tol = 1e-12 * std::max(1.0, std::abs(b.objective));
  if (a.objective < b.objective - tol) return true;
  if (a.objective > b.objective + tol) return false;
  const double flow_tol = 1e-12 * std::max(1.0, b.total_flow);
  if (a.total_flow < b.total_flow - flow_tol) return true;
  if (a.total_flow > b.total_flow + flow_tol) return false;
  return a.distance < b.distance - 1e-15;
}

double DistanceToUniform(std::span<const double> fractions) {
  double d = 0.0;
  for (double p : fractions) d += (p - 0.5) * (p - 0.5);
  return d;
}

}  // namespace

void LatencyFn::Validate() const {
  for (double coef : {a, b, c}) {
    if (!std::isfinite(coef) || coef < 0.0) {
      throw InvalidInputError(
          "latency coefficients must be finite and nonnegative");
    }
  }
}

RoutingNetwork RoutingNetwork::Create(
    std::vector<std::string> nodes, const std::string& source,
    const std::string& sink, double demand, const std::vector<EdgeSpec>& edges,
    const std::vector<DecisionSpec>& decisions) {
  RoutingNetwork net;
  net.node_names_ = std::move(nodes);
  const int n = net.num_nodes();
  for (int i = 0; i < n; ++i) {
    if (net.node_names_[i].empty()) {
      throw InvalidInputError("node names must be non-empty");
    }
    for (int j = 0; j < i; ++j) {
      if (net.node_names_[i] == net.node_names_[j]) {
        throw InvalidInputError("duplicate node '" + net.node_names_[i] + "'");
      }
    }
  }
  auto lookup = [&net](const std::string& name) {
    auto idx = net.FindNode(name);
    if (!idx) throw InvalidInputError("unknown node '" + name + "'");
    return *idx;
  };
  net.source_ = lookup(source);
  net.sink_ = lookup(sink);
  if (net.source_ == net.sink_) {
    throw InvalidInputError("source and sink must differ");
  }
  if (!std::isfinite(demand) || demand <= 0.0) {
    throw InvalidInputError("demand must be positive");
  }
  net.demand_ = demand;

  net.out_edges_.assign(n, {});
  for (const EdgeSpec& spec : edges) {
    Edge e{lookup(spec.from), lookup(spec.to), spec.latency};
    if (e.from == e.to) {
      throw InvalidInputError("self-loop at '" + spec.from + "'");
    }
    if (net.FindEdge(spec.from, spec.to)) {
      throw InvalidInputError("duplicate edge " + spec.from + " -> " +
                              spec.to);
    }
    e.latency.Validate();
    net.out_edges_[e.from].push_back(net.num_edges());
    net.edges_.push_back(e);
  }

  std::vector<bool> is_decision(n, false);
  for (const DecisionSpec& spec : decisions) {
    const int node = lookup(spec.node);
    if (is_decision[node]) {
      throw InvalidInputError("node '" + spec.node +
                              "' declared as a decision node twice");
    }
    is_decision[node] = true;
    const auto e0 = net.FindEdge(spec.node, spec.option0_head);
    const auto e1 = net.FindEdge(spec.node, spec.option1_head);
    if (!e0 || !e1 || *e0 == *e1) {
      throw InvalidInputError("decision node '" + spec.node +
                              "' must name two distinct outgoing edges");
    }
    net.decisions_.push_back({node, {*e0, *e1}});
  }

  for (int i = 0; i < n; ++i) {
    const std::size_t out = net.out_edges_[i].size();
    const std::string& name = net.node_names_[i];
    if (i == net.sink_) {
      if (out != 0) {
        throw InvalidInputError("sink '" + name + "' has outgoing edges");
      }
    } else if (is_decision[i]) {
      if (out != 2) {
        throw InvalidInputError("decision node '" + name +
                                "' must have exactly 2 outgoing edges");
      }
    } else if (out != 1) {
      throw InvalidInputError(
          "node '" + name + "' has " + std::to_string(out) +
          " outgoing edges; only decision nodes may branch and every "
          "non-sink node needs an exit");
    }
  }

  // Every edge must sit on a source -> sink walk: tail reachable from the
  // source and sink reachable from the head.
  std::vector<bool> from_source(n, false), to_sink(n, false);
  std::vector<int> stack{net.source_};
  from_source[net.source_] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int e : net.out_edges_[v]) {
      const int w = net.edges_[e].to;
      if (!from_source[w]) {
        from_source[w] = true;
        stack.push_back(w);
      }
    }
  }
  to_sink[net.sink_] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const Edge& e : net.edges_) {
      if (to_sink[e.to] && !to_sink[e.from]) {
        to_sink[e.from] = true;
        changed = true;
      }
    }
  }
  for (int e = 0; e < net.num_edges(); ++e) {
    const Edge& edge = net.edges_[e];
    if (!from_source[edge.from] || !to_sink[edge.to]) {
      throw InvalidInputError("edge " + net.node_names_[edge.from] + " -> " +
                              net.node_names_[edge.to] +
                              " is not on any source-to-sink walk");
    }
  }
  return net;
}

std::optional<int> RoutingNetwork::FindNode(const std::string& name) const {
  for (int i = 0; i < num_nodes(); ++i) {
    if (node_names_[i] == name) return i;
  }
  return std::nullopt;
}

std::optional<int> RoutingNetwork::FindEdge(const std::string& from,
                                            const std::string& to) const {
  const auto f = FindNode(from);
  const auto t = FindNode(to);
  if (!f || !t) return std::nullopt;
  for (int e = 0; e < num_edges(); ++e) {
    if (edges_[e].from == *f && edges_[e].to == *t) return e;
  }
  return std::nullopt;
}

std::string RoutingNetwork::EdgeLabel(int edge) const {
  const bool short_names =
      std::all_of(node_names_.begin(), node_names_.end(),
                  [](const std::string& s) { return s.size() == 1; });
  const std::string& from = node_names_[edges_[edge].from];
  const std::string& to = node_names_[edges_[edge].to];
  return short_names ? from + to : from + "_" + to;
}

RoutingNetwork RoutingNetwork::ScaledLatencies(double lambda) const {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw InvalidInputError("latency scale must be positive");
  }
  RoutingNetwork copy = *this;
  for (Edge& e : copy.edges_) e.latency = e.latency.Scaled(lambda);
  return copy;
}

RoutingNetwork RoutingNetwork::WithLatency(const std::string& from,
                                           const std::string& to,
                                           const LatencyFn& latency) const {
  const auto e = FindEdge(from, to);
  if (!e) throw InvalidInputError("no edge " + from + " -> " + to);
  latency.Validate();
  RoutingNetwork copy = *this;
  copy.edges_[*e].latency = latency;
  return copy;
}

RoutingNetwork MakeBraess(bool include_central,
                          const BraessLatencies& latencies) {
  std::vector<RoutingNetwork::EdgeSpec> edges = {
      {"s", "u", latencies.su},
      {"s", "v", latencies.sv},
      {"u", "t", latencies.ut},
      {"v", "t", latencies.vt},
  };
  std::vector<RoutingNetwork::DecisionSpec> decisions = {{"s", "u", "v"}};
  if (include_central) {
    edges.push_back({"u", "v", latencies.uv});
    edges.push_back({"v", "u", latencies.vu});
    decisions.push_back({"u", "t", "v"});
    decisions.push_back({"v", "t", "u"});
  }
  return RoutingNetwork::Create({"s", "u", "v", "t"}, "s", "t", 1.0, edges,
                                decisions);
}

FlowAssignment SolveFlows(const RoutingNetwork& network,
                          std::span<const double> fractions) {
  Workspace ws;
  FlowAssignment flows;
  SolveFlowsInto(network, fractions, ws, flows);
  return flows;
}

double TotalCost(const RoutingNetwork& network, const FlowAssignment& flows) {
  double total = 0.0;
  const auto edges = network.edges();
  for (int e = 0; e < network.num_edges(); ++e) {
    const double f = flows.edge_flow[e];
    total += f * edges[e].latency(f);
  }
  return total;
}

double BeckmannPotential(const RoutingNetwork& network,
                         const FlowAssignment& flows) {
  double total = 0.0;
  const auto edges = network.edges();
  for (int e = 0; e < network.num_edges(); ++e) {
    total += edges[e].latency.Integral(flows.edge_flow[e]);
  }
  return total;
}

OptionLatencies ComputeOptionLatencies(const RoutingNetwork& network,
                                       std::span<const double> fractions,
                                       const FlowAssignment& flows) {
  const int n = network.num_nodes();
  std::vector<double> share;
  EdgeShares(network, fractions, share);
  const auto edges = network.edges();
  // value(n) - sum_e share_e value(head e) = sum_e share_e L_e(f_e), i.e. the
  // transpose of the conservation system.
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> rhs(n, 0.0);
  std::vector<double> edge_latency(network.num_edges());
  for (int i = 0; i < n; ++i) m[i * n + i] = 1.0;
  for (int e = 0; e < network.num_edges(); ++e) {
    edge_latency[e] = edges[e].latency(flows.edge_flow[e]);
    m[edges[e].from * n + edges[e].to] -= share[e];
    rhs[edges[e].from] += share[e] * edge_latency[e];
  }
  const double det = SolveInPlace(m, rhs, n);
  if (!(std::abs(det) > kLoopDivergenceThreshold)) {
    throw LoopDivergenceError("routing fractions circulate all flow");
  }
  OptionLatencies out;
  out.node_value = std::move(rhs);
  for (const DecisionNode& d : network.decision_nodes()) {
    std::array<double, 2> lam{};
    for (int k = 0; k < 2; ++k) {
      const int e = d.options[k];
      lam[k] = edge_latency[e] + out.node_value[edges[e].to];
    }
    out.option.push_back(lam);
  }
  return out;
}

SearchResult MinimizeOverFractions(
    const RoutingNetwork& network,
    const std::function<double(const FlowAssignment&)>& objective,
    const SearchOptions& options) {
  const int dims = network.num_decision_nodes();
  Workspace ws;
  FlowAssignment flows;

  auto score = [&](std::span<const double> p) -> std::optional<Candidate> {
    try {
      SolveFlowsInto(network, p, ws, flows);
    } catch (const LoopDivergenceError&) {
      return std::nullopt;
    }
    Candidate c;
    c.objective = objective(flows);
    c.total_flow = 0.0;
    for (double f : flows.edge_flow) c.total_flow += f;
    c.distance = DistanceToUniform(p);
    return c;
  };

  RoutingFractions best_p(dims, 0.5);
  Candidate best;
  if (dims == 0) {
    best = score(best_p).value();
  } else {
    const int steps =
        std::max(1, static_cast<int>(std::lround(1.0 / options.grid_step)));
    std::vector<int> idx(dims, 0);
    RoutingFractions p(dims, 0.0);
    while (true) {
      for (int k = 0; k < dims; ++k) {
        p[k] = static_cast<double>(idx[k]) / steps;
      }
      if (auto c = score(p); c && Better(*c, best)) {
        best = *c;
        best_p = p;
      }
      int k = 0;
      while (k < dims && ++idx[k] > steps) idx[k++] = 0;
      if (k == dims) break;
    }

    // Pattern search: try +-h along each coordinate, halve h on failure.
    double h = 1.0 / steps;
    RoutingFractions trial = best_p;
    while (h >= options.refine_tolerance) {
      bool improved = false;
      for (int k = 0; k < dims; ++k) {
        for (double dir : {-1.0, 1.0}) {
          trial = best_p;
          trial[k] = std::clamp(best_p[k] + dir * h, 0.0, 1.0);
          if (trial[k] == best_p[k]) continue;
          if (auto c = score(trial); c && Better(*c, best)) {
            best = *c;
            best_p = trial;
            improved = true;
          }
        }
      }
      if (!improved) h /= 2.0;
    }
  }

  SearchResult result;
  result.fractions = best_p;
  result.flows = SolveFlows(network, best_p);
  result.objective = objective(result.flows);
  result.cost = TotalCost(network, result.flows);
  return result;
}

SearchResult ClassicalEquilibrium(const RoutingNetwork& network,
                                  const SearchOptions& options) {
  return MinimizeOverFractions(
      network,
      [&network](const FlowAssignment& f) {
        return BeckmannPotential(network, f);
      },
      options);
}

SearchResult OptimalFlow(const RoutingNetwork& network,
                         const SearchOptions& options) {
  return MinimizeOverFractions(
      network,
      [&network](const FlowAssignment& f) { return TotalCost(network, f); },
      options);
}

double PriceOfAnarchy(const RoutingNetwork& network,
                      const SearchOptions& options) {
  const double optimal = OptimalFlow(network, options).cost;
  if (!(optimal > 1e-15)) {
    throw UndefinedRatioError("optimal cost is zero; price of anarchy is "
                              "undefined");
  }
  return ClassicalEquilibrium(network, options).cost / optimal;
}

BraessSymmetry ClassifyBraessSymmetry(const RoutingNetwork& network) {
  const auto su = network.FindEdge("s", "u");
  const auto sv = network.FindEdge("s", "v");
  const auto ut = network.FindEdge("u", "t");
  const auto vt = network.FindEdge("v", "t");
  if (!su || !sv || !ut || !vt) {
    throw InvalidInputError("network lacks the outer Braess edges su, sv, "
                            "ut, vt");
  }
  const auto edges = network.edges();
  const auto lat = [&](int e) { return edges[e].latency; };
  BraessSymmetry sym;
  sym.literal = lat(*su) == lat(*sv) && lat(*ut) == lat(*vt);
  sym.diagonal = lat(*su) == lat(*vt) && lat(*sv) == lat(*ut);
  return sym;
}

}  // namespace qrouting::network
