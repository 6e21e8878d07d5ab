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

#include "qrouting/io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qrouting/errors.h"

namespace qrouting::io {

using dynamics::GameConfig;
using network::RoutingNetwork;
using json = nlohmann::ordered_json;

namespace {

struct Line {
  int number = 0;
  std::string key;
  std::vector<std::string> values;
};

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> SplitWords(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// `key = value...` lines; blank lines and comments skipped.
std::vector<Line> Tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++number;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    const std::string content = Trim(raw);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ParseError(number, "expected 'key = value', got '" + content + "'");
    }
    Line line;
    line.number = number;
    line.key = Trim(std::string_view(content).substr(0, eq));
    line.values = SplitWords(content.substr(eq + 1));
    if (line.key.empty()) throw ParseError(number, "missing key");
    if (line.values.empty()) {
      throw ParseError(number, "missing value for '" + line.key + "'");
    }
    lines.push_back(std::move(line));
    if (end == text.size()) break;
  }
  return lines;
}

std::optional<double> ToDouble(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (!s.empty() && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) return std::nullopt;
  return v;
}

template <typename Int>
std::optional<Int> ToInt(const std::string& s) {
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

const std::string& Single(const Line& line) {
  if (line.values.size() != 1) {
    throw ParseError(line.number, "'" + line.key + "' takes one value");
  }
  return line.values[0];
}

double NumberOf(const Line& line) {
  auto v = ToDouble(Single(line));
  if (!v) {
    throw ParseError(line.number, "'" + line.key + "' expects a number, got '" +
                                      line.values[0] + "'");
  }
  return *v;
}

std::string FullPrecision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Rounds to 12 significant digits so JSON numbers print at that precision.
double Round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(FormatDouble(v));
}

json Num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return Round12(v);
}

json NumArray(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(Num(x));
  return a;
}

std::vector<std::string> EdgeLabels(const RoutingNetwork& network) {
  std::vector<std::string> out;
  for (int e = 0; e < network.num_edges(); ++e) {
    out.push_back(network.EdgeLabel(e));
  }
  return out;
}

std::vector<std::string> PlayerNames(const RoutingNetwork& network) {
  std::vector<std::string> out;
  for (const auto& d : network.decision_nodes()) {
    out.push_back(network.node_names()[d.node]);
  }
  return out;
}

const char* kParamNames[] = {"theta", "phi", "alpha"};

json StrategiesJson(const dynamics::Strategies& s,
                    const std::vector<std::string>& players) {
  json j = json::object();
  for (size_t k = 0; k < s.size(); ++k) {
    j[players[k]] = {{"theta", Num(s[k].theta)},
                     {"phi", Num(s[k].phi)},
                     {"alpha", Num(s[k].alpha)}};
  }
  return j;
}

json FlowsJson(const std::vector<double>& flows,
               const std::vector<std::string>& labels) {
  if (flows.empty()) return nullptr;
  json j = json::object();
  for (size_t e = 0; e < flows.size(); ++e) j[labels[e]] = Num(flows[e]);
  return j;
}

void AppendRow(std::string& out, const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
}

}  // namespace

double ParseAngle(std::string_view text) {
  const std::string s = Trim(text);
  if (auto v = ToDouble(s)) {
    if (!std::isfinite(*v)) throw InvalidInputError("angle must be finite");
    return *v;
  }
  // [k*]pi[/n]
  const auto pi_at = s.find("pi");
  if (pi_at == std::string::npos) {
    throw InvalidInputError("cannot parse angle '" + s + "'");
  }
  double k = 1.0, n = 1.0;
  const std::string head = s.substr(0, pi_at);
  const std::string tail = s.substr(pi_at + 2);
  if (!head.empty()) {
    if (head.back() != '*') {
      throw InvalidInputError("cannot parse angle '" + s + "'");
    }
    auto v = ToDouble(head.substr(0, head.size() - 1));
    if (!v) throw InvalidInputError("cannot parse angle '" + s + "'");
    k = *v;
  }
  if (!tail.empty()) {
    auto v = tail[0] == '/' ? ToDouble(tail.substr(1)) : std::nullopt;
    if (!v || *v == 0.0) {
      throw InvalidInputError("cannot parse angle '" + s + "'");
    }
    n = *v;
  }
  const double angle = k * std::numbers::pi / n;
  if (!std::isfinite(angle)) throw InvalidInputError("angle must be finite");
  return angle;
}

GameConfig ParseConfig(std::string_view text) {
  return ParseConfig(text, GameConfig{});
}

GameConfig ParseConfig(std::string_view text, const GameConfig& base) {
  GameConfig c = base;
  std::map<std::string, int> seen;
  auto range = [](const Line& l, bool ok, const std::string& what) {
    if (!ok) throw ParseError(l.number, l.key + " " + what);
  };
  for (const Line& l : Tokenize(text)) {
    if (!seen.emplace(l.key, l.number).second) {
      throw ParseError(l.number, "duplicate key '" + l.key + "'");
    }
    if (l.key == "gamma") {
      try {
        c.gamma = ParseAngle(Single(l));
      } catch (const InvalidInputError& e) {
        throw ParseError(l.number, e.what());
      }
      range(l, c.gamma >= 0.0 && c.gamma <= std::numbers::pi / 2.0,
            "must lie in [0, pi/2]");
    } else if (l.key == "gain") {
      c.gain = NumberOf(l);
      range(l, std::isfinite(c.gain) && c.gain >= 0.0, "must be >= 0");
    } else if (l.key == "fd_step") {
      c.fd_step = NumberOf(l);
      range(l, std::isfinite(c.fd_step) && c.fd_step > 0.0, "must be > 0");
    } else if (l.key == "iterations") {
      auto v = ToInt<int>(Single(l));
      if (!v) throw ParseError(l.number, "iterations expects an integer");
      c.iterations = *v;
      range(l, c.iterations > 0, "must be > 0");
    } else if (l.key == "seed") {
      auto v = ToInt<std::uint64_t>(Single(l));
      if (!v) throw ParseError(l.number, "seed expects an unsigned integer");
      c.seed = *v;
    } else if (l.key == "mode") {
      try {
        c.mode = dynamics::ParseObjectiveMode(Single(l));
      } catch (const InvalidInputError& e) {
        throw ParseError(l.number, e.what());
      }
    } else if (l.key == "sign") {
      try {
        c.sign = dynamics::ParseStepSign(Single(l));
      } catch (const InvalidInputError& e) {
        throw ParseError(l.number, e.what());
      }
    } else if (l.key == "penalty_cost") {
      c.penalty_cost = NumberOf(l);
      range(l, std::isfinite(c.penalty_cost) && c.penalty_cost > 0.0,
            "must be > 0");
    } else if (l.key == "convergence_window") {
      auto v = ToInt<int>(Single(l));
      if (!v) throw ParseError(l.number, "convergence_window expects an integer");
      c.convergence_window = *v;
      range(l, c.convergence_window > 0, "must be > 0");
    } else if (l.key == "convergence_tol") {
      c.convergence_tol = NumberOf(l);
      range(l, std::isfinite(c.convergence_tol) && c.convergence_tol > 0.0,
            "must be > 0");
    } else {
      throw ParseError(l.number, "unknown key '" + l.key + "'");
    }
  }
  return c;
}

RoutingNetwork ParseNetwork(std::string_view text) {
  std::vector<std::string> nodes;
  std::optional<std::string> source, sink;
  double demand = 1.0;
  std::vector<RoutingNetwork::EdgeSpec> edges;
  std::vector<RoutingNetwork::DecisionSpec> decisions;
  for (const Line& l : Tokenize(text)) {
    if (l.key == "nodes") {
      if (!nodes.empty()) throw ParseError(l.number, "duplicate 'nodes'");
      nodes = l.values;
    } else if (l.key == "source") {
      if (source) throw ParseError(l.number, "duplicate 'source'");
      source = Single(l);
    } else if (l.key == "sink") {
      if (sink) throw ParseError(l.number, "duplicate 'sink'");
      sink = Single(l);
    } else if (l.key == "demand") {
      demand = NumberOf(l);
      if (!(std::isfinite(demand) && demand > 0.0)) {
        throw ParseError(l.number, "demand must be > 0");
      }
    } else if (l.key == "edge") {
      if (l.values.size() != 5) {
        throw ParseError(l.number, "edge expects 'from to a b c'");
      }
      double coef[3];
      for (int i = 0; i < 3; ++i) {
        auto v = ToDouble(l.values[2 + i]);
        if (!v) {
          throw ParseError(l.number, "edge coefficient '" + l.values[2 + i] +
                                         "' is not a number");
        }
        coef[i] = *v;
      }
      network::LatencyFn fn{coef[0], coef[1], coef[2]};
      try {
        fn.Validate();
      } catch (const InvalidInputError& e) {
        throw ParseError(l.number, std::string("edge latency: ") + e.what());
      }
      edges.push_back({l.values[0], l.values[1], fn});
    } else if (l.key == "decision") {
      if (l.values.size() != 3) {
        throw ParseError(l.number, "decision expects 'node head0 head1'");
      }
      decisions.push_back({l.values[0], l.values[1], l.values[2]});
    } else {
      throw ParseError(l.number, "unknown key '" + l.key + "'");
    }
  }
  if (nodes.empty()) throw ParseError(0, "missing 'nodes'");
  if (!source) throw ParseError(0, "missing 'source'");
  if (!sink) throw ParseError(0, "missing 'sink'");
  try {
    return RoutingNetwork::Create(nodes, *source, *sink, demand, edges,
                                  decisions);
  } catch (const InvalidInputError& e) {
    throw ParseError(0, std::string("invalid network: ") + e.what());
  }
}

std::string WriteConfig(const GameConfig& c) {
  std::string out;
  out += "gamma = " + FullPrecision(c.gamma) + "\n";
  out += "gain = " + FullPrecision(c.gain) + "\n";
  out += "fd_step = " + FullPrecision(c.fd_step) + "\n";
  out += "iterations = " + std::to_string(c.iterations) + "\n";
  out += "seed = " + std::to_string(c.seed) + "\n";
  out += "mode = " + dynamics::ToString(c.mode) + "\n";
  out += "sign = " + dynamics::ToString(c.sign) + "\n";
  out += "penalty_cost = " + FullPrecision(c.penalty_cost) + "\n";
  out += "convergence_window = " + std::to_string(c.convergence_window) + "\n";
  out += "convergence_tol = " + FullPrecision(c.convergence_tol) + "\n";
  return out;
}

std::string WriteNetwork(const RoutingNetwork& network) {
  const auto names = network.node_names();
  std::string out = "nodes =";
  for (const auto& n : names) out += " " + n;
  out += "\nsource = " + names[network.source()];
  out += "\nsink = " + names[network.sink()];
  out += "\ndemand = " + FullPrecision(network.demand()) + "\n";
  for (const auto& e : network.edges()) {
    out += "edge = " + names[e.from] + " " + names[e.to] + " " +
           FullPrecision(e.latency.a) + " " + FullPrecision(e.latency.b) + " " +
           FullPrecision(e.latency.c) + "\n";
  }
  const auto edges = network.edges();
  for (const auto& d : network.decision_nodes()) {
    out += "decision = " + names[d.node] + " " +
           names[edges[d.options[0]].to] + " " +
           names[edges[d.options[1]].to] + "\n";
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("error writing '" + path + "'");
}

std::string FormatDouble(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string TraceCsv(const dynamics::RunTrace& trace,
                     const RoutingNetwork& network) {
  const auto players = PlayerNames(network);
  const auto labels = EdgeLabels(network);
  std::vector<std::string> header = {"iteration"};
  for (const auto& p : players) {
    for (const char* name : kParamNames) header.push_back(std::string(name) + "_" + p);
  }
  for (const auto& l : labels) header.push_back("f_" + l);
  header.push_back("total_cost");
  std::string out;
  AppendRow(out, header);
  for (size_t n = 0; n < trace.iterations.size(); ++n) {
    const auto& rec = trace.iterations[n];
    std::vector<std::string> row = {std::to_string(n)};
    for (const auto& s : rec.strategies) {
      for (int j = 0; j < dynamics::kParamsPerPlayer; ++j) {
        row.push_back(FormatDouble(dynamics::Param(s, j)));
      }
    }
    for (size_t e = 0; e < labels.size(); ++e) {
      row.push_back(rec.edge_flow.empty() ? "" : FormatDouble(rec.edge_flow[e]));
    }
    row.push_back(FormatDouble(rec.total_cost));
    AppendRow(out, row);
  }
  return out;
}

json TraceJson(const dynamics::RunTrace& trace, const RoutingNetwork& network) {
  const auto players = PlayerNames(network);
  const auto labels = EdgeLabels(network);
  json iters = json::array();
  for (size_t n = 0; n < trace.iterations.size(); ++n) {
    const auto& rec = trace.iterations[n];
    iters.push_back({{"iteration", n},
                     {"strategies", StrategiesJson(rec.strategies, players)},
                     {"marginals", NumArray(rec.marginals)},
                     {"flows", FlowsJson(rec.edge_flow, labels)},
                     {"local_costs", NumArray(rec.local_costs)},
                     {"total_cost", Num(rec.total_cost)}});
  }
  std::vector<double> final_flows;
  if (trace.final_evaluation.flows) {
    final_flows = trace.final_evaluation.flows->edge_flow;
  }
  return {{"converged", trace.verdict.converged},
          {"convergence_iteration", trace.verdict.iteration},
          {"equilibrium_cost", Num(trace.equilibrium_cost)},
          {"final_strategies", StrategiesJson(trace.final_strategies, players)},
          {"final_flows", FlowsJson(final_flows, labels)},
          {"iterations", std::move(iters)}};
}

std::string SweepCsv(const experiments::SweepResult& sweep) {
  std::string out;
  AppendRow(out, {"gamma", "median_cost", "spread", "kappa_q",
                  "convergence_rate"});
  for (const auto& r : sweep.rows) {
    AppendRow(out, {FormatDouble(r.gamma), FormatDouble(r.median_cost),
                    FormatDouble(r.spread), FormatDouble(r.kappa_q),
                    FormatDouble(r.convergence_rate)});
  }
  return out;
}

json SweepJson(const experiments::SweepResult& sweep) {
  json rows = json::array();
  for (const auto& r : sweep.rows) {
    rows.push_back({{"gamma", Num(r.gamma)},
                    {"median_cost", Num(r.median_cost)},
                    {"spread", Num(r.spread)},
                    {"kappa_q", Num(r.kappa_q)},
                    {"convergence_rate", Num(r.convergence_rate)}});
  }
  return {{"optimal_cost", Num(sweep.optimal_cost)}, {"rows", std::move(rows)}};
}

std::string EnsembleCsv(const experiments::EnsembleResult& ensemble,
                        const RoutingNetwork& network) {
  const auto players = PlayerNames(network);
  const auto labels = EdgeLabels(network);
  std::vector<std::string> header = {"seed", "equilibrium_cost", "converged",
                                     "convergence_iteration"};
  for (const auto& p : players) {
    for (const char* name : kParamNames) header.push_back(std::string(name) + "_" + p);
  }
  for (const auto& l : labels) header.push_back("f_" + l);
  std::string out;
  AppendRow(out, header);
  for (const auto& m : ensemble.members) {
    std::vector<std::string> row = {std::to_string(m.seed),
                                    FormatDouble(m.equilibrium_cost),
                                    m.converged ? "1" : "0",
                                    std::to_string(m.convergence_iteration)};
    for (const auto& s : m.final_strategies) {
      for (int j = 0; j < dynamics::kParamsPerPlayer; ++j) {
        row.push_back(FormatDouble(dynamics::Param(s, j)));
      }
    }
    for (size_t e = 0; e < labels.size(); ++e) {
      row.push_back(m.final_flows.empty() ? "" : FormatDouble(m.final_flows[e]));
    }
    AppendRow(out, row);
  }
  return out;
}

json EnsembleJson(const experiments::EnsembleResult& ensemble,
                  const RoutingNetwork& network) {
  const auto players = PlayerNames(network);
  const auto labels = EdgeLabels(network);
  json members = json::array();
  for (const auto& m : ensemble.members) {
    members.push_back(
        {{"seed", m.seed},
         {"equilibrium_cost", Num(m.equilibrium_cost)},
         {"converged", m.converged},
         {"convergence_iteration", m.convergence_iteration},
         {"final_strategies", StrategiesJson(m.final_strategies, players)},
         {"final_marginals", NumArray(m.final_marginals)},
         {"final_flows", FlowsJson(m.final_flows, labels)}});
  }
  json summary = {{"median_cost", Num(ensemble.MedianCost())},
                  {"spread", Num(ensemble.CostSpread())},
                  {"convergence_rate", Num(ensemble.ConvergenceRate())}};
  if (!ensemble.members.empty()) {
    summary["parameter_stddev"] = NumArray(ensemble.ParameterStdDev());
  }
  return {{"gamma", Num(ensemble.gamma)},
          {"summary", std::move(summary)},
          {"members", std::move(members)}};
}

std::string VariantCsv(const experiments::VariantReport& report) {
  std::string out;
  AppendRow(out, {"variant", "literal_symmetric", "diagonal_symmetric",
                  "classical_cost", "optimal_cost", "quantum_cost", "kappa_c",
                  "kappa_q"});
  for (const auto& r : report.rows) {
    AppendRow(out, {r.name, r.symmetry.literal ? "1" : "0",
                    r.symmetry.diagonal ? "1" : "0",
                    FormatDouble(r.classical_cost), FormatDouble(r.optimal_cost),
                    FormatDouble(r.quantum_cost), FormatDouble(r.kappa_c),
                    FormatDouble(r.kappa_q)});
  }
  return out;
}

json VariantJson(const experiments::VariantReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"variant", r.name},
                    {"literal_symmetric", r.symmetry.literal},
                    {"diagonal_symmetric", r.symmetry.diagonal},
                    {"classical_cost", Num(r.classical_cost)},
                    {"optimal_cost", Num(r.optimal_cost)},
                    {"quantum_cost", Num(r.quantum_cost)},
                    {"kappa_c", Num(r.kappa_c)},
                    {"kappa_q", Num(r.kappa_q)},
                    {"classical_flows", FlowsJson(r.classical_flows, r.edge_labels)},
                    {"optimal_flows", FlowsJson(r.optimal_flows, r.edge_labels)},
                    {"quantum_flows", FlowsJson(r.quantum_flows, r.edge_labels)}});
  }
  return {{"gamma", Num(report.gamma)}, {"rows", std::move(rows)}};
}

std::string CalibrationCsv(const std::vector<experiments::CalibrationRow>& rows) {
  std::string out;
  AppendRow(out, {"mode", "sign", "cost_gamma_0", "cost_gamma_pi_4",
                  "cost_gamma_pi_2", "meets_anchors"});
  for (const auto& r : rows) {
    AppendRow(out, {dynamics::ToString(r.mode), dynamics::ToString(r.sign),
                    FormatDouble(r.anchor_costs.at(0)),
                    FormatDouble(r.anchor_costs.at(1)),
                    FormatDouble(r.anchor_costs.at(2)),
                    r.meets_anchors ? "1" : "0"});
  }
  return out;
}

json CalibrationJson(const std::vector<experiments::CalibrationRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"mode", dynamics::ToString(r.mode)},
                   {"sign", dynamics::ToString(r.sign)},
                   {"anchor_costs", NumArray(r.anchor_costs)},
                   {"meets_anchors", r.meets_anchors}});
  }
  return out;
}

json ClassicalJson(const RoutingNetwork& network,
                   const network::SearchResult& equilibrium,
                   const network::SearchResult& optimum) {
  const auto labels = EdgeLabels(network);
  json j = {{"equilibrium_cost", Num(equilibrium.cost)},
            {"optimal_cost", Num(optimum.cost)},
            {"equilibrium_fractions", NumArray(equilibrium.fractions)},
            {"optimal_fractions", NumArray(optimum.fractions)},
            {"equilibrium_flows", FlowsJson(equilibrium.flows.edge_flow, labels)},
            {"optimal_flows", FlowsJson(optimum.flows.edge_flow, labels)}};
  j["price_of_anarchy"] =
      optimum.cost > 1e-15 ? Num(equilibrium.cost / optimum.cost) : json(nullptr);
  return j;
}

std::string ClassicalCsv(const RoutingNetwork& network,
                         const network::SearchResult& equilibrium,
                         const network::SearchResult& optimum) {
  std::vector<std::string> header = {"solution", "total_cost"};
  for (int e = 0; e < network.num_edges(); ++e) {
    header.push_back("f_" + network.EdgeLabel(e));
  }
  std::string out;
  AppendRow(out, header);
  for (const auto* r : {&equilibrium, &optimum}) {
    std::vector<std::string> row = {r == &equilibrium ? "equilibrium" : "optimal",
                                    FormatDouble(r->cost)};
    for (double f : r->flows.edge_flow) row.push_back(FormatDouble(f));
    AppendRow(out, row);
  }
  return out;
}

std::string DumpJson(const json& j) { return j.dump(2) + "\n"; }

}  // namespace qrouting::io
