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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "qrouting/errors.h"
#include "qrouting/io.h"

namespace qrouting::experiments {
namespace {

using dynamics::GameConfig;
using network::MakeBraess;
constexpr double kPi = std::numbers::pi;

GameConfig Short(double gamma = kPi / 4) {
  GameConfig c = CalibratedConfig();
  c.gamma = gamma;
  c.iterations = 60;
  c.convergence_window = 20;
  return c;
}

// Restores QROUTING_THREADS on scope exit.
class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* value) {
    if (const char* old = std::getenv("QROUTING_THREADS")) old_ = old;
    setenv("QROUTING_THREADS", value, 1);
  }
  ~ThreadsEnv() {
    if (old_.empty()) {
      unsetenv("QROUTING_THREADS");
    } else {
      setenv("QROUTING_THREADS", old_.c_str(), 1);
    }
  }

 private:
  std::string old_;
};

TEST(CalibratedConfigTest, Settings) {
  const auto c = CalibratedConfig();
  EXPECT_EQ(c.mode, dynamics::ObjectiveMode::kPathDiff);
  EXPECT_EQ(c.sign, dynamics::StepSign::kPaper);
  EXPECT_EQ(c.gain, 10.0);
  EXPECT_EQ(c.fd_step, 0.01);
  EXPECT_EQ(c.iterations, 400);
}

TEST(ThreadCountTest, HonorsEnvironment) {
  {
    ThreadsEnv env("3");
    EXPECT_EQ(ThreadCount(), 3);
  }
  {
    ThreadsEnv env("zero");
    EXPECT_GE(ThreadCount(), 1);
  }
}

TEST(EnsembleTest, SingleSeedMatchesRun) {
  const auto c = Short();
  const auto net = MakeBraess(true);
  const auto e = RunEnsemble(c, net, 1);
  const auto trace = dynamics::RunRepeatedGame(c, net);
  ASSERT_EQ(e.members.size(), 1u);
  EXPECT_EQ(e.members[0].seed, c.seed);
  EXPECT_EQ(e.members[0].equilibrium_cost, trace.equilibrium_cost);
  EXPECT_EQ(e.members[0].final_strategies, trace.final_strategies);
  EXPECT_EQ(e.members[0].converged, trace.verdict.converged);
  EXPECT_EQ(e.CostSpread(), 0.0);
  EXPECT_EQ(e.MedianCost(), trace.equilibrium_cost);
}

TEST(EnsembleTest, SeedsAreConsecutive) {
  auto c = Short();
  c.seed = 100;
  const auto e = RunEnsemble(c, MakeBraess(true), 5);
  ASSERT_EQ(e.members.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(e.members[i].seed, 100u + i);
  EXPECT_THROW(RunEnsemble(c, MakeBraess(true), 0), InvalidInputError);
}

TEST(EnsembleTest, ThreadCountDoesNotChangeResults) {
  const auto c = Short();
  const auto net = MakeBraess(true);
  EnsembleResult serial, parallel;
  {
    ThreadsEnv env("1");
    serial = RunEnsemble(c, net, 7);
  }
  {
    ThreadsEnv env("4");
    parallel = RunEnsemble(c, net, 7);
  }
  EXPECT_EQ(io::EnsembleCsv(serial, net), io::EnsembleCsv(parallel, net));
}

TEST(EnsembleTest, Statistics) {
  EnsembleResult e;
  for (double cost : {3.0, 1.0, 2.0, 5.0}) {
    EnsembleMember m;
    m.seed = static_cast<std::uint64_t>(cost);
    m.equilibrium_cost = cost;
    m.converged = cost < 4;
    m.final_strategies = {{cost, 0.0, 1.0}};
    e.members.push_back(m);
  }
  EXPECT_DOUBLE_EQ(e.MedianCost(), 2.5);
  EXPECT_DOUBLE_EQ(e.CostSpread(), 4.0);
  EXPECT_DOUBLE_EQ(e.ConvergenceRate(), 0.75);
  EXPECT_EQ(e.MedianMember().equilibrium_cost, 2.0);
  const auto sd = e.ParameterStdDev();
  ASSERT_EQ(sd.size(), 3u);
  EXPECT_NEAR(sd[0], std::sqrt(2.1875), 1e-12);
  EXPECT_EQ(sd[1], 0.0);
  EXPECT_EQ(sd[2], 0.0);
}

TEST(GammaGridTest, EvenlySpaced) {
  const auto g = GammaGrid();
  ASSERT_EQ(g.size(), 33u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_DOUBLE_EQ(g.back(), kPi / 2);
  EXPECT_DOUBLE_EQ(g[16], kPi / 4);
  EXPECT_EQ(GammaGrid(1), std::vector<double>{0.0});
  EXPECT_THROW(GammaGrid(0), InvalidInputError);
}

TEST(GammaSweepTest, OneRowPerGamma) {
  const auto c = Short();
  const auto net = MakeBraess(true);
  const std::vector<double> grid = {0.0, 0.4, kPi / 2};
  const auto s = GammaSweep(c, net, grid, 3);
  ASSERT_EQ(s.rows.size(), 3u);
  EXPECT_NEAR(s.optimal_cost, 1.5, 1e-6);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(s.rows[i].gamma, grid[i]);
    EXPECT_GE(s.rows[i].kappa_q, 1.0 - 1e-6);
    EXPECT_NEAR(s.rows[i].kappa_q, s.rows[i].median_cost / s.optimal_cost, 1e-12);
    EXPECT_GE(s.rows[i].convergence_rate, 0.0);
    EXPECT_LE(s.rows[i].convergence_rate, 1.0);
  }
}

TEST(GammaSweepTest, SinglePointSingleSeedEqualsRun) {
  auto c = Short(0.9);
  const auto net = MakeBraess(true);
  const std::vector<double> grid = {0.9};
  const auto s = GammaSweep(c, net, grid, 1);
  EXPECT_EQ(s.rows[0].median_cost, dynamics::RunRepeatedGame(c, net).equilibrium_cost);
  EXPECT_EQ(s.rows[0].spread, 0.0);
}

TEST(GammaSweepTest, RejectsOutOfRangeGamma) {
  const std::vector<double> grid = {0.0, 2.0};
  EXPECT_THROW(GammaSweep(Short(), MakeBraess(true), grid, 1), InvalidInputError);
  const std::vector<double> neg = {-0.1};
  EXPECT_THROW(GammaSweep(Short(), MakeBraess(true), neg, 1), InvalidInputError);
}

TEST(GammaSweepTest, EmptyGrid) {
  const auto s = GammaSweep(Short(), MakeBraess(true), std::vector<double>{}, 2);
  EXPECT_TRUE(s.rows.empty());
}

TEST(VariantTest, StandardSetCoversSymmetryClasses) {
  const auto variants = StandardVariants();
  int diagonal = 0, asymmetric = 0;
  for (const auto& v : variants) {
    const auto s = network::ClassifyBraessSymmetry(v.network);
    if (s.diagonal) ++diagonal;
    if (!s.diagonal && !s.literal) ++asymmetric;
  }
  EXPECT_GE(diagonal, 2);
  EXPECT_GE(asymmetric, 3);
  EXPECT_EQ(variants.front().name, "canonical");
}

TEST(VariantTest, ReportFields) {
  auto c = Short();
  const std::vector<Variant> v = {{"canonical", MakeBraess(true)}};
  const auto r = CompareVariants(v, c, 2);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(r.gamma, kPi / 4);
  const auto& row = r.rows[0];
  EXPECT_NEAR(row.kappa_c, 4.0 / 3.0, 1e-3);
  EXPECT_GE(row.kappa_c, 1.0 - 1e-6);
  EXPECT_GE(row.kappa_q, 1.0 - 1e-6);
  EXPECT_TRUE(row.symmetry.diagonal);
  EXPECT_EQ(row.edge_labels.size(), 6u);
  EXPECT_EQ(row.classical_flows.size(), 6u);
}

// ---- io ----

TEST(ParseConfigTest, EmptyGivesDefaults) {
  EXPECT_EQ(io::ParseConfig(""), GameConfig{});
  EXPECT_EQ(io::ParseConfig("# only a comment\n\n"), GameConfig{});
}

TEST(ParseConfigTest, Values) {
  const auto c = io::ParseConfig(
      "gamma = 0.7853981633974483\n"
      "gain = 5   # lower gain\n"
      "fd_step = 0.001\n"
      "iterations = 200\n"
      "seed = 9\n"
      "mode = path-diff\n"
      "sign = paper\n"
      "penalty_cost = 1000\n"
      "convergence_window = 10\n"
      "convergence_tol = 0.01\n");
  EXPECT_DOUBLE_EQ(c.gamma, kPi / 4);
  EXPECT_EQ(c.gain, 5);
  EXPECT_EQ(c.fd_step, 0.001);
  EXPECT_EQ(c.iterations, 200);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.mode, dynamics::ObjectiveMode::kPathDiff);
  EXPECT_EQ(c.sign, dynamics::StepSign::kPaper);
  EXPECT_EQ(c.penalty_cost, 1000);
  EXPECT_EQ(c.convergence_window, 10);
  EXPECT_EQ(c.convergence_tol, 0.01);
}

TEST(ParseConfigTest, AngleExpressions) {
  EXPECT_DOUBLE_EQ(io::ParseConfig("gamma = pi/4").gamma, kPi / 4);
  EXPECT_DOUBLE_EQ(io::ParseAngle("3*pi/8"), 3 * kPi / 8);
  EXPECT_DOUBLE_EQ(io::ParseAngle("pi"), kPi);
  EXPECT_THROW(io::ParseAngle("pie"), InvalidInputError);
  EXPECT_THROW(io::ParseAngle("pi/0"), InvalidInputError);
  EXPECT_THROW(io::ParseAngle("x"), InvalidInputError);
}

TEST(ParseConfigTest, BaseSuppliesUnsetKeys) {
  const auto c = io::ParseConfig("gain = 3", CalibratedConfig());
  EXPECT_EQ(c.mode, dynamics::ObjectiveMode::kPathDiff);
  EXPECT_EQ(c.gain, 3);
}

int ErrorLine(const std::string& text, std::string* message = nullptr) {
  try {
    io::ParseConfig(text);
  } catch (const ParseError& e) {
    if (message) *message = e.what();
    return e.line();
  }
  return -1;
}

TEST(ParseConfigTest, ErrorsCarryLineAndField) {
  std::string msg;
  EXPECT_EQ(ErrorLine("gain = 1\nbogus = 2\n", &msg), 2);
  EXPECT_NE(msg.find("line 2"), std::string::npos);
  EXPECT_EQ(ErrorLine("\n\ngain = fast\n"), 3);
  EXPECT_EQ(ErrorLine("gain 4\n"), 1);
  EXPECT_EQ(ErrorLine("gain =\n"), 1);
  EXPECT_EQ(ErrorLine("iterations = 2.5\n"), 1);
  EXPECT_EQ(ErrorLine("mode = sideways\n"), 1);
  EXPECT_EQ(ErrorLine("gain = 1\ngain = 2\n"), 2);
  EXPECT_EQ(ErrorLine("fd_step = 0\n", &msg), 1);
  EXPECT_NE(msg.find("fd_step"), std::string::npos);
  EXPECT_EQ(ErrorLine("gamma = 2\n", &msg), 1);
  EXPECT_NE(msg.find("gamma"), std::string::npos);
  EXPECT_EQ(ErrorLine("convergence_window = -3\n", &msg), 1);
  EXPECT_NE(msg.find("convergence_window"), std::string::npos);
}

constexpr const char* kBraessText = R"(# canonical Braess network
nodes = s u v t
source = s
sink = t
demand = 1
edge = s u 0 1 0
edge = s v 1 0 0
edge = u t 1 0 0
edge = v t 0 1 0
edge = u v 0 0 0
edge = v u 0 0 0
decision = s u v
decision = u t v
decision = v t u
)";

TEST(ParseNetworkTest, CanonicalBraess) {
  const auto net = io::ParseNetwork(kBraessText);
  const auto ref = MakeBraess(true);
  ASSERT_EQ(net.num_edges(), ref.num_edges());
  for (int e = 0; e < ref.num_edges(); ++e) {
    EXPECT_EQ(net.EdgeLabel(e), ref.EdgeLabel(e));
    EXPECT_EQ(net.edges()[e].latency, ref.edges()[e].latency);
  }
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(net.decision_nodes()[k].options, ref.decision_nodes()[k].options);
  }
  EXPECT_NEAR(network::PriceOfAnarchy(net), 4.0 / 3.0, 1e-3);
}

int NetworkErrorLine(const std::string& text) {
  try {
    io::ParseNetwork(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

TEST(ParseNetworkTest, Errors) {
  EXPECT_EQ(NetworkErrorLine("nodes = s t\nsource = s\nsink = t\nedge = s t 1\n"), 4);
  EXPECT_EQ(NetworkErrorLine("nodes = s t\nedge = s t 1 x 0\n"), 2);
  EXPECT_EQ(NetworkErrorLine("nodes = s t\nedge = s t -1 0 0\n"), 2);
  EXPECT_EQ(NetworkErrorLine("nodes = s t\ndecision = s t\n"), 2);
  EXPECT_EQ(NetworkErrorLine("nodes = s t\nlink = s t\n"), 2);
  // Missing sink and graph-level problems have no single line.
  EXPECT_EQ(NetworkErrorLine("nodes = s t\nsource = s\n"), 0);
  EXPECT_EQ(NetworkErrorLine("nodes = s t\nsource = s\nsink = t\n"), 0);
}

TEST(RoundTripTest, Config) {
  const std::vector<std::string> inputs = {
      "", "gamma = pi/4\nmode = edge-diff\nsign = paper\n",
      "gain = 0.1\nfd_step = 1e-7\nseed = 18446744073709551615\n"
      "convergence_tol = 3.3e-5\npenalty_cost = 12345.678\n"};
  for (const auto& text : inputs) {
    const auto once = io::ParseConfig(text);
    EXPECT_EQ(io::ParseConfig(io::WriteConfig(once)), once);
  }
}

TEST(RoundTripTest, Network) {
  network::BraessLatencies l;
  l.su = network::LatencyFn{0.1, 1.0 / 3.0, 0.7};
  for (const auto& net : {io::ParseNetwork(kBraessText), MakeBraess(false),
                          MakeBraess(true, l)}) {
    const std::string text = io::WriteNetwork(net);
    const auto again = io::ParseNetwork(text);
    EXPECT_EQ(io::WriteNetwork(again), text);
    ASSERT_EQ(again.num_edges(), net.num_edges());
    for (int e = 0; e < net.num_edges(); ++e) {
      EXPECT_EQ(again.edges()[e].latency, net.edges()[e].latency);
      EXPECT_EQ(again.EdgeLabel(e), net.EdgeLabel(e));
    }
    EXPECT_EQ(again.num_decision_nodes(), net.num_decision_nodes());
  }
}

TEST(EmitTest, FormatsTwelveDigits) {
  EXPECT_EQ(io::FormatDouble(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(io::FormatDouble(2.0), "2");
  SweepResult s;
  s.optimal_cost = 1.0 / 3.0;
  const auto text = io::DumpJson(io::SweepJson(s));
  EXPECT_NE(text.find("0.333333333333"), std::string::npos);
  EXPECT_EQ(text.find("0.3333333333333"), std::string::npos);
}

TEST(EmitTest, SweepCsvRows) {
  SweepResult empty;
  EXPECT_EQ(io::SweepCsv(empty), "gamma,median_cost,spread,kappa_q,convergence_rate\n");
  SweepResult one;
  one.optimal_cost = 1.5;
  one.rows.push_back({0.5, 1.6, 0.01, 1.6 / 1.5, 1.0});
  const auto csv = io::SweepCsv(one);
  EXPECT_EQ(csv,
            "gamma,median_cost,spread,kappa_q,convergence_rate\n"
            "0.5,1.6,0.01,1.06666666667,1\n");
  const auto j = io::SweepJson(one);
  EXPECT_EQ(j["rows"].size(), 1u);
  EXPECT_DOUBLE_EQ(j["rows"][0]["kappa_q"].get<double>(), 1.06666666667);
}

TEST(EmitTest, TraceCsvColumns) {
  auto c = Short();
  c.iterations = 4;
  const auto net = MakeBraess(true);
  const auto trace = dynamics::RunRepeatedGame(c, net);
  const auto csv = io::TraceCsv(trace, net);
  const std::string header =
      "iteration,theta_s,phi_s,alpha_s,theta_u,phi_u,alpha_u,theta_v,phi_v,"
      "alpha_v,f_su,f_sv,f_ut,f_vt,f_uv,f_vu,total_cost\n";
  ASSERT_EQ(csv.substr(0, header.size()), header);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  EXPECT_EQ(lines, 5);
  EXPECT_EQ(csv, io::TraceCsv(dynamics::RunRepeatedGame(c, net), net));
  const auto j = io::TraceJson(trace, net);
  EXPECT_EQ(j["iterations"].size(), 4u);
  EXPECT_TRUE(j["iterations"][0]["flows"].contains("uv"));
}

TEST(EmitTest, DivergedRoundsLeaveFlowCellsEmpty) {
  dynamics::RunTrace trace;
  dynamics::IterationRecord r;
  r.strategies = dynamics::Strategies(3);
  r.total_cost = 1e6;
  trace.iterations.push_back(r);
  const auto csv = io::TraceCsv(trace, MakeBraess(true));
  EXPECT_NE(csv.find("0,0,0,0,0,0,0,0,0,0,,,,,,,1000000\n"), std::string::npos);
}

TEST(EmitTest, FilesAreByteIdentical) {
  const auto c = Short();
  const auto net = MakeBraess(true);
  const auto e = RunEnsemble(c, net, 3);
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = (dir / "qrouting_emit_a.json").string();
  const auto b = (dir / "qrouting_emit_b.json").string();
  io::WriteFile(a, io::DumpJson(io::EnsembleJson(e, net)));
  io::WriteFile(b, io::DumpJson(io::EnsembleJson(e, net)));
  EXPECT_EQ(io::ReadFile(a), io::ReadFile(b));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(EmitTest, IoErrorsNamePath) {
  try {
    io::WriteFile("/nonexistent-dir/x.csv", "x");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x.csv"), std::string::npos);
  }
  EXPECT_THROW(io::ReadFile("/nonexistent-dir/y"), IoError);
}

TEST(EmitTest, VariantAndClassicalOutputs) {
  const auto net = MakeBraess(true);
  const auto eq = network::ClassicalEquilibrium(net);
  const auto opt = network::OptimalFlow(net);
  const auto j = io::ClassicalJson(net, eq, opt);
  EXPECT_NEAR(j["price_of_anarchy"].get<double>(), 4.0 / 3.0, 1e-3);
  const auto csv = io::ClassicalCsv(net, eq, opt);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "solution,total_cost,f_su,f_sv,f_ut,f_vt,f_uv,f_vu");

  VariantReport report;
  VariantRow row;
  row.name = "x";
  row.kappa_c = 1.2;
  row.kappa_q = 1.1;
  report.rows.push_back(row);
  EXPECT_NE(io::VariantCsv(report).find("\nx,0,0,"), std::string::npos);
  EXPECT_EQ(io::VariantJson(report)["rows"][0]["variant"], "x");
}

}  // namespace
}  // namespace qrouting::experiments
