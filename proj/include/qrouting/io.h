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

#ifndef QROUTING_IO_H_
#define QROUTING_IO_H_

// Text formats for configurations and networks, and CSV / JSON emitters for
// experiment results.
//
// Both input formats are line oriented: `key = value`, with `#` starting a
// comment. A network file looks like
//
//   nodes = s u v t
//   source = s
//   sink = t
//   demand = 1
//   edge = s u 0 1 0        # from to a b c:  L(f) = a + b f + c f^2
//   decision = s u v        # node, option-0 head, option-1 head
//
// Angles (gamma) may be written as plain numbers or as k*pi/n, e.g. pi/4.
//
// Emitted floating-point values carry 12 significant digits; emitted output
// depends only on its input.

#include <string>
#include <string_view>

#include <json.hpp>

#include "qrouting/dynamics.h"
#include "qrouting/experiments.h"
#include "qrouting/network.h"

namespace qrouting::io {

// Unknown keys and malformed values throw ParseError with the line number;
// range violations throw ParseError naming the field. Missing keys keep the
// GameConfig defaults.
dynamics::GameConfig ParseConfig(std::string_view text);
// Same, with unspecified keys taken from `base`.
dynamics::GameConfig ParseConfig(std::string_view text,
                                 const dynamics::GameConfig& base);
network::RoutingNetwork ParseNetwork(std::string_view text);

// Inverse of the parsers, printed with full precision so that
// Parse(Write(x)) == x.
std::string WriteConfig(const dynamics::GameConfig& config);
std::string WriteNetwork(const network::RoutingNetwork& network);

// Number or [k*]pi[/n]. Throws InvalidInputError.
double ParseAngle(std::string_view text);

// Reads a whole file; throws IoError naming the path.
std::string ReadFile(const std::string& path);
// Writes (truncating) a whole file; throws IoError naming the path.
void WriteFile(const std::string& path, std::string_view content);

// %.12g.
std::string FormatDouble(double value);

// iteration, theta_<p>, phi_<p>, alpha_<p> per player, f_<edge> per edge,
// total_cost. Flow cells are empty in diverged rounds.
std::string TraceCsv(const dynamics::RunTrace& trace,
                     const network::RoutingNetwork& network);
nlohmann::ordered_json TraceJson(const dynamics::RunTrace& trace,
                         const network::RoutingNetwork& network);

// gamma, median_cost, spread, kappa_q, convergence_rate. An empty sweep
// yields the header only.
std::string SweepCsv(const experiments::SweepResult& sweep);
nlohmann::ordered_json SweepJson(const experiments::SweepResult& sweep);

std::string EnsembleCsv(const experiments::EnsembleResult& ensemble,
                        const network::RoutingNetwork& network);
nlohmann::ordered_json EnsembleJson(const experiments::EnsembleResult& ensemble,
                            const network::RoutingNetwork& network);

std::string VariantCsv(const experiments::VariantReport& report);
nlohmann::ordered_json VariantJson(const experiments::VariantReport& report);

std::string CalibrationCsv(
    const std::vector<experiments::CalibrationRow>& rows);
nlohmann::ordered_json CalibrationJson(
    const std::vector<experiments::CalibrationRow>& rows);

// Classical equilibrium and optimum of a network.
nlohmann::ordered_json ClassicalJson(const network::RoutingNetwork& network,
                             const network::SearchResult& equilibrium,
                             const network::SearchResult& optimum);
std::string ClassicalCsv(const network::RoutingNetwork& network,
                         const network::SearchResult& equilibrium,
                         const network::SearchResult& optimum);

// Dumps with 2-space indentation and a trailing newline.
std::string DumpJson(const nlohmann::ordered_json& j);

}  // namespace qrouting::io

#endif  // QROUTING_IO_H_
