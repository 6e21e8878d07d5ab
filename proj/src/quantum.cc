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

#include "qrouting/quantum.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "qrouting/errors.h"

namespace qrouting::quantum {
namespace {

constexpr int kMaxQubits = 20;

int QubitCountFor(std::size_t dimension) {
  if (dimension == 0 || !std::has_single_bit(dimension)) {
    throw InvalidInputError("amplitude count " + std::to_string(dimension) +
                            " is not a power of two");
  }
  return std::countr_zero(dimension);
}

// Bit of qubit k within a basis index; qubit 0 is the most significant.
inline std::size_t QubitMask(int n_qubits, int k) {
  return std::size_t{1} << (n_qubits - 1 - k);
}

}  // namespace

QuantumState::QuantumState(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw InvalidInputError("qubit count must be in [1, " +
                            std::to_string(kMaxQubits) + "], got " +
                            std::to_string(n_qubits));
  }
  amplitudes_.assign(std::size_t{1} << n_qubits, Complex(0.0, 0.0));
  amplitudes_[0] = 1.0;
}

QuantumState::QuantumState(std::vector<Complex> amplitudes)
    : n_qubits_(QubitCountFor(amplitudes.size())),
      amplitudes_(std::move(amplitudes)) {
  if (n_qubits_ < 1) {
    throw InvalidInputError("a state needs at least one qubit");
  }
}

double QuantumState::Norm2() const {
  double total = 0.0;
  for (const Complex& a : amplitudes_) total += std::norm(a);
  return total;
}

Matrix2 StrategyUnitary(const StrategyParams& params) {
  if (!std::isfinite(params.theta) || !std::isfinite(params.phi) ||
      !std::isfinite(params.alpha)) {
    throw InvalidInputError("strategy angles must be finite");
  }
  const double c = std::cos(params.theta / 2.0);
  const double s = std::sin(params.theta / 2.0);
  const Complex e_phi = std::polar(1.0, params.phi);
  const Complex e_alpha = std::polar(1.0, params.alpha);
  return {{{std::conj(e_phi) * c, e_alpha * s},
           {-std::conj(e_alpha) * s, e_phi * c}}};
}

double UnitarityDefect(const Matrix2& u) {
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Complex entry = std::conj(u[0][i]) * u[0][j] +
                      std::conj(u[1][i]) * u[1][j];
      if (i == j) entry -= 1.0;
      worst = std::max(worst, std::abs(entry));
    }
  }
  return worst;
}

QuantumState ApplyEntangler(const QuantumState& state, double gamma,
                            bool adjoint) {
  if (!std::isfinite(gamma)) {
    throw InvalidInputError("entangling parameter must be finite");
  }
  const double c = std::cos(gamma);
  const Complex is(0.0, adjoint ? -std::sin(gamma) : std::sin(gamma));
  // sigma_x on every qubit maps basis index b to its bitwise complement.
  const std::size_t all_ones = state.dimension() - 1;
  auto in = state.amplitudes();
  std::vector<Complex> out(in.size());
  for (std::size_t b = 0; b < in.size(); ++b) {
    out[b] = c * in[b] + is * in[b ^ all_ones];
  }
  return QuantumState(std::move(out));
}

QuantumState ApplyLocalUnitaries(const QuantumState& state,
                                 std::span<const Matrix2> unitaries) {
  const int n = state.n_qubits();
  if (static_cast<int>(unitaries.size()) != n) {
    throw InvalidInputError("expected " + std::to_string(n) +
                            " local unitaries, got " +
                            std::to_string(unitaries.size()));
  }
  for (int k = 0; k < n; ++k) {
    if (!(UnitarityDefect(unitaries[k]) <= kUnitarityTolerance)) {
      throw InvalidInputError("local operator for qubit " + std::to_string(k) +
                              " is not unitary");
    }
  }
  QuantumState result = state;
  auto amps = result.mutable_amplitudes();
  for (int k = 0; k < n; ++k) {
    const Matrix2& u = unitaries[k];
    const std::size_t mask = QubitMask(n, k);
    for (std::size_t b = 0; b < amps.size(); ++b) {
      if (b & mask) continue;
      const Complex a0 = amps[b];
      const Complex a1 = amps[b | mask];
      amps[b] = u[0][0] * a0 + u[0][1] * a1;
      amps[b | mask] = u[1][0] * a0 + u[1][1] * a1;
    }
  }
  return result;
}

QuantumState FinalState(std::span<const StrategyParams> strategies,
                        double gamma) {
  std::vector<Matrix2> unitaries;
  unitaries.reserve(strategies.size());
  for (const StrategyParams& p : strategies) {
    unitaries.push_back(StrategyUnitary(p));
  }
  QuantumState state(static_cast<int>(strategies.size()));
  state = ApplyEntangler(state, gamma, /*adjoint=*/false);
  state = ApplyLocalUnitaries(state, unitaries);
  return ApplyEntangler(state, gamma, /*adjoint=*/true);
}

std::vector<double> Marginals(const QuantumState& state) {
  const int n = state.n_qubits();
  std::vector<double> p(n, 0.0);
  auto amps = state.amplitudes();
  for (std::size_t b = 0; b < amps.size(); ++b) {
    const double prob = std::norm(amps[b]);
    for (int k = 0; k < n; ++k) {
      if (!(b & QubitMask(n, k))) p[k] += prob;
    }
  }
  for (double& pk : p) pk = std::clamp(pk, 0.0, 1.0);
  return p;
}

}  // namespace qrouting::quantum
