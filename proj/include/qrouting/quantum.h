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

#ifndef QROUTING_QUANTUM_H_
#define QROUTING_QUANTUM_H_

// Dense state-vector engine for the entangle / local-rotation / disentangle
// protocol played on the decision-node qubits of a routing network.
//
// Basis convention: qubit 0 is the most significant bit of the basis index,
// so for three qubits (s, u, v) the index of |b_s b_u b_v> is
// 4*b_s + 2*b_u + b_v. Measuring a qubit in state 0 routes flow along the
// node's option-0 edge.

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace qrouting::quantum {

using Complex = std::complex<double>;
using Matrix2 = std::array<std::array<Complex, 2>, 2>;

// Tolerance used when validating caller-supplied unitaries.
inline constexpr double kUnitarityTolerance = 1e-9;

// One player's rotation angles, in radians. Any finite values are accepted;
// the angles are deliberately unbounded.
struct StrategyParams {
  double theta = 0.0;
  double phi = 0.0;
  double alpha = 0.0;

  friend bool operator==(const StrategyParams&,
                         const StrategyParams&) = default;
};

class QuantumState {
 public:
  // |0...0> on `n_qubits` qubits.
  explicit QuantumState(int n_qubits);
  // Takes ownership of explicit amplitudes; the count must be a power of two.
  explicit QuantumState(std::vector<Complex> amplitudes);

  int n_qubits() const { return n_qubits_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::span<Complex> mutable_amplitudes() { return amplitudes_; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

  // Sum of squared amplitude magnitudes.
  double Norm2() const;

 private:
  int n_qubits_;
  std::vector<Complex> amplitudes_;
};

// [[e^{-i phi} cos(theta/2),   e^{i alpha} sin(theta/2)],
//  [-e^{-i alpha} sin(theta/2), e^{i phi} cos(theta/2)]]
// Throws InvalidInputError on non-finite angles.
Matrix2 StrategyUnitary(const StrategyParams& params);

// Max-abs entry of U^dagger U - I.
double UnitarityDefect(const Matrix2& u);

// J(gamma) = cos(gamma) I + i sin(gamma) X^{(x)N}; the adjoint flips the sign
// of the second term.
QuantumState ApplyEntangler(const QuantumState& state, double gamma,
                            bool adjoint);

// Applies the tensor product of one 2x2 matrix per qubit, unitaries[k] acting
// on qubit k. Throws InvalidInputError if the count is wrong or any matrix is
// further than kUnitarityTolerance from unitary.
QuantumState ApplyLocalUnitaries(const QuantumState& state,
                                 std::span<const Matrix2> unitaries);

// J^dagger(gamma) (U_0 (x) ... (x) U_{N-1}) J(gamma) |0...0>, N =
// strategies.size().
QuantumState FinalState(std::span<const StrategyParams> strategies,
                        double gamma);

// Exact probability that each qubit measures 0.
std::vector<double> Marginals(const QuantumState& state);

}  // namespace qrouting::quantum

#endif  // QROUTING_QUANTUM_H_
