// Copyright 2026 The rotorctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <functional>
#include <vector>

#include "rotor/basis.hpp"

namespace rotor {

/// Unit-norm wavefunction on a shell-major basis.
struct StateVector {
  BasisOrdering ordering;
  Amplitudes amplitudes;

  static StateVector basis_state(const BasisOrdering& ordering,
                                 LevelIndex level);
  /// Validates the norm to 1e-10.
  static StateVector from_amplitudes(const BasisOrdering& ordering,
                                     Amplitudes amplitudes);

  int dim() const { return ordering.dim(); }
};

struct ControlPiece {
  double duration = 0.0;
  std::array<double, 3> u{0.0, 0.0, 0.0};
};

/// A finite schedule of piecewise-constant controls with amplitude bound.
struct PiecewiseControl {
  std::vector<ControlPiece> pieces;
  double bound = 0.0;

  double total_duration() const;
  double sup_amplitude() const;
  /// Throws on nonpositive durations, non-finite values, or |u| > bound.
  void validate() const;
};

struct ReparamPiece {
  double duration = 0.0;  ///< reparametrized time
  double z = 1.0;         ///< drift speed, >= 1/delta
  std::array<double, 3> v{0.0, 0.0, 0.0};  ///< in [0,1]
};

/// Controls of the drift-speed form z(t) A + v(t).B with z >= 1/delta.
struct ReparametrizedControl {
  std::vector<ReparamPiece> pieces;
  double delta = 0.0;  ///< lab-frame amplitude bound

  void validate() const;
};

/// exp(t G) for skew-Hermitian G, via Hermitian eigendecomposition of iG.
Matrix expm_skew(const Matrix& g, double t = 1.0);

/// A + u1 B1 + u2 B2 + u3 B3.
Matrix step_generator(const OperatorSet& ops, const std::array<double, 3>& u);

/// Exact piecewise propagation psi(T); norm is preserved to 1e-10.
StateVector propagate(const OperatorSet& ops, const StateVector& psi0,
                      const PiecewiseControl& ctrl);

/// Full propagator unitary over a schedule (identity for an empty one).
Matrix propagator_matrix(const OperatorSet& ops, const PiecewiseControl& ctrl);

/// Propagation that reports (t, psi) at sample_dt spacing and at every
/// piece boundary, including t = 0 and t = T.
void propagate_sampled(
    const OperatorSet& ops, const StateVector& psi0,
    const PiecewiseControl& ctrl, double sample_dt,
    const std::function<void(double, const Amplitudes&)>& observer);

/// Lab-frame control equivalent to a drift-speed control:
/// u_k = v_k / z_k with lab durations scaled by z_k.
PiecewiseControl reparametrize(const ReparametrizedControl& ctrl);

/// Interaction-frame generator e^{-omega A} (v.B) e^{omega A}; entry (j,k)
/// carries the phase e^{i (lambda_k - lambda_j) omega}.
Matrix interaction_generator(const OperatorSet& ops, double omega,
                             const std::array<double, 3>& v);

/// Population escaping the small truncation when the schedule runs in the
/// large one: 1 - |pi_small psi_large(T)|^2. psi0 lives on the small space.
double leakage(const OperatorSet& ops_small, const OperatorSet& ops_large,
               const StateVector& psi0, const PiecewiseControl& ctrl);

}  // namespace rotor
