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

#include <string>
#include <utility>
#include <vector>

#include "rotor/basis.hpp"

namespace rotor {

/// A labelled set of same-dimension skew-Hermitian generators.
struct GeneratorSet {
  int dim = 0;
  std::vector<Matrix> generators;
  std::vector<std::string> labels;

  void add(Matrix g, std::string label);
  /// Throws if any generator is not skew-Hermitian within tol.
  void validate_skew(double tol = 1e-10) const;
};

/// Generators {A, B_l : l in controls} restricted to a two-shell block.
/// controls is a subset of {1,2,3}.
GeneratorSet block_generators(const TwoShellBlock& block,
                              const std::vector<int>& controls = {1, 2, 3});

/// Matrix commutator XY - YX.
Matrix bracket(const Matrix& x, const Matrix& y);

/// Result of an iterated-bracket closure run. The basis is orthonormal
/// under the real inner product Re tr(X^dag Y), every element traceless
/// and skew-Hermitian.
struct ClosureReport {
  int dim = 0;               ///< matrix dimension n
  int dimension_found = 0;   ///< real dimension of the computed algebra
  int dimension_full = 0;    ///< n^2 - 1
  int depth = 0;             ///< bracket sweeps until stabilization
  bool is_full_rank = false;
  std::vector<Matrix> basis;
};

/// Closure of the real Lie algebra generated by gens inside su(n):
/// traces are projected out, the seed set is orthonormalized, and bracket
/// sweeps (new x all) run until a full sweep adds nothing. A candidate is
/// accepted when its component orthogonal to the current span exceeds
/// tol * (product of operand norms). Deterministic given input order.
///
/// tol must lie in (0, 1e-4].
ClosureReport lie_closure(const GeneratorSet& gens, double tol = 1e-9);

/// Relative norm of the component of x (trace-removed) orthogonal to the
/// closure basis; ~0 means x lies in the computed algebra.
double membership_residual(const ClosureReport& report, const Matrix& x);

/// Evaluates the elementary-matrix commutator identities on the two-shell
/// block at ell: chain rules for E/F, [E,F] = 2D on a shared pair, the
/// drift relations [A,E] = 2(ell+1) F and [A,F] = -2(ell+1) E, the two
/// mixed [E,E] couplings across adjacent m, and the unit-matrix coupling
/// rule they all derive from. Returns (label, max residual) pairs.
std::vector<std::pair<std::string, double>> verify_bracket_identities(int ell);

/// Worst relative residual of the closed form for the odd iterated
/// commutators ad^{2j+1}_{B3} A against direct bracket iteration,
/// j = 0..j_max (j_max <= 4).
double verify_ad_formula(int ell, int j_max);

/// True iff the gap-sigma extraction of v.B is block-diagonal across the
/// first n states at every truncation up to N_check, i.e. activating sigma
/// cannot leak out of the n-dimensional Galerkin approximation.
bool check_compatible_generator(const OperatorSet& ops, int n, double sigma,
                                const std::array<double, 3>& v, int N_check);

}  // namespace rotor
