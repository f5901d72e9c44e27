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

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <stdexcept>

namespace rotor {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Amplitudes = Eigen::VectorXcd;

/// A spherical-harmonic label (ell, m) with |m| <= ell.
struct LevelIndex {
  int ell = 0;
  int m = 0;

  bool valid() const { return ell >= 0 && m >= -ell && m <= ell; }
  friend bool operator==(const LevelIndex&, const LevelIndex&) = default;
};

/// Shell-major ordering of the (ell_max+1)^2 levels: all of shell ell
/// precede shell ell+1, and m ascends from -ell to ell inside a shell.
class BasisOrdering {
 public:
  explicit BasisOrdering(int ell_max);

  int ell_max() const { return ell_max_; }
  int dim() const { return dim_; }

  /// Flat 0-based index of a level; throws std::invalid_argument if the
  /// level is invalid or beyond ell_max.
  int index_of(LevelIndex level) const;

  /// Inverse of index_of; throws std::out_of_range on bad indices.
  LevelIndex level_of(int index) const;

 private:
  int ell_max_;
  int dim_;
};

/// p coefficient of the m-preserving dipole coupling,
/// -sqrt(((ell+1)^2 - m^2) / ((2 ell + 1)(2 ell + 3))); strictly negative.
double p_coeff(int ell, int m);

/// q coefficient of the m-shifting dipole couplings,
/// sqrt((ell - m + 2)(ell - m + 1) / (4 (2 ell + 1)(2 ell + 3))).
double q_coeff(int ell, int m);

enum class ElementaryKind { E, F, D };

/// Elementary skew-Hermitian matrices on flat indices (0-based):
///   E(j,k) = e_jk - e_kj,  F(j,k) = i e_jk + i e_kj,  D(j,k) = i e_jj - i e_kk.
Matrix elementary(ElementaryKind kind, int dim, int row, int col);

/// Truncated drift and dipole-coupling operators on the shell-major basis.
///
/// drift = diag(i lambda_k) with lambda_k = -ell(ell+1); the couplings b1,
/// b2, b3 are skew-Hermitian by construction and connect adjacent shells
/// only. b3 preserves m; b1 and b2 shift m by +-1.
struct OperatorSet {
  BasisOrdering ordering;
  RealVector lambda;
  Matrix drift;
  Matrix b1;
  Matrix b2;
  Matrix b3;

  int dim() const { return ordering.dim(); }
  int ell_max() const { return ordering.ell_max(); }

  /// axis 1, 2 or 3.
  const Matrix& coupling(int axis) const;
};

/// Builds the operators at truncation ell_max >= 1 (at least two shells).
OperatorSet build_operators(int ell_max);

/// Leading n x n block of the drift minus its trace average: the traceless
/// diagonal generator used on Galerkin truncations.
Matrix traceless_drift(const OperatorSet& ops, int n);

/// X - tr(X)/n I.
Matrix remove_trace(const Matrix& x);

/// Restriction of an OperatorSet to the two consecutive shells ell, ell+1
/// (a contiguous 4 ell + 4 block in shell-major order). The drift comes out
/// trace-removed.
struct TwoShellBlock {
  int ell = 0;
  int offset = 0;  ///< first flat index of the block in the parent ordering
  int dim = 0;
  RealVector lambda;  ///< untruncated drift eigenvalues on the block
  Matrix drift;       ///< traceless
  Matrix b1;
  Matrix b2;
  Matrix b3;

  /// Block-local flat index of a level in shell ell or ell+1.
  int local_index(LevelIndex level) const;
};

TwoShellBlock two_shell_block(const OperatorSet& ops, int ell);

}  // namespace rotor
