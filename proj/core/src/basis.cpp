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

#include "rotor/basis.hpp"

#include <cmath>
#include <string>

namespace rotor {

namespace {
const Complex kI(0.0, 1.0);
}

BasisOrdering::BasisOrdering(int ell_max) : ell_max_(ell_max) {
  if (ell_max < 0) {
    throw std::invalid_argument("BasisOrdering: ell_max must be >= 0");
  }
  dim_ = (ell_max + 1) * (ell_max + 1);
}

int BasisOrdering::index_of(LevelIndex level) const {
  if (!level.valid() || level.ell > ell_max_) {
    throw std::invalid_argument("BasisOrdering: level (" +
                                std::to_string(level.ell) + "," +
                                std::to_string(level.m) + ") out of range");
  }
  return level.ell * level.ell + level.m + level.ell;
}

LevelIndex BasisOrdering::level_of(int index) const {
  if (index < 0 || index >= dim_) {
    throw std::out_of_range("BasisOrdering: index out of range");
  }
  int ell = static_cast<int>(std::sqrt(static_cast<double>(index)));
  while (ell * ell > index) --ell;
  while ((ell + 1) * (ell + 1) <= index) ++ell;
  return LevelIndex{ell, index - ell * ell - ell};
}

double p_coeff(int ell, int m) {
  if (ell < 0 || std::abs(m) > ell) {
    throw std::domain_error("p_coeff: require 0 <= |m| <= ell");
  }
  const double num = double(ell + 1) * (ell + 1) - double(m) * m;
  const double den = double(2 * ell + 1) * (2 * ell + 3);
  return -std::sqrt(num / den);
}

double q_coeff(int ell, int m) {
  if (ell < 0) {
    throw std::domain_error("q_coeff: require ell >= 0");
  }
  const double num = double(ell - m + 2) * (ell - m + 1);
  const double den = 4.0 * (2 * ell + 1) * (2 * ell + 3);
  return std::sqrt(num / den);
}

Matrix elementary(ElementaryKind kind, int dim, int row, int col) {
  if (dim <= 0 || row < 0 || col < 0 || row >= dim || col >= dim) {
    throw std::invalid_argument("elementary: index out of range");
  }
  if (row == col) {
    throw std::invalid_argument("elementary: row and col must differ");
  }
  Matrix out = Matrix::Zero(dim, dim);
  switch (kind) {
    case ElementaryKind::E:
      out(row, col) = 1.0;
      out(col, row) = -1.0;
      break;
    case ElementaryKind::F:
      out(row, col) = kI;
      out(col, row) = kI;
      break;
    case ElementaryKind::D:
      out(row, row) = kI;
      out(col, col) = -kI;
      break;
  }
  return out;
}

const Matrix& OperatorSet::coupling(int axis) const {
  switch (axis) {
    case 1:
      return b1;
    case 2:
      return b2;
    case 3:
      return b3;
    default:
      throw std::invalid_argument("OperatorSet::coupling: axis must be 1..3");
  }
}

OperatorSet build_operators(int ell_max) {
  if (ell_max < 1) {
    throw std::invalid_argument(
        "build_operators: ell_max must be >= 1 (two shells minimum)");
  }
  BasisOrdering ordering(ell_max);
  const int n = ordering.dim();

  RealVector lambda(n);
  for (int k = 0; k < n; ++k) {
    const int ell = ordering.level_of(k).ell;
    lambda[k] = -double(ell) * (ell + 1);
  }

  OperatorSet ops{ordering, lambda, Matrix::Zero(n, n), Matrix::Zero(n, n),
                  Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (int k = 0; k < n; ++k) {
    ops.drift(k, k) = kI * lambda[k];
  }

  auto add_E = [&](Matrix& target, double c, LevelIndex a, LevelIndex b) {
    const int j = ordering.index_of(a);
    const int k = ordering.index_of(b);
    target(j, k) += c;
    target(k, j) -= c;
  };
  auto add_F = [&](Matrix& target, double c, LevelIndex a, LevelIndex b) {
    const int j = ordering.index_of(a);
    const int k = ordering.index_of(b);
    target(j, k) += kI * c;
    target(k, j) += kI * c;
  };

  for (int ell = 0; ell < ell_max; ++ell) {
    for (int m = -ell; m <= ell; ++m) {
      add_F(ops.b3, p_coeff(ell, m), {ell, m}, {ell + 1, m});
      add_F(ops.b1, -q_coeff(ell, m), {ell, m}, {ell + 1, m - 1});
      add_F(ops.b1, q_coeff(ell, -m), {ell, m}, {ell + 1, m + 1});
      add_E(ops.b2, q_coeff(ell, m), {ell, m}, {ell + 1, m - 1});
      add_E(ops.b2, q_coeff(ell, -m), {ell, m}, {ell + 1, m + 1});
    }
  }
  return ops;
}

Matrix remove_trace(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  return x - (x.trace() / double(n)) * Matrix::Identity(n, n);
}

Matrix traceless_drift(const OperatorSet& ops, int n) {
  if (n < 1 || n > ops.dim()) {
    throw std::invalid_argument("traceless_drift: n out of range");
  }
  return remove_trace(ops.drift.topLeftCorner(n, n));
}

int TwoShellBlock::local_index(LevelIndex level) const {
  if (!level.valid() || (level.ell != ell && level.ell != ell + 1)) {
    throw std::invalid_argument("TwoShellBlock: level not in block shells");
  }
  if (level.ell == ell) {
    return level.m + ell;
  }
  return (2 * ell + 1) + level.m + ell + 1;
}

TwoShellBlock two_shell_block(const OperatorSet& ops, int ell) {
  if (ell < 0 || ell + 1 > ops.ell_max()) {
    throw std::invalid_argument(
        "two_shell_block: need shells ell and ell+1 inside the truncation");
  }
  const int lo = ell * ell;
  const int size = 4 * ell + 4;
  TwoShellBlock block;
  block.ell = ell;
  block.offset = lo;
  block.dim = size;
  block.lambda = ops.lambda.segment(lo, size);
  block.drift = remove_trace(ops.drift.block(lo, lo, size, size));
  block.b1 = ops.b1.block(lo, lo, size, size);
  block.b2 = ops.b2.block(lo, lo, size, size);
  block.b3 = ops.b3.block(lo, lo, size, size);
  return block;
}

}  // namespace rotor
