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

#include "rotor/propagate.hpp"

#include <cmath>
#include <stdexcept>

namespace rotor {

namespace {
const Complex kI(0.0, 1.0);

bool is_diagonal(const Matrix& g) {
  for (int j = 0; j < g.rows(); ++j) {
    for (int k = 0; k < g.cols(); ++k) {
      if (j != k && g(j, k) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}
}  // namespace

StateVector StateVector::basis_state(const BasisOrdering& ordering,
                                     LevelIndex level) {
  Amplitudes amp = Amplitudes::Zero(ordering.dim());
  amp[ordering.index_of(level)] = 1.0;
  return StateVector{ordering, std::move(amp)};
}

StateVector StateVector::from_amplitudes(const BasisOrdering& ordering,
                                         Amplitudes amplitudes) {
  if (amplitudes.size() != ordering.dim()) {
    throw std::invalid_argument("StateVector: dimension mismatch");
  }
  if (std::abs(amplitudes.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("StateVector: amplitudes are not unit norm");
  }
  return StateVector{ordering, std::move(amplitudes)};
}

double PiecewiseControl::total_duration() const {
  double t = 0.0;
  for (const auto& piece : pieces) t += piece.duration;
  return t;
}

double PiecewiseControl::sup_amplitude() const {
  double s = 0.0;
  for (const auto& piece : pieces) {
    for (double u : piece.u) s = std::max(s, std::abs(u));
  }
  return s;
}

void PiecewiseControl::validate() const {
  for (const auto& piece : pieces) {
    if (!(piece.duration > 0.0) || !std::isfinite(piece.duration)) {
      throw std::invalid_argument("PiecewiseControl: nonpositive duration");
    }
    for (double u : piece.u) {
      if (!std::isfinite(u)) {
        throw std::invalid_argument("PiecewiseControl: non-finite amplitude");
      }
      if (std::abs(u) > bound + 1e-12) {
        throw std::invalid_argument(
            "PiecewiseControl: amplitude exceeds bound");
      }
    }
  }
}

void ReparametrizedControl::validate() const {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("ReparametrizedControl: delta must be > 0");
  }
  for (const auto& piece : pieces) {
    if (!(piece.duration > 0.0)) {
      throw std::invalid_argument("ReparametrizedControl: bad duration");
    }
    if (piece.z < 1.0 / delta - 1e-12) {
      throw std::invalid_argument("ReparametrizedControl: z below 1/delta");
    }
    for (double v : piece.v) {
      if (v < -1e-12 || v > 1.0 + 1e-12) {
        throw std::invalid_argument("ReparametrizedControl: v outside [0,1]");
      }
    }
  }
}

Matrix expm_skew(const Matrix& g, double t) {
  const int n = static_cast<int>(g.rows());
  if (is_diagonal(g)) {
    Matrix out = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) out(j, j) = std::exp(t * g(j, j));
    return out;
  }
  // iG is Hermitian; exp(tG) = V exp(-i t Lambda) V^dag.
  const Matrix h = kI * g;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("expm_skew: eigendecomposition failed");
  }
  const auto& vec = solver.eigenvectors();
  Amplitudes phases(n);
  for (int j = 0; j < n; ++j) {
    phases[j] = std::exp(-kI * t * solver.eigenvalues()[j]);
  }
  return vec * phases.asDiagonal() * vec.adjoint();
}

Matrix step_generator(const OperatorSet& ops, const std::array<double, 3>& u) {
  return ops.drift + u[0] * ops.b1 + u[1] * ops.b2 + u[2] * ops.b3;
}

StateVector propagate(const OperatorSet& ops, const StateVector& psi0,
                      const PiecewiseControl& ctrl) {
  if (psi0.dim() != ops.dim()) {
    throw std::invalid_argument("propagate: dimension mismatch");
  }
  ctrl.validate();
  Amplitudes psi = psi0.amplitudes;
  for (const auto& piece : ctrl.pieces) {
    psi = expm_skew(step_generator(ops, piece.u), piece.duration) * psi;
  }
  return StateVector{psi0.ordering, std::move(psi)};
}

Matrix propagator_matrix(const OperatorSet& ops,
                         const PiecewiseControl& ctrl) {
  ctrl.validate();
  Matrix total = Matrix::Identity(ops.dim(), ops.dim());
  for (const auto& piece : ctrl.pieces) {
    total = expm_skew(step_generator(ops, piece.u), piece.duration) * total;
  }
  return total;
}

void propagate_sampled(
    const OperatorSet& ops, const StateVector& psi0,
    const PiecewiseControl& ctrl, double sample_dt,
    const std::function<void(double, const Amplitudes&)>& observer) {
  if (!(sample_dt > 0.0)) {
    throw std::invalid_argument("propagate_sampled: sample_dt must be > 0");
  }
  ctrl.validate();
  Amplitudes psi = psi0.amplitudes;
  double t = 0.0;
  observer(t, psi);
  for (const auto& piece : ctrl.pieces) {
    const Matrix g = step_generator(ops, piece.u);
    const int full_steps = static_cast<int>(piece.duration / sample_dt);
    const double remainder = piece.duration - full_steps * sample_dt;
    if (full_steps > 0) {
      const Matrix step = expm_skew(g, sample_dt);
      for (int s = 0; s < full_steps; ++s) {
        psi = step * psi;
        t += sample_dt;
        observer(t, psi);
      }
    }
    if (remainder > 1e-15 * std::max(1.0, piece.duration)) {
      psi = expm_skew(g, remainder) * psi;
      t += remainder;
      observer(t, psi);
    }
  }
}

PiecewiseControl reparametrize(const ReparametrizedControl& ctrl) {
  ctrl.validate();
  PiecewiseControl out;
  out.bound = ctrl.delta;
  out.pieces.reserve(ctrl.pieces.size());
  for (const auto& piece : ctrl.pieces) {
    ControlPiece lab;
    lab.duration = piece.duration * piece.z;
    for (int axis = 0; axis < 3; ++axis) {
      lab.u[axis] = piece.v[axis] / piece.z;
    }
    if (lab.duration > 0.0) out.pieces.push_back(lab);
  }
  return out;
}

Matrix interaction_generator(const OperatorSet& ops, double omega,
                             const std::array<double, 3>& v) {
  const int n = ops.dim();
  const Matrix vb = v[0] * ops.b1 + v[1] * ops.b2 + v[2] * ops.b3;
  Matrix out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      out(j, k) =
          std::exp(kI * (ops.lambda[k] - ops.lambda[j]) * omega) * vb(j, k);
    }
  }
  return out;
}

double leakage(const OperatorSet& ops_small, const OperatorSet& ops_large,
               const StateVector& psi0, const PiecewiseControl& ctrl) {
  if (ops_small.ell_max() >= ops_large.ell_max()) {
    throw std::invalid_argument("leakage: ops_small must be the smaller space");
  }
  const int ns = ops_small.dim();
  const int nl = ops_large.dim();
  Amplitudes embedded = Amplitudes::Zero(nl);
  if (psi0.dim() == ns) {
    embedded.head(ns) = psi0.amplitudes;
  } else if (psi0.dim() == nl) {
    if (psi0.amplitudes.tail(nl - ns).norm() > 1e-12) {
      throw std::invalid_argument("leakage: psi0 not supported on small space");
    }
    embedded = psi0.amplitudes;
  } else {
    throw std::invalid_argument("leakage: psi0 dimension mismatch");
  }
  const StateVector start =
      StateVector::from_amplitudes(ops_large.ordering, std::move(embedded));
  const StateVector end = propagate(ops_large, start, ctrl);
  const double kept = end.amplitudes.head(ns).squaredNorm();
  return 1.0 - kept;
}

}  // namespace rotor
