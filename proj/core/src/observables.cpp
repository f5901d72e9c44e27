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

#include "rotor/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace rotor {

Matrix cos_theta_matrix(const OperatorSet& ops) {
  return Complex(0.0, 1.0) * ops.b3;
}

double orientation(const OperatorSet& ops, const StateVector& psi) {
  if (psi.dim() != ops.dim()) {
    throw std::invalid_argument("orientation: dimension mismatch");
  }
  const Matrix c = cos_theta_matrix(ops);
  return std::real(psi.amplitudes.dot(c * psi.amplitudes));
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  return std::abs(a.amplitudes.dot(b.amplitudes));
}

std::map<int, double> shell_populations(const StateVector& psi) {
  std::map<int, double> populations;
  for (int ell = 0; ell <= psi.ordering.ell_max(); ++ell) {
    populations[ell] = 0.0;
  }
  for (int k = 0; k < psi.dim(); ++k) {
    populations[psi.ordering.level_of(k).ell] += std::norm(psi.amplitudes[k]);
  }
  return populations;
}

ObservableReport make_report(const OperatorSet& ops, const StateVector& psi,
                             const StateVector& reference) {
  ObservableReport report;
  report.orientation = orientation(ops, psi);
  report.fidelity = fidelity(psi, reference);
  for (int k = 0; k < psi.dim(); ++k) {
    const LevelIndex level = psi.ordering.level_of(k);
    report.populations[{level.ell, level.m}] = std::norm(psi.amplitudes[k]);
  }
  return report;
}

}  // namespace rotor
