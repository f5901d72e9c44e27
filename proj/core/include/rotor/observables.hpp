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

#include <map>

#include "rotor/basis.hpp"
#include "rotor/propagate.hpp"

namespace rotor {

/// Truncated Hermitian matrix of the direction cosine along the field
/// axis, with the sign convention <Y00|cos theta|Y10> = +1/sqrt(3).
Matrix cos_theta_matrix(const OperatorSet& ops);

/// <psi| cos theta |psi>, in [-1, 1].
double orientation(const OperatorSet& ops, const StateVector& psi);

/// |<a, b>|; min over unit phases of |a - e^{i phi} b|^2 = 2 (1 - fidelity).
double fidelity(const StateVector& a, const StateVector& b);

/// Population per shell; values sum to 1.
std::map<int, double> shell_populations(const StateVector& psi);

struct ObservableReport {
  double orientation = 0.0;
  double fidelity = 0.0;
  std::map<std::pair<int, int>, double> populations;  ///< by (ell, m)
};

ObservableReport make_report(const OperatorSet& ops, const StateVector& psi,
                             const StateVector& reference);

}  // namespace rotor
