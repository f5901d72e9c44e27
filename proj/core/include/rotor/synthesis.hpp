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

#include <complex>
#include <optional>
#include <vector>

#include "rotor/basis.hpp"
#include "rotor/propagate.hpp"

namespace rotor {

/// Distinct positive drift eigenvalue differences at truncation N, each
/// with the index pairs (j,k), j < k, that realize it.
struct SpectralGapSet {
  int truncation = 0;
  std::vector<double> gaps;  ///< sorted ascending
  std::vector<std::vector<std::pair<int, int>>> pairs;  ///< aligned with gaps

  bool contains(double sigma, double tol = 1e-9) const;
};

SpectralGapSet spectral_gaps(const OperatorSet& ops, int N);

/// The control mix v.B masked to the level pairs whose gap equals sigma:
/// the effective rotation obtained by resonant driving at sigma.
struct GapGenerator {
  double sigma = 0.0;
  std::array<double, 3> v{0.0, 0.0, 0.0};
  int truncation = 0;
  Matrix matrix;
};

GapGenerator gap_generator(const OperatorSet& ops, double sigma,
                           const std::array<double, 3>& v, int N);

/// Partial product prod_{k=2}^{k_max} cos(pi / (2k)); decreases towards the
/// averaging constant as k_max grows.
double nu_constant(long k_max);

/// Rigorous bracket for the infinite product based on the partial product
/// and a quadratic tail bound.
struct NuBounds {
  double lower = 0.0;
  double upper = 0.0;
};
NuBounds nu_bounds(long k_max);

/// Cached high-order partial product used as the working value.
double nu_universal();

/// Times t_1 < ... < t_h with pairwise separations > R whose empirical
/// averages of e^{i gamma t} hit nu*xi on the primary frequency and ~0 on
/// every other one.
struct PhaseSequence {
  std::vector<double> times;
  double gamma_primary = 0.0;
  std::vector<double> gamma_rest;
  Complex xi{1.0, 0.0};
  double nu = 1.0;  ///< modulus targeted on the primary frequency
  std::vector<Complex> achieved;  ///< averages: primary first, then rest
  double tolerance = 0.0;  ///< max deviation from the targeted averages
  double min_separation = 0.0;
};

/// Constructs the sequence on a common-period carrier lattice with
/// cancellation offsets per parasitic frequency, then polishes locally if
/// the achieved averages miss the target. Throws on degenerate frequencies
/// (|gamma_primary| equal to some |gamma_j|) or invalid parameters.
PhaseSequence phase_sequence(double gamma_primary,
                             const std::vector<double>& gamma_rest, Complex xi,
                             int h, double R, double tau0);

/// One leg of a piecewise path of compatible dynamics: either free drift
/// for `duration`, or a gap rotation exp(duration * twist_xi(generator)).
struct PathSegment {
  double duration = 0.0;
  std::optional<GapGenerator> generator;  ///< nullopt marks a drift leg
  Complex xi{1.0, 0.0};

  static PathSegment drift(double duration);
  static PathSegment gap(double duration, GapGenerator generator,
                         Complex xi = {1.0, 0.0});
};

struct TrackingOptions {
  /// Gaps to cancel in addition to those of the operator set itself
  /// (e.g. gaps of a larger validation truncation).
  std::vector<double> extra_kill_gaps;
  /// Gap legs longer than this are split into equal sub-legs, each with
  /// its own phase sequence; 0 disables splitting.
  double max_leg_duration = 0.0;
  /// Speed multiplier for the catch-up ramps (z = ramp_speed / delta).
  double ramp_speed = 1e3;
  /// Simulate the output and record the interaction-frame error.
  bool measure_error = true;
};

struct TrackingResult {
  ReparametrizedControl control;
  double tracking_error = 0.0;    ///< operator-norm, interaction frame
  double omega_total = 0.0;       ///< total drift phase of the schedule
  double nu_used = 0.0;
  std::vector<double> carrier_times;  ///< concatenated staircase levels
  Matrix target_interaction;      ///< product the schedule approximates
};

/// Realizes a path of compatible dynamics as a drift-speed control: each
/// gap leg becomes a staircase of slow crossings at the phase-sequence
/// times (v on, z = 1/delta) joined by fast catch-up ramps (v off), and
/// drift legs fold into one exact free-flight alignment at the end.
TrackingResult tracking_control(const OperatorSet& ops,
                                const std::vector<PathSegment>& path, int h,
                                double delta,
                                const TrackingOptions& options = {});

enum class SegmentKind { Drift, GapRotation };

struct PlanSegment {
  SegmentKind kind = SegmentKind::Drift;
  double sigma = 0.0;
  std::array<double, 3> v{0.0, 0.0, 0.0};
  double angle = 0.0;  ///< two-level rotation angle (gap segments)
  Complex xi{1.0, 0.0};
  double duration = 0.0;
};

/// An ordered factorization of a target unitary into drift phases and
/// gap-activated rotations, with its realized lab-frame control.
struct ControlPlan {
  int n = 0;
  Matrix target;
  std::vector<PlanSegment> segments;
  PiecewiseControl realized;
  double predicted_error = 0.0;  ///< factorization residual on the n block
  double tracking_error = 0.0;   ///< measured interaction-frame error
  double omega_plan = 0.0;       ///< drift phase the plan requires
};

struct PlanOptions {
  int h = 512;
  double delta = 0.5;
  bool realize = true;  ///< also produce the lab-frame control
  TrackingOptions tracking;
};

/// Factorizes target in SU(n) into exponentials of compatible dynamics
/// (Givens-style reduction over the gap-rotation planes reachable from the
/// ground state, plus drift phases) and realizes the lab-frame control.
/// Requires the rank certificate at n; throws if it fails or if the target
/// needs a block this factorization does not cover.
ControlPlan plan_unitary(const OperatorSet& ops, const Matrix& target, int n,
                         double tol, const PlanOptions& options = {});

struct SteerOptions {
  int h = 512;
  double budget_seconds = 60.0;
  int validation_ell_pad = 2;
  unsigned long long seed = 0;  ///< reserved for randomized retries
};

struct SteerResult {
  PiecewiseControl control;
  double achieved_error = 0.0;  ///< phase-insensitive, validation truncation
  double design_error = 0.0;    ///< same metric at the design truncation
  double leakage = 0.0;
  double total_time = 0.0;
  double sup_amplitude = 0.0;
  int h_used = 0;
  int n = 0;
};

/// Steers psi0 towards psi1 with amplitudes bounded by delta, validating
/// the emitted schedule at a larger truncation. Escalates the staircase
/// resolution within the time budget until the phase-insensitive error is
/// at most eps; returns the best schedule found either way.
SteerResult steer_state(const OperatorSet& ops, const StateVector& psi0,
                        const StateVector& psi1, double eps, double delta,
                        const SteerOptions& options = {});

/// min over unit phases of |a - e^{i phi} b| = sqrt(2 (1 - |<a,b>|)).
double phase_insensitive_distance(const Amplitudes& a, const Amplitudes& b);

}  // namespace rotor
