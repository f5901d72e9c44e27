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

#include "rotor/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "rotor/lie.hpp"

namespace rotor {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

// Phase that best aligns b to a in Frobenius norm.
Complex align_phase(const Matrix& a, const Matrix& b) {
  const Complex overlap = (b.adjoint() * a).trace();
  if (std::abs(overlap) < 1e-300) return Complex(1.0, 0.0);
  return overlap / std::abs(overlap);
}

}  // namespace

bool SpectralGapSet::contains(double sigma, double tol) const {
  for (double g : gaps) {
    if (std::abs(g - sigma) <= tol) return true;
  }
  return false;
}

SpectralGapSet spectral_gaps(const OperatorSet& ops, int N) {
  if (N < 1 || N > ops.dim()) {
    throw std::invalid_argument("spectral_gaps: N out of range");
  }
  SpectralGapSet out;
  out.truncation = N;
  for (int j = 0; j < N; ++j) {
    for (int k = j + 1; k < N; ++k) {
      const double gap = std::abs(ops.lambda[j] - ops.lambda[k]);
      if (gap <= 1e-12) continue;
      bool found = false;
      for (size_t g = 0; g < out.gaps.size(); ++g) {
        if (std::abs(out.gaps[g] - gap) <= 1e-12) {
          out.pairs[g].emplace_back(j, k);
          found = true;
          break;
        }
      }
      if (!found) {
        out.gaps.push_back(gap);
        out.pairs.push_back({{j, k}});
      }
    }
  }
  // sort gaps ascending, keeping pair lists aligned
  std::vector<size_t> order(out.gaps.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return out.gaps[a] < out.gaps[b]; });
  SpectralGapSet sorted;
  sorted.truncation = N;
  for (size_t i : order) {
    sorted.gaps.push_back(out.gaps[i]);
    sorted.pairs.push_back(std::move(out.pairs[i]));
  }
  return sorted;
}

GapGenerator gap_generator(const OperatorSet& ops, double sigma,
                           const std::array<double, 3>& v, int N) {
  for (double c : v) {
    if (c < 0.0 || c > 1.0) {
      throw std::invalid_argument("gap_generator: v must lie in [0,1]^3");
    }
  }
  const SpectralGapSet gaps = spectral_gaps(ops, N);
  if (!gaps.contains(sigma)) {
    throw std::invalid_argument("gap_generator: sigma is not a spectral gap");
  }
  GapGenerator gen;
  gen.sigma = sigma;
  gen.v = v;
  gen.truncation = N;
  gen.matrix = Matrix::Zero(N, N);
  const Matrix vb = v[0] * ops.b1.topLeftCorner(N, N) +
                    v[1] * ops.b2.topLeftCorner(N, N) +
                    v[2] * ops.b3.topLeftCorner(N, N);
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      if (std::abs(std::abs(ops.lambda[j] - ops.lambda[k]) - sigma) <= 1e-9) {
        gen.matrix(j, k) = vb(j, k);
      }
    }
  }
  return gen;
}

double nu_constant(long k_max) {
  if (k_max < 2) {
    throw std::invalid_argument("nu_constant: k_max must be >= 2");
  }
  double log_sum = 0.0;
  for (long k = 2; k <= k_max; ++k) {
    log_sum += std::log(std::cos(kPi / (2.0 * k)));
  }
  return std::exp(log_sum);
}

NuBounds nu_bounds(long k_max) {
  const double partial = nu_constant(k_max);
  // log cos(x) lies between -x^2/2 - 0.21 x^4 and -x^2/2 on (0, pi/4];
  // sum the tail with sum_{k>K} k^-2 < 1/K and sum_{k>K} k^-4 < 1/(3K^3).
  const double k = static_cast<double>(k_max);
  const double tail2 = (kPi * kPi / 8.0) / k;
  const double tail4 = 0.21 * std::pow(kPi / 2.0, 4) / (3.0 * k * k * k);
  return NuBounds{partial * std::exp(-tail2 - tail4), partial};
}

double nu_universal() {
  static const double value = nu_constant(1000000);
  return value;
}

namespace {

struct CarrierLattice {
  double period = 0.0;     // spacing on which every frequency re-aligns
  bool exact = false;
};

CarrierLattice find_carrier_period(double g1, const std::vector<double>& kill) {
  const double base = 2.0 * kPi / std::abs(g1);
  CarrierLattice best;
  double best_err = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 4096; ++k) {
    const double period = base * k;
    double err = 0.0;
    for (double g : kill) {
      err = std::max(err, std::abs(std::sin(0.5 * g * period)));
    }
    if (err < best_err) {
      best_err = err;
      best.period = period;
      if (err < 1e-9) {
        best.exact = true;
        return best;
      }
    }
  }
  return best;
}

// Projected gradient polish of the averaged exponentials, keeping the
// pairwise separations above R.
void polish_times(std::vector<double>& times, double g1,
                  const std::vector<double>& rest, Complex target_primary,
                  double R) {
  const int h = static_cast<int>(times.size());
  if (h < 2) return;
  auto averages = [&](const std::vector<double>& ts) {
    std::vector<Complex> avg(rest.size() + 1, Complex(0, 0));
    for (double t : ts) {
      avg[0] += std::exp(kI * g1 * t);
      for (size_t j = 0; j < rest.size(); ++j) {
        avg[j + 1] += std::exp(kI * rest[j] * t);
      }
    }
    for (auto& a : avg) a /= double(h);
    return avg;
  };
  auto objective = [&](const std::vector<Complex>& avg) {
    double f = std::norm(avg[0] - target_primary);
    for (size_t j = 1; j < avg.size(); ++j) f += std::norm(avg[j]);
    return f;
  };

  std::vector<Complex> avg = averages(times);
  double f = objective(avg);
  double step = 1e-2 / std::max(1.0, std::abs(g1));
  for (int iter = 0; iter < 400 && f > 1e-20; ++iter) {
    std::vector<double> grad(h, 0.0);
    for (int k = 0; k < h; ++k) {
      const Complex d0 = kI * g1 * std::exp(kI * g1 * times[k]) / double(h);
      grad[k] = 2.0 * std::real(std::conj(avg[0] - target_primary) * d0);
      for (size_t j = 0; j < rest.size(); ++j) {
        const Complex dj =
            kI * rest[j] * std::exp(kI * rest[j] * times[k]) / double(h);
        grad[k] += 2.0 * std::real(std::conj(avg[j + 1]) * dj);
      }
    }
    std::vector<double> trial = times;
    for (int k = 0; k < h; ++k) trial[k] -= step * grad[k];
    std::sort(trial.begin(), trial.end());
    bool separated = true;
    for (int k = 0; k + 1 < h; ++k) {
      if (trial[k + 1] - trial[k] <= R) {
        separated = false;
        break;
      }
    }
    if (!separated) {
      step *= 0.5;
      continue;
    }
    const std::vector<Complex> trial_avg = averages(trial);
    const double trial_f = objective(trial_avg);
    if (trial_f < f) {
      times = std::move(trial);
      avg = trial_avg;
      f = trial_f;
      step *= 1.2;
    } else {
      step *= 0.5;
      if (step < 1e-14) break;
    }
  }
}

}  // namespace

PhaseSequence phase_sequence(double gamma_primary,
                             const std::vector<double>& gamma_rest, Complex xi,
                             int h, double R, double tau0) {
  if (gamma_primary == 0.0) {
    throw std::invalid_argument("phase_sequence: gamma_primary must be != 0");
  }
  if (h < 1) throw std::invalid_argument("phase_sequence: h must be >= 1");
  if (!(R > 0.0)) throw std::invalid_argument("phase_sequence: R must be > 0");
  if (std::abs(xi) < 1e-12) {
    throw std::invalid_argument("phase_sequence: xi must be a unit phase");
  }
  xi /= std::abs(xi);
  std::vector<double> kill;
  for (double g : gamma_rest) {
    if (g == 0.0) {
      throw std::invalid_argument("phase_sequence: zero frequency in rest");
    }
    if (std::abs(std::abs(g) - std::abs(gamma_primary)) < 1e-12) {
      throw std::invalid_argument(
          "phase_sequence: degenerate frequencies |gamma_1| == |gamma_j|");
    }
    const double a = std::abs(g);
    if (std::none_of(kill.begin(), kill.end(),
                     [&](double x) { return std::abs(x - a) < 1e-12; })) {
      kill.push_back(a);
    }
  }
  std::sort(kill.begin(), kill.end());

  // Cancellation offsets: one pairing per parasitic frequency.
  std::vector<double> offsets{0.0};
  double intrinsic_phase = 0.0;
  double intrinsic_sign = 1.0;
  for (double g : kill) {
    const double shift = kPi / g;
    const size_t m = offsets.size();
    for (size_t i = 0; i < m; ++i) offsets.push_back(offsets[i] + shift);
    intrinsic_phase += gamma_primary * shift / 2.0;
    const double c = std::cos(gamma_primary * shift / 2.0);
    intrinsic_sign *= (c < 0.0 ? -1.0 : 1.0);
  }
  double nu_actual = 1.0;
  for (double g : kill) {
    nu_actual *= std::abs(std::cos(gamma_primary * kPi / (2.0 * g)));
  }

  // Extra pair shrinking the primary average down to the universal constant.
  double nu_target = 1.0;
  if (!kill.empty()) {
    const double nu_star = nu_universal();
    if (nu_actual >= nu_star) {
      const double dstar =
          2.0 * std::acos(nu_star / nu_actual) / std::abs(gamma_primary);
      const size_t m = offsets.size();
      for (size_t i = 0; i < m; ++i) offsets.push_back(offsets[i] + dstar);
      intrinsic_phase += gamma_primary * dstar / 2.0;
      nu_target = nu_star;
    } else {
      nu_target = nu_actual;  // frequencies too close; keep what is reachable
    }
  }

  const CarrierLattice lattice = find_carrier_period(gamma_primary, kill);
  const double span = *std::max_element(offsets.begin(), offsets.end());
  const double spacing =
      lattice.period * std::ceil((R + span) / lattice.period + 1.0);

  // First carrier: smallest lattice point >= tau0 with the right phase.
  double phase_target = std::arg(xi) - intrinsic_phase;
  if (intrinsic_sign < 0.0) phase_target += kPi;
  const double primary_period = 2.0 * kPi / std::abs(gamma_primary);
  double base = phase_target / gamma_primary;
  if (base < tau0) {
    base += primary_period * std::ceil((tau0 - base) / primary_period);
  }

  PhaseSequence seq;
  seq.gamma_primary = gamma_primary;
  seq.gamma_rest = gamma_rest;
  seq.xi = xi;
  seq.nu = nu_target;
  seq.times.resize(h);
  const size_t m = offsets.size();
  for (int k = 0; k < h; ++k) {
    seq.times[k] = base + k * spacing + offsets[k % m];
  }

  const Complex target_primary = nu_target * xi;
  if (!lattice.exact || h % static_cast<int>(m) != 0) {
    polish_times(seq.times, gamma_primary, kill, target_primary, R);
  }

  auto average = [&](double g) {
    Complex sum(0.0, 0.0);
    for (double t : seq.times) sum += std::exp(kI * g * t);
    return sum / double(h);
  };
  seq.achieved.push_back(average(gamma_primary));
  seq.tolerance = std::abs(seq.achieved[0] - target_primary);
  for (double g : gamma_rest) {
    seq.achieved.push_back(average(g));
    seq.tolerance = std::max(seq.tolerance, std::abs(seq.achieved.back()));
  }
  seq.min_separation = std::numeric_limits<double>::infinity();
  for (int k = 0; k + 1 < h; ++k) {
    seq.min_separation =
        std::min(seq.min_separation, seq.times[k + 1] - seq.times[k]);
  }
  return seq;
}

PathSegment PathSegment::drift(double duration) {
  PathSegment seg;
  seg.duration = duration;
  return seg;
}

PathSegment PathSegment::gap(double duration, GapGenerator generator,
                             Complex xi) {
  PathSegment seg;
  seg.duration = duration;
  seg.generator = std::move(generator);
  seg.xi = xi;
  return seg;
}

namespace {

// Multiplies entries above/below the diagonal (by drift eigenvalue order)
// with zeta / conj(zeta). For a gap-masked matrix this is exactly the
// conjugation by a drift phase.
Matrix twist(const Matrix& g, const RealVector& lambda, Complex zeta) {
  Matrix out = g;
  for (int j = 0; j < g.rows(); ++j) {
    for (int k = 0; k < g.cols(); ++k) {
      if (lambda[k] > lambda[j] + 1e-12) {
        out(j, k) *= zeta;
      } else if (lambda[k] < lambda[j] - 1e-12) {
        out(j, k) *= std::conj(zeta);
      }
    }
  }
  return out;
}

// Gaps carried by nonzero coupling entries (the only ones that need
// cancelling in the interaction frame).
std::vector<double> coupled_gaps(const OperatorSet& ops) {
  std::vector<double> gaps;
  const int n = ops.dim();
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const double weight = std::abs(ops.b1(j, k)) + std::abs(ops.b2(j, k)) +
                            std::abs(ops.b3(j, k));
      if (weight < 1e-14) continue;
      const double gap = std::abs(ops.lambda[j] - ops.lambda[k]);
      if (gap < 1e-12) continue;
      if (std::none_of(gaps.begin(), gaps.end(), [&](double g) {
            return std::abs(g - gap) < 1e-9;
          })) {
        gaps.push_back(gap);
      }
    }
  }
  std::sort(gaps.begin(), gaps.end());
  return gaps;
}

double mod_2pi(double x) {
  double r = std::fmod(x, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  return r;
}

}  // namespace

TrackingResult tracking_control(const OperatorSet& ops,
                                const std::vector<PathSegment>& path, int h,
                                double delta, const TrackingOptions& options) {
  if (h < 1) throw std::invalid_argument("tracking_control: h must be >= 1");
  if (!(delta > 0.0)) {
    throw std::invalid_argument("tracking_control: delta must be > 0");
  }
  const int n = ops.dim();

  std::vector<double> kills_base = coupled_gaps(ops);
  for (double g : options.extra_kill_gaps) {
    if (std::none_of(kills_base.begin(), kills_base.end(), [&](double x) {
          return std::abs(x - g) < 1e-9;
        })) {
      kills_base.push_back(g);
    }
  }

  TrackingResult result;
  result.control.delta = delta;
  result.target_interaction = Matrix::Identity(n, n);
  result.nu_used = nu_universal();

  double omega = 0.0;
  double omega_plan = 0.0;  // drift phase the path asks for
  double drift_before = 0.0;

  for (const PathSegment& segment : path) {
    if (!(segment.duration >= 0.0)) {
      throw std::invalid_argument("tracking_control: negative duration");
    }
    if (!segment.generator) {
      omega_plan += segment.duration;
      drift_before += segment.duration;
      continue;
    }
    const GapGenerator& gen = *segment.generator;
    const double sigma = gen.sigma;
    Matrix full_mask = gap_generator(ops, sigma, gen.v, n).matrix;

    // Interleaved drift legs commute into a twist on later rotations.
    Complex xi_seg = segment.xi / std::abs(segment.xi);
    const Complex zeta =
        xi_seg * std::exp(kI * sigma * drift_before);

    std::vector<double> kill;
    for (double g : kills_base) {
      if (std::abs(g - sigma) > 1e-9) kill.push_back(g);
    }

    int legs = 1;
    if (options.max_leg_duration > 0.0 &&
        segment.duration > options.max_leg_duration) {
      legs = static_cast<int>(
          std::ceil(segment.duration / options.max_leg_duration));
    }
    const double leg_duration = segment.duration / legs;
    if (leg_duration == 0.0) continue;

    for (int leg = 0; leg < legs; ++leg) {
      double nu_est = nu_universal();
      double reduced = leg_duration * sigma / (2.0 * delta * h * nu_est);
      if (reduced > std::sin(1.2)) {
        throw std::runtime_error(
            "tracking_control: slot budget infeasible; increase h or delta "
            "or shorten the path segment");
      }
      double smear = std::asin(reduced);
      double slot = 2.0 * delta * smear / sigma;
      double span = slot / delta;

      const double margin = 0.2;
      PhaseSequence seq = phase_sequence(sigma, kill, zeta, h,
                                         span + margin, omega + span + margin);
      const double nu_achieved = std::abs(seq.achieved[0]);
      result.nu_used = nu_achieved;
      reduced = leg_duration * sigma / (2.0 * delta * h * nu_achieved);
      if (reduced > std::sin(1.2)) {
        throw std::runtime_error(
            "tracking_control: slot budget infeasible after averaging");
      }
      smear = std::asin(reduced);
      slot = 2.0 * delta * smear / sigma;
      span = slot / delta;

      for (double w : seq.times) {
        const double lo = w - span / 2.0;
        const double ramp = lo - omega;
        if (ramp < -1e-9) {
          throw std::logic_error("tracking_control: staircase not monotone");
        }
        if (ramp > 1e-15) {
          result.control.pieces.push_back(
              {ramp * delta / options.ramp_speed, options.ramp_speed / delta,
               {0.0, 0.0, 0.0}});
        }
        result.control.pieces.push_back({slot, 1.0 / delta, gen.v});
        omega = w + span / 2.0;
        result.carrier_times.push_back(w);
      }
      result.target_interaction =
          expm_skew(twist(full_mask, ops.lambda, zeta), leg_duration) *
          result.target_interaction;
    }
  }

  // Free flight making the total drift phase match the path's request.
  const double rem = mod_2pi(omega_plan - omega);
  if (rem > 1e-15) {
    result.control.pieces.push_back({rem * delta / options.ramp_speed,
                                     options.ramp_speed / delta,
                                     {0.0, 0.0, 0.0}});
    omega += rem;
  }
  result.omega_total = omega;

  if (options.measure_error && !result.control.pieces.empty()) {
    Matrix lab = Matrix::Identity(n, n);
    double omega_check = 0.0;
    for (const ReparamPiece& piece : result.control.pieces) {
      const Matrix g = piece.z * ops.drift + piece.v[0] * ops.b1 +
                       piece.v[1] * ops.b2 + piece.v[2] * ops.b3;
      lab = expm_skew(g, piece.duration) * lab;
      omega_check += piece.duration * piece.z;
    }
    Matrix unwind = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      unwind(j, j) = std::exp(-kI * ops.lambda[j] * omega_check);
    }
    result.tracking_error =
        op_norm(unwind * lab - result.target_interaction);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Unitary planning on the ground two-shell block.
// ---------------------------------------------------------------------------

namespace {

// Hub frame: the ground state plus an orthonormal triple of shell-1
// combinations, each reachable as a clean two-level rotation plane.
Matrix hub_frame() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix q = Matrix::Zero(4, 4);
  q(0, 0) = 1.0;
  q(1, 1) = s;
  q(3, 1) = s;   // g1 = (e2 + e4)/sqrt(2)
  q(2, 2) = 1.0; // g2 = e3
  q(1, 3) = s;
  q(3, 3) = -s;  // g3 = (e2 - e4)/sqrt(2)
  return q;
}

struct HubMove {
  int spoke = 1;       // 1..3
  double alpha = 0.0;  // equatorial axis angle
  double theta = 0.0;  // rotation angle
};

Matrix hub_rotation(const HubMove& mv) {
  Matrix r = Matrix::Identity(4, 4);
  const double c = std::cos(mv.theta);
  const double s = std::sin(mv.theta);
  r(0, 0) = c;
  r(mv.spoke, mv.spoke) = c;
  r(0, mv.spoke) = kI * std::exp(-kI * mv.alpha) * s;
  r(mv.spoke, 0) = kI * std::exp(kI * mv.alpha) * s;
  return r;
}

// Elimination move zeroing m(row, col) against m(0, col) from the left.
std::optional<HubMove> eliminate_against_hub(const Matrix& m, int row,
                                             int col) {
  const Complex us = m(row, col);
  const Complex u0 = m(0, col);
  if (std::abs(us) < 1e-15) return std::nullopt;
  HubMove mv;
  mv.spoke = row;
  if (std::abs(u0) < 1e-15) {
    mv.alpha = 0.0;
    mv.theta = kPi / 2.0;
    return mv;
  }
  // new(row,col) = i e^{i a} sin(t) u0 + cos(t) us = 0
  mv.alpha = std::arg(-us / u0 / kI);
  mv.theta = std::atan(std::abs(us / u0));
  return mv;
}

void append_zrot(std::vector<HubMove>& moves, Matrix& m, int spoke,
                 double beta) {
  // diag(e^{i b/2}, e^{-i b/2}) on the (hub, spoke) plane
  const std::array<HubMove, 3> recipe{HubMove{spoke, 0.0, kPi / 4.0},
                                      HubMove{spoke, kPi / 2.0, -beta / 2.0},
                                      HubMove{spoke, 0.0, -kPi / 4.0}};
  for (const HubMove& mv : recipe) {
    m = hub_rotation(mv) * m;
    moves.push_back(mv);
  }
}

// Reduces u (in hub coordinates) to a global phase; returns the moves, in
// application order, whose product times u is that phase.
std::vector<HubMove> star_givens(Matrix u) {
  std::vector<HubMove> moves;
  auto apply = [&](const HubMove& mv) {
    u = hub_rotation(mv) * u;
    moves.push_back(mv);
  };

  for (int row : {3, 2, 1}) {  // column 0 onto the hub
    if (auto mv = eliminate_against_hub(u, row, 0)) apply(*mv);
  }
  // Remaining 3x3 block on the spokes, routed through the hub so that the
  // settled column stays put.
  const std::array<std::pair<int, int>, 3> eliminations{
      std::pair{1, 3}, std::pair{1, 2}, std::pair{2, 3}};
  for (auto [col, row] : eliminations) {
    const HubMove swap{col, 0.0, kPi / 2.0};
    apply(swap);
    if (auto mv = eliminate_against_hub(u, row, col)) apply(*mv);
    apply(HubMove{col, 0.0, -kPi / 2.0});
  }
  // Diagonal phases.
  for (int spoke : {1, 2, 3}) {
    const double phi = std::arg(u(spoke, spoke));
    if (std::abs(phi) > 1e-14) append_zrot(moves, u, spoke, 2.0 * phi);
  }
  const Complex phase = u(0, 0);
  const double defect =
      (u - phase * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff();
  if (defect > 1e-8) {
    throw std::logic_error("star_givens: reduction failed to reach identity");
  }
  return moves;
}

struct SpokePrimitive {
  std::array<double, 3> v;
  double weight;  // coupling amplitude of the two-level plane
};

SpokePrimitive spoke_primitive(int spoke) {
  const double w = std::sqrt(1.0 / 3.0);
  switch (spoke) {
    case 1:
      return {{0.0, 1.0, 0.0}, w};  // (e2 + e4)/sqrt(2) plane via B2
    case 2:
      return {{0.0, 0.0, 1.0}, w};  // e3 plane via B3
    case 3:
      return {{1.0, 0.0, 0.0}, w};  // (e2 - e4)/sqrt(2) plane via B1
    default:
      throw std::logic_error("spoke_primitive: bad spoke");
  }
}

// Twist phase making the physical gap generator match the hub move's
// two-level generator; verified numerically entry by entry.
Complex solve_twist(const OperatorSet& ops, const Matrix& hub_q,
                    const HubMove& mv, const Matrix& raw4) {
  Matrix gen_hub = Matrix::Zero(4, 4);
  gen_hub(0, mv.spoke) = kI * std::exp(-kI * mv.alpha);
  gen_hub(mv.spoke, 0) = kI * std::exp(kI * mv.alpha);
  const SpokePrimitive prim = spoke_primitive(mv.spoke);
  const Matrix target = prim.weight * (hub_q * gen_hub * hub_q.adjoint());

  int j0 = -1, k0 = -1;
  double best = 0.0;
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      if (ops.lambda[k] > ops.lambda[j] && std::abs(raw4(j, k)) > best) {
        best = std::abs(raw4(j, k));
        j0 = j;
        k0 = k;
      }
    }
  }
  if (j0 < 0) throw std::logic_error("solve_twist: empty generator");
  const Complex zeta = target(j0, k0) / raw4(j0, k0);
  const Matrix check = twist(raw4, ops.lambda.head(4), zeta) - target;
  if (std::abs(std::abs(zeta) - 1.0) > 1e-9 ||
      check.cwiseAbs().maxCoeff() > 1e-9) {
    throw std::logic_error("solve_twist: plane is not a pure twist");
  }
  return zeta;
}

// Certifies Lie(M_0^n) = su(n) with a finite probe of gap directions.
bool rank_certificate(const OperatorSet& ops, int n) {
  GeneratorSet gens;
  gens.add(traceless_drift(ops, n), "A0");
  const std::array<std::array<double, 3>, 6> probes{{{1, 0, 0},
                                                     {0, 1, 0},
                                                     {0, 0, 1},
                                                     {1, 1, 0},
                                                     {1, 0, 1},
                                                     {0, 1, 1}}};
  const SpectralGapSet gaps = spectral_gaps(ops, n);
  for (double sigma : gaps.gaps) {
    for (const auto& v : probes) {
      if (!check_compatible_generator(ops, n, sigma, v, ops.dim())) continue;
      GapGenerator gen = gap_generator(ops, sigma, v, n);
      if (gen.matrix.norm() < 1e-14) continue;
      gens.add(gen.matrix, "B");
    }
  }
  return lie_closure(gens, 1e-9).is_full_rank;
}

}  // namespace

ControlPlan plan_unitary(const OperatorSet& ops, const Matrix& target, int n,
                         double tol, const PlanOptions& options) {
  if (n < 1 || n > ops.dim()) {
    throw std::invalid_argument("plan_unitary: n out of range");
  }
  if (target.rows() != n || target.cols() != n) {
    throw std::invalid_argument("plan_unitary: target must be n x n");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("plan_unitary: tol must be > 0");
  }
  const Matrix gram = target.adjoint() * target;
  if ((gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::invalid_argument("plan_unitary: target is not unitary");
  }

  ControlPlan plan;
  plan.n = n;
  // Normalize the determinant so the target sits in SU(n).
  const Complex det = target.determinant();
  plan.target = target * std::exp(-kI * std::arg(det) / double(n));

  if (n > 1 && !rank_certificate(ops, n)) {
    throw std::runtime_error(
        "plan_unitary: rank certificate failed at this truncation");
  }

  const double identity_defect =
      (plan.target - plan.target(0, 0) * Matrix::Identity(n, n))
          .cwiseAbs()
          .maxCoeff();
  if (n == 1 || identity_defect < 1e-12) {
    plan.predicted_error = identity_defect;
    plan.realized.bound = options.delta;
    return plan;
  }

  if (n != 4) {
    throw std::invalid_argument(
        "plan_unitary: constructive factorization is implemented for the "
        "ground two-shell block (n = 4); larger blocks need targets that "
        "are single gap-generator exponentials");
  }

  const Matrix hub_q = hub_frame();
  const Matrix hub_target = hub_q.adjoint() * plan.target * hub_q;
  const std::vector<HubMove> moves = star_givens(hub_target);

  // u = R_1^dag R_2^dag ... R_K^dag (phase); execution order is reversed.
  const Matrix raw_b1 = gap_generator(ops, 2.0, {1, 0, 0}, 4).matrix;
  const Matrix raw_b2 = gap_generator(ops, 2.0, {0, 1, 0}, 4).matrix;
  const Matrix raw_b3 = gap_generator(ops, 2.0, {0, 0, 1}, 4).matrix;
  auto raw_for = [&](int spoke) -> const Matrix& {
    return spoke == 1 ? raw_b2 : (spoke == 2 ? raw_b3 : raw_b1);
  };

  for (auto it = moves.rbegin(); it != moves.rend(); ++it) {
    HubMove inverse = *it;
    inverse.theta = -inverse.theta;
    if (std::abs(inverse.theta) < 1e-14) continue;
    // Fold a negative angle into the twist phase.
    Complex extra(1.0, 0.0);
    double theta = inverse.theta;
    if (theta < 0.0) {
      theta = -theta;
      extra = -1.0;
    }
    const SpokePrimitive prim = spoke_primitive(inverse.spoke);
    const Complex zeta =
        extra * solve_twist(ops, hub_q, inverse, raw_for(inverse.spoke));

    PlanSegment seg;
    seg.kind = SegmentKind::GapRotation;
    seg.sigma = 2.0;
    seg.v = prim.v;
    seg.angle = theta;
    seg.xi = zeta;
    seg.duration = theta / prim.weight;
    plan.segments.push_back(seg);
  }

  // Factorization residual by direct re-multiplication on the block.
  Matrix product = Matrix::Identity(n, n);
  double omega_plan = 0.0;
  for (const PlanSegment& seg : plan.segments) {
    if (seg.kind == SegmentKind::Drift) {
      omega_plan += seg.duration;
      Matrix a0 = traceless_drift(ops, n);
      product = expm_skew(a0, seg.duration) * product;
      continue;
    }
    const Matrix raw = gap_generator(ops, seg.sigma, seg.v, n).matrix;
    product =
        expm_skew(twist(raw, ops.lambda.head(n), seg.xi), seg.duration) *
        product;
  }
  plan.omega_plan = omega_plan;
  const Complex phase = align_phase(plan.target, product);
  plan.predicted_error = op_norm(phase * product - plan.target);
  if (plan.predicted_error > tol) {
    throw std::runtime_error(
        "plan_unitary: factorization residual above tolerance");
  }

  if (options.realize && !plan.segments.empty()) {
    std::vector<PathSegment> path;
    for (const PlanSegment& seg : plan.segments) {
      if (seg.kind == SegmentKind::Drift) {
        path.push_back(PathSegment::drift(seg.duration));
      } else {
        path.push_back(PathSegment::gap(
            seg.duration, gap_generator(ops, seg.sigma, seg.v, ops.dim()),
            seg.xi));
      }
    }
    const TrackingResult tracked =
        tracking_control(ops, path, options.h, options.delta, options.tracking);
    plan.tracking_error = tracked.tracking_error;
    plan.realized = reparametrize(tracked.control);
  } else {
    plan.realized.bound = options.delta;
  }
  return plan;
}

double phase_insensitive_distance(const Amplitudes& a, const Amplitudes& b) {
  const double overlap = std::min(1.0, std::abs(a.dot(b)));
  return std::sqrt(std::max(0.0, 2.0 * (1.0 - overlap)));
}

SteerResult steer_state(const OperatorSet& ops, const StateVector& psi0,
                        const StateVector& psi1, double eps, double delta,
                        const SteerOptions& options) {
  if (!(eps > 0.0) || eps >= 1.0) {
    throw std::invalid_argument("steer_state: eps must be in (0,1)");
  }
  if (!(delta > 0.0)) {
    throw std::invalid_argument("steer_state: delta must be > 0");
  }
  if (psi0.dim() != ops.dim() || psi1.dim() != ops.dim()) {
    throw std::invalid_argument("steer_state: state dimension mismatch");
  }
  const auto start_time = std::chrono::steady_clock::now();

  SteerResult result;
  result.n = 4;
  result.control.bound = delta;

  const double direct =
      phase_insensitive_distance(psi0.amplitudes, psi1.amplitudes);
  if (direct <= std::min(eps, 1e-12)) {
    result.achieved_error = direct;
    result.design_error = direct;
    return result;
  }

  // The constructive planner works on the ground two-shell block.
  auto support_shell = [&](const StateVector& psi) {
    int shell = 0;
    for (int k = 0; k < psi.dim(); ++k) {
      if (std::abs(psi.amplitudes[k]) > 1e-10) {
        shell = std::max(shell, psi.ordering.level_of(k).ell);
      }
    }
    return shell;
  };
  if (support_shell(psi0) > 1 || support_shell(psi1) > 1) {
    throw std::invalid_argument(
        "steer_state: source and target must be supported on shells 0-1");
  }
  if (ops.ell_max() < 1) {
    throw std::invalid_argument("steer_state: need ell_max >= 1");
  }

  const int n = 4;
  Amplitudes a = psi0.amplitudes.head(n).normalized();
  Amplitudes b = psi1.amplitudes.head(n).normalized();
  const Complex overlap = a.dot(b);  // conj(a) . b
  Matrix u = Matrix::Identity(n, n);
  if (std::abs(overlap) < 1.0 - 1e-14) {
    Amplitudes b_aligned = b;
    if (std::abs(overlap) > 1e-300) {
      b_aligned *= std::exp(-kI * std::arg(overlap));
    }
    const double c = std::min(1.0, std::abs(overlap));
    Amplitudes w = b_aligned - c * a;
    w /= w.norm();
    const double theta = std::acos(c);
    const Matrix k = w * a.adjoint() - a * w.adjoint();
    u = expm_skew(k, theta);
  }

  // Validation space two shells above the design truncation.
  const OperatorSet ops_large =
      build_operators(ops.ell_max() + options.validation_ell_pad);

  PlanOptions plan_options;
  plan_options.delta = delta;
  plan_options.tracking.max_leg_duration = 0.7;
  plan_options.tracking.extra_kill_gaps = coupled_gaps(ops_large);
  plan_options.tracking.measure_error = false;

  double best_error = std::numeric_limits<double>::infinity();
  int h = options.h;
  for (int attempt = 0; attempt < 4; ++attempt) {
    plan_options.h = h;
    const ControlPlan plan = plan_unitary(ops, u, n, 1e-6, plan_options);

    const StateVector end_design = propagate(ops, psi0, plan.realized);
    const double design_error = phase_insensitive_distance(
        psi1.amplitudes, end_design.amplitudes);

    Amplitudes embedded = Amplitudes::Zero(ops_large.dim());
    embedded.head(ops.dim()) = psi0.amplitudes;
    const StateVector start_large =
        StateVector::from_amplitudes(ops_large.ordering, embedded);
    const StateVector end_large = propagate(ops_large, start_large,
                                            plan.realized);
    Amplitudes target_large = Amplitudes::Zero(ops_large.dim());
    target_large.head(ops.dim()) = psi1.amplitudes;
    const double big_error = phase_insensitive_distance(
        target_large, end_large.amplitudes);
    const double leak =
        1.0 - end_large.amplitudes.head(ops.dim()).squaredNorm();

    if (big_error < best_error) {
      best_error = big_error;
      result.control = plan.realized;
      result.achieved_error = big_error;
      result.design_error = design_error;
      result.leakage = leak;
      result.h_used = h;
      result.total_time = plan.realized.total_duration();
      result.sup_amplitude = plan.realized.sup_amplitude();
    }
    if (best_error <= eps) break;

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_time)
            .count();
    if (elapsed > options.budget_seconds * 0.5) break;
    h *= 2;
  }
  return result;
}

}  // namespace rotor
