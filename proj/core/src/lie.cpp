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

#include "rotor/lie.hpp"

#include <cmath>
#include <stdexcept>

namespace rotor {

void GeneratorSet::add(Matrix g, std::string label) {
  if (generators.empty() && dim == 0) {
    dim = static_cast<int>(g.rows());
  }
  if (g.rows() != dim || g.cols() != dim) {
    throw std::invalid_argument("GeneratorSet::add: dimension mismatch");
  }
  generators.push_back(std::move(g));
  labels.push_back(std::move(label));
}

void GeneratorSet::validate_skew(double tol) const {
  for (size_t i = 0; i < generators.size(); ++i) {
    const Matrix& g = generators[i];
    const double defect = (g + g.adjoint()).cwiseAbs().maxCoeff();
    if (defect > tol) {
      throw std::invalid_argument("GeneratorSet: generator '" + labels[i] +
                                  "' is not skew-Hermitian");
    }
  }
}

GeneratorSet block_generators(const TwoShellBlock& block,
                              const std::vector<int>& controls) {
  GeneratorSet gens;
  gens.add(block.drift, "A");
  for (int axis : controls) {
    switch (axis) {
      case 1:
        gens.add(block.b1, "B1");
        break;
      case 2:
        gens.add(block.b2, "B2");
        break;
      case 3:
        gens.add(block.b3, "B3");
        break;
      default:
        throw std::invalid_argument("block_generators: axis must be 1..3");
    }
  }
  return gens;
}

Matrix bracket(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols() || x.rows() != x.cols()) {
    throw std::invalid_argument("bracket: dimension mismatch");
  }
  return x * y - y * x;
}

namespace {

// Orthonormal span under Re tr(X^dag Y), kept vectorized for fast
// projections. Coefficients are real: the span is a real subspace.
class RealSpan {
 public:
  explicit RealSpan(int n) : n_(n), cols_(0), data_(n * n, 16) {}

  int size() const { return cols_; }

  // Removes the span component of v in place; returns the residual norm.
  double project_out(Eigen::VectorXcd& v) const {
    if (cols_ > 0) {
      const auto basis = data_.leftCols(cols_);
      const Eigen::VectorXd coeffs = (basis.adjoint() * v).real();
      v.noalias() -= basis * coeffs.cast<Complex>();
    }
    return v.norm();
  }

  void append(const Eigen::VectorXcd& unit) {
    if (cols_ == data_.cols()) {
      data_.conservativeResize(Eigen::NoChange, 2 * cols_);
    }
    data_.col(cols_++) = unit;
  }

 private:
  int n_;
  Eigen::Index cols_;
  Eigen::MatrixXcd data_;
};

Eigen::VectorXcd vectorize(const Matrix& x) {
  return Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
}

}  // namespace

ClosureReport lie_closure(const GeneratorSet& gens, double tol) {
  if (!(tol > 0.0) || tol > 1e-4) {
    throw std::invalid_argument("lie_closure: tol must be in (0, 1e-4]");
  }
  if (gens.generators.empty()) {
    throw std::invalid_argument("lie_closure: empty generator set");
  }
  gens.validate_skew(1e-10);

  const int n = gens.dim;
  ClosureReport report;
  report.dim = n;
  report.dimension_full = n * n - 1;

  RealSpan span(n);
  std::vector<Matrix> basis;
  std::vector<double> norms;  // Frobenius norms of the unnormalized elements

  auto try_add = [&](const Matrix& candidate, double scale) {
    Eigen::VectorXcd v = vectorize(remove_trace(candidate));
    const double residual = span.project_out(v);
    if (residual <= tol * std::max(scale, 1e-300)) {
      return false;
    }
    v /= residual;
    span.append(v);
    basis.push_back(Eigen::Map<const Matrix>(v.data(), n, n));
    norms.push_back(1.0);
    return true;
  };

  for (const Matrix& g : gens.generators) {
    try_add(g, g.norm());
  }

  int sweep_start = 0;
  int depth = 0;
  const int full = report.dimension_full;
  while (static_cast<int>(basis.size()) < full) {
    const int k = static_cast<int>(basis.size());
    bool grew = false;
    for (int i = sweep_start; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (j == i) continue;
        const Matrix candidate = basis[i] * basis[j] - basis[j] * basis[i];
        grew |= try_add(candidate, norms[i] * norms[j]);
      }
      if (static_cast<int>(basis.size()) >= full) break;
    }
    ++depth;
    if (!grew) break;
    sweep_start = k;
  }

  report.depth = depth;
  report.dimension_found = static_cast<int>(basis.size());
  report.is_full_rank = report.dimension_found == report.dimension_full;
  report.basis = std::move(basis);
  return report;
}

double membership_residual(const ClosureReport& report, const Matrix& x) {
  const int n = report.dim;
  if (x.rows() != n || x.cols() != n) {
    throw std::invalid_argument("membership_residual: dimension mismatch");
  }
  const Matrix x0 = remove_trace(x);
  const double scale = x0.norm();
  if (scale == 0.0) return 0.0;
  Eigen::VectorXcd v = vectorize(x0);
  for (const Matrix& b : report.basis) {
    const Eigen::VectorXcd bv = vectorize(b);
    v -= std::real(bv.dot(v)) * bv;
  }
  return v.norm() / scale;
}

namespace {

struct IdentityAccumulator {
  std::vector<std::pair<std::string, double>> rows;
  void record(const std::string& label, double residual) {
    for (auto& row : rows) {
      if (row.first == label) {
        row.second = std::max(row.second, residual);
        return;
      }
    }
    rows.emplace_back(label, residual);
  }
};

Matrix unit_matrix(int dim, int j, int k) {
  Matrix m = Matrix::Zero(dim, dim);
  m(j, k) = 1.0;
  return m;
}

}  // namespace

std::vector<std::pair<std::string, double>> verify_bracket_identities(
    int ell) {
  if (ell < 0) {
    throw std::invalid_argument("verify_bracket_identities: ell >= 0");
  }
  const OperatorSet ops = build_operators(ell + 1);
  const TwoShellBlock block = two_shell_block(ops, ell);
  const int n = block.dim;

  IdentityAccumulator acc;
  auto E = [&](int j, int k) { return elementary(ElementaryKind::E, n, j, k); };
  auto F = [&](int j, int k) { return elementary(ElementaryKind::F, n, j, k); };
  auto D = [&](int j, int k) { return elementary(ElementaryKind::D, n, j, k); };

  // Unit-matrix coupling rule over all index quadruples.
  {
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const Matrix ejk = unit_matrix(n, j, k);
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) {
            Matrix expected = Matrix::Zero(n, n);
            if (k == a) expected(j, b) += 1.0;
            if (j == b) expected(a, k) -= 1.0;
            const Matrix got = bracket(ejk, unit_matrix(n, a, b));
            worst = std::max(worst, (got - expected).cwiseAbs().maxCoeff());
          }
        }
      }
    }
    acc.record("unit_coupling", worst);
  }

  // Chain rules over distinct triples sharing the middle index.
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      for (int m = 0; m < n; ++m) {
        if (m == j || m == k) continue;
        acc.record("EE_chain",
                   (bracket(E(j, k), E(k, m)) - E(j, m)).cwiseAbs().maxCoeff());
        acc.record("FF_chain",
                   (bracket(F(j, k), F(k, m)) + E(j, m)).cwiseAbs().maxCoeff());
        acc.record("EF_chain",
                   (bracket(E(j, k), F(k, m)) - F(j, m)).cwiseAbs().maxCoeff());
      }
      acc.record("EF_same_pair",
                 (bracket(E(j, k), F(j, k)) - 2.0 * D(j, k))
                     .cwiseAbs()
                     .maxCoeff());
    }
  }

  // Drift relations on every cross-shell pair of the block.
  const double two_ell_plus_2 = 2.0 * (ell + 1);
  for (int k = -ell; k <= ell; ++k) {
    for (int h = -(ell + 1); h <= ell + 1; ++h) {
      const int j0 = block.local_index({ell, k});
      const int k0 = block.local_index({ell + 1, h});
      acc.record("drift_E",
                 (bracket(block.drift, E(j0, k0)) - two_ell_plus_2 * F(j0, k0))
                     .cwiseAbs()
                     .maxCoeff());
      acc.record("drift_F",
                 (bracket(block.drift, F(j0, k0)) + two_ell_plus_2 * E(j0, k0))
                     .cwiseAbs()
                     .maxCoeff());
    }
  }

  // Mixed [E,E] couplings across adjacent m.
  for (int m = -ell; m <= ell; ++m) {
    const int a = block.local_index({ell, m});
    const int b = block.local_index({ell + 1, m});
    if (m - 1 >= -(ell + 1)) {
      const int c = block.local_index({ell + 1, m - 1});
      acc.record("EE_adjacent_left",
                 (bracket(E(a, b), E(a, c)) - E(c, b)).cwiseAbs().maxCoeff());
    }
    if (m + 1 <= ell) {
      const int c = block.local_index({ell, m + 1});
      const int d = block.local_index({ell + 1, m});
      acc.record("EE_adjacent_right",
                 (bracket(E(a, b), E(c, d)) - E(a, c)).cwiseAbs().maxCoeff());
    }
  }

  return acc.rows;
}

double verify_ad_formula(int ell, int j_max) {
  if (ell < 0 || j_max < 0 || j_max > 4) {
    throw std::invalid_argument("verify_ad_formula: need ell >= 0, j_max <= 4");
  }
  const OperatorSet ops = build_operators(ell + 1);
  const TwoShellBlock block = two_shell_block(ops, ell);
  const int n = block.dim;

  double worst = 0.0;
  Matrix iterated = block.drift;  // ad^0; the loop keeps it at ad^{2j} on entry
  for (int j = 0; j <= j_max; ++j) {
    iterated = bracket(block.b3, iterated);  // ad^{2j+1}

    Matrix closed = Matrix::Zero(n, n);
    const double prefactor =
        (j % 2 == 0 ? 1.0 : -1.0) * (ell + 1) * std::pow(2.0, 2 * j + 1);
    for (int m = -ell; m <= ell; ++m) {
      const double pm = p_coeff(ell, m);
      closed += prefactor * std::pow(pm, 2 * j + 1) *
                elementary(ElementaryKind::E, n, block.local_index({ell, m}),
                           block.local_index({ell + 1, m}));
    }
    const double scale = std::max(1.0, closed.norm());
    worst = std::max(worst, (iterated - closed).norm() / scale);
    iterated = bracket(block.b3, iterated);  // ad^{2j+2}, ready for next j
  }
  return worst;
}

bool check_compatible_generator(const OperatorSet& ops, int n, double sigma,
                                const std::array<double, 3>& v, int N_check) {
  if (n < 1 || N_check < n || N_check > ops.dim()) {
    throw std::invalid_argument(
        "check_compatible_generator: need 1 <= n <= N_check <= dim");
  }
  bool sigma_is_gap = false;
  for (int j = 0; j < N_check && !sigma_is_gap; ++j) {
    for (int k = 0; k < N_check; ++k) {
      if (std::abs(std::abs(ops.lambda[j] - ops.lambda[k]) - sigma) < 1e-12 &&
          std::abs(ops.lambda[j] - ops.lambda[k]) > 1e-12) {
        sigma_is_gap = true;
        break;
      }
    }
  }
  if (!sigma_is_gap) {
    throw std::invalid_argument(
        "check_compatible_generator: sigma is not a spectral gap at N_check");
  }

  const Matrix vb = v[0] * ops.b1 + v[1] * ops.b2 + v[2] * ops.b3;
  for (int j = 0; j < n; ++j) {
    for (int k = n; k < N_check; ++k) {
      if (std::abs(std::abs(ops.lambda[j] - ops.lambda[k]) - sigma) < 1e-12 &&
          std::abs(vb(j, k)) > 1e-12) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace rotor
