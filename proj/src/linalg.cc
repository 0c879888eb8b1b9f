// Copyright 2026 The DP Manifold Denoising Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpmd/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "glog/logging.h"

namespace dpmd {
namespace {

bool AllFinite(const Matrix& m) { return m.allFinite(); }

absl::Status CheckSquareFinite(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "symmetric matrix must be square and non-empty, got %dx%d", m.rows(),
        m.cols()));
  }
  if (!AllFinite(m)) {
    return absl::InvalidArgumentError("matrix has non-finite entries");
  }
  return absl::OkStatus();
}

// Flips `v` so that its largest-magnitude entry is positive.
void FixSign(Eigen::Ref<Vector> v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (v[best] < 0.0) v = -v;
}

}  // namespace

SymMatrix::SymMatrix(int dim) : entries_(Matrix::Zero(dim, dim)) {}

absl::StatusOr<SymMatrix> SymMatrix::Create(const Matrix& m) {
  if (absl::Status s = CheckSquareFinite(m); !s.ok()) return s;
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    for (Eigen::Index k = j + 1; k < m.cols(); ++k) {
      if (m(j, k) != m(k, j)) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "matrix is not symmetric at (%d, %d): %g vs %g", j, k, m(j, k),
            m(k, j)));
      }
    }
  }
  return SymMatrix(m);
}

absl::StatusOr<SymMatrix> SymMatrix::FromUpperTriangle(const Matrix& m) {
  if (absl::Status s = CheckSquareFinite(m); !s.ok()) return s;
  Matrix sym = m.triangularView<Eigen::Upper>();
  sym.triangularView<Eigen::StrictlyLower>() =
      m.transpose().triangularView<Eigen::StrictlyLower>();
  return SymMatrix(std::move(sym));
}

void SymMatrix::Set(int j, int k, double value) {
  entries_(j, k) = value;
  entries_(k, j) = value;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  entries_ += other.entries_;
  return *this;
}

absl::StatusOr<Projector> Projector::FromBasis(Matrix basis) {
  if (basis.rows() == 0 || basis.cols() == 0 || basis.cols() > basis.rows()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "projector basis must be D x d with 1 <= d <= D, got %dx%d",
        basis.rows(), basis.cols()));
  }
  if (!basis.allFinite()) {
    return absl::InvalidArgumentError("projector basis has non-finite entries");
  }
  const Matrix gram = basis.transpose() * basis;
  const double dev =
      (gram - Matrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  if (dev > 1e-10) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "projector basis is not orthonormal (deviation %g)", dev));
  }
  return Projector(std::move(basis));
}

absl::StatusOr<EigenDecomposition> SymEigh(const SymMatrix& s) {
  if (!s.matrix().allFinite()) {
    return absl::InvalidArgumentError("eigendecomposition input is not finite");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s.matrix());
  if (solver.info() != Eigen::Success) {
    return absl::InternalError("symmetric eigensolver did not converge");
  }
  const int n = s.dim();
  EigenDecomposition out{Vector(n), Matrix(n, n)};
  // The solver sorts ascending.
  for (int i = 0; i < n; ++i) {
    out.values[i] = solver.eigenvalues()[n - 1 - i];
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    FixSign(out.vectors.col(i));
  }
  return out;
}

Projector TopEigenvectorProjector(const EigenDecomposition& eig, int d) {
  const int n = static_cast<int>(eig.values.size());
  if (d < n) {
    const double gap = eig.values[d - 1] - eig.values[d];
    const double scale = std::max(std::abs(eig.values[0]),
                                  std::numeric_limits<double>::min());
    if (gap <= 4.0 * std::numeric_limits<double>::epsilon() * scale) {
      LOG_EVERY_N(WARNING, 1000)
          << "degenerate spectrum at the rank-" << d
          << " cut (lambda_d = " << eig.values[d - 1]
          << ", lambda_{d+1} = " << eig.values[d]
          << "); projector follows the eigensolver's basis choice";
    }
  }
  return Projector(eig.vectors.leftCols(d));
}

absl::StatusOr<Projector> TopDProjector(const SymMatrix& s, int d) {
  if (d < 1 || d > s.dim()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "projector rank %d outside [1, %d]", d, s.dim()));
  }
  absl::StatusOr<EigenDecomposition> eig = SymEigh(s);
  if (!eig.ok()) return eig.status();
  return TopEigenvectorProjector(*eig, d);
}

absl::StatusOr<double> PrincipalAngleDistance(const Projector& p,
                                              const Projector& q) {
  if (p.ambient_dim() != q.ambient_dim()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "projectors live in different ambient dimensions (%d vs %d)",
        p.ambient_dim(), q.ambient_dim()));
  }
  const Matrix diff = p.Induced() - q.Induced();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(diff, Eigen::EigenvaluesOnly);
  const double norm = solver.eigenvalues().cwiseAbs().maxCoeff();
  if (p.rank() == q.rank()) return std::min(norm, 1.0);
  return norm;
}

SymMatrix SampleSymmetricGaussian(int dim, double scale, RandomStream& rng) {
  SymMatrix w(dim);
  if (scale == 0.0) return w;
  std::normal_distribution<double> normal(0.0, scale);
  for (int j = 0; j < dim; ++j) {
    for (int k = j; k < dim; ++k) {
      w.Set(j, k, normal(rng));
    }
  }
  return w;
}

}  // namespace dpmd
