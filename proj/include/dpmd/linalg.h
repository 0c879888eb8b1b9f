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

#ifndef DPMD_LINALG_H_
#define DPMD_LINALG_H_

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "dpmd/random.h"

namespace dpmd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A dense real symmetric matrix. The stored entries are symmetric bit for bit
// and finite; every constructor enforces both.
class SymMatrix {
 public:
  // Zero matrix of the given dimension.
  explicit SymMatrix(int dim);

  // Accepts `m` only if it is square, finite and exactly symmetric.
  static absl::StatusOr<SymMatrix> Create(const Matrix& m);

  // Builds the symmetric matrix whose upper triangle (diagonal included) is
  // taken from `m`; the strict lower triangle of `m` is ignored. `m` must be
  // square and finite.
  static absl::StatusOr<SymMatrix> FromUpperTriangle(const Matrix& m);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  double operator()(int j, int k) const { return entries_(j, k); }

  // Writes entry (j, k) and its mirror (k, j).
  void Set(int j, int k, double value);

  SymMatrix& operator+=(const SymMatrix& other);

 private:
  explicit SymMatrix(Matrix entries) : entries_(std::move(entries)) {}

  Matrix entries_;
};

// Eigenvalues in descending order with matching orthonormal eigenvectors in
// the columns of `vectors`. In each eigenvector the entry of largest absolute
// value is positive (lowest index wins ties).
struct EigenDecomposition {
  Vector values;
  Matrix vectors;
};

// A rank-d orthogonal projector on R^D, stored through an orthonormal D x d
// basis. Only the induced matrix basis * basis^T is meaningful.
class Projector {
 public:
  // Validates that the columns of `basis` are orthonormal to 1e-10 (max-norm
  // deviation of basis^T basis from the identity).
  static absl::StatusOr<Projector> FromBasis(Matrix basis);

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int rank() const { return static_cast<int>(basis_.cols()); }
  const Matrix& basis() const { return basis_; }

  // The D x D projection matrix.
  Matrix Induced() const { return basis_ * basis_.transpose(); }

  Vector Apply(const Vector& x) const {
    return basis_ * (basis_.transpose() * x);
  }

 private:
  explicit Projector(Matrix basis) : basis_(std::move(basis)) {}
  friend Projector TopEigenvectorProjector(const EigenDecomposition&, int);

  Matrix basis_;
};

absl::StatusOr<EigenDecomposition> SymEigh(const SymMatrix& s);

// Projector onto the span of the top-d eigenvectors of `s`, 1 <= d <= D.
// Exactly degenerate spectra (lambda_d == lambda_{d+1}) are accepted with a
// logged warning; the deterministic eigensolver output decides the subspace.
absl::StatusOr<Projector> TopDProjector(const SymMatrix& s, int d);

// Same, from an existing decomposition.
Projector TopEigenvectorProjector(const EigenDecomposition& eig, int d);

// Spectral norm of P - Q, i.e. the sine of the largest principal angle
// between the two subspaces when the ranks agree.
absl::StatusOr<double> PrincipalAngleDistance(const Projector& p,
                                              const Projector& q);

// Symmetric D x D matrix with W(j,k) = W(k,j) ~ N(0, scale^2) drawn
// independently for j <= k. Diagonal entries share the off-diagonal variance.
SymMatrix SampleSymmetricGaussian(int dim, double scale, RandomStream& rng);

}  // namespace dpmd

#endif  // DPMD_LINALG_H_
