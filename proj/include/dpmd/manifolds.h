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

#ifndef DPMD_MANIFOLDS_H_
#define DPMD_MANIFOLDS_H_

#include <string>
#include <variant>

#include "absl/status/statusor.h"
#include "dpmd/linalg.h"
#include "dpmd/point_cloud.h"
#include "dpmd/random.h"

namespace dpmd {

// Synthetic ground-truth manifolds. Each one lives in the first two or three
// coordinates of R^D; remaining coordinates are zero on the manifold.

struct Circle {
  double radius = 1.0;
};

struct Torus {
  double major_radius = 2.0;
  double minor_radius = 0.5;
};

// The curve (t cos t, t sin t) for t in [1.5 pi, 1.5 pi + 2 pi turns], scaled
// so the outermost turn has unit diameter, swept along the second coordinate
// over [-height / 2, height / 2]. Coordinates are (x, height, z).
struct SwissRoll {
  double turns = 1.5;
  double height = 1.0;
};

struct Sphere {
  double radius = 1.0;
};

using ManifoldShape = std::variant<Circle, Torus, SwissRoll, Sphere>;

// "circle", "torus", "swissroll" or "sphere".
std::string ManifoldName(const ManifoldShape& shape);

class ManifoldSpec {
 public:
  static absl::StatusOr<ManifoldSpec> Create(ManifoldShape shape,
                                             int ambient_dim);

  const ManifoldShape& shape() const { return shape_; }
  int ambient_dim() const { return ambient_dim_; }
  int intrinsic_dim() const;
  std::string name() const { return ManifoldName(shape_); }

 private:
  ManifoldSpec(ManifoldShape shape, int ambient_dim)
      : shape_(shape), ambient_dim_(ambient_dim) {}

  ManifoldShape shape_;
  int ambient_dim_;
};

enum class NoiseKind { kBoundedBall, kGaussian };

// kBoundedBall: uniform in the closed D-ball of radius sigma.
// kGaussian: i.i.d. N(0, sigma^2 / (D + 2)) coordinates, which matches the
// second moment E|e|^2 = sigma^2 D / (D + 2) of the bounded model.
struct NoiseModel {
  NoiseKind kind = NoiseKind::kBoundedBall;
  double sigma = 0.1;
};

// `n` points drawn uniformly in the manifold's natural parameters (angles for
// circle and torus, (t, height) for the Swiss roll) and uniformly by area on
// the sphere.
absl::StatusOr<PointCloud> SampleManifold(const ManifoldSpec& spec, int n,
                                          RandomStream& rng);

// Perturbs every row; the result carries `pc.coords()` as its clean companion.
absl::StatusOr<PointCloud> AddNoise(const PointCloud& pc,
                                    const NoiseModel& model, RandomStream& rng);

// Draws a single perturbation vector in R^dim.
Vector SampleNoise(const NoiseModel& model, int dim, RandomStream& rng);

// Nearest point on the manifold. Inputs with no unique nearest point (the
// center of a circle or sphere, the axis or core circle of a torus) are
// rejected.
absl::StatusOr<Vector> ProjectToManifold(const ManifoldSpec& spec,
                                         const Vector& x);

absl::StatusOr<double> DistanceToManifold(const ManifoldSpec& spec,
                                          const Vector& x);

}  // namespace dpmd

#endif  // DPMD_MANIFOLDS_H_
