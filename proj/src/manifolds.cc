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

#include "dpmd/manifolds.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace dpmd {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSwissRollStart = 1.5 * kPi;
constexpr int kSwissRollGrid = 2048;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double SwissRollEnd(const SwissRoll& roll) {
  return kSwissRollStart + 2.0 * kPi * roll.turns;
}

double SwissRollScale(const SwissRoll& roll) {
  return 1.0 / (2.0 * SwissRollEnd(roll));
}

// Squared distance in the (x, z) plane between `x` and the roll curve at t.
double SwissRollCurveDistance2(double scale, double px, double pz, double t) {
  const double dx = px - scale * t * std::cos(t);
  const double dz = pz - scale * t * std::sin(t);
  return dx * dx + dz * dz;
}

// Minimizes the curve distance over [start, end] from a uniform grid seed
// refined by golden-section search.
double SwissRollNearestParameter(const SwissRoll& roll, double px, double pz) {
  const double t0 = kSwissRollStart;
  const double t1 = SwissRollEnd(roll);
  const double scale = SwissRollScale(roll);
  const double step = (t1 - t0) / (kSwissRollGrid - 1);
  int best = 0;
  double best_f = SwissRollCurveDistance2(scale, px, pz, t0);
  for (int k = 1; k < kSwissRollGrid; ++k) {
    const double f = SwissRollCurveDistance2(scale, px, pz, t0 + k * step);
    if (f < best_f) {
      best_f = f;
      best = k;
    }
  }
  double a = t0 + std::max(best - 1, 0) * step;
  double b = t0 + std::min(best + 1, kSwissRollGrid - 1) * step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = SwissRollCurveDistance2(scale, px, pz, c);
  double fd = SwissRollCurveDistance2(scale, px, pz, d);
  for (int iter = 0; iter < 200 && (b - a) > 1e-14 * t1; ++iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = SwissRollCurveDistance2(scale, px, pz, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = SwissRollCurveDistance2(scale, px, pz, d);
    }
  }
  double t = 0.5 * (a + b);
  if (SwissRollCurveDistance2(scale, px, pz, t) > best_f) t = t0 + best * step;
  return t;
}

// Radial projection onto a round sphere of the given radius in the first
// `k` coordinates.
absl::StatusOr<Vector> RadialProjection(const Vector& x, int k, double radius,
                                        const char* what) {
  const double norm = x.head(k).norm();
  if (!(norm > 1e-12 * radius)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s projection undefined at the center (reach violation)", what));
  }
  Vector p = Vector::Zero(x.size());
  p.head(k) = x.head(k) * (radius / norm);
  return p;
}

}  // namespace

absl::StatusOr<ManifoldSpec> ManifoldSpec::Create(ManifoldShape shape,
                                                  int ambient_dim) {
  absl::Status status = std::visit(
      Overloaded{
          [](const Circle& c) {
            return c.radius > 0 ? absl::OkStatus()
                                : absl::InvalidArgumentError(
                                      "circle radius must be positive");
          },
          [](const Torus& t) {
            return (t.major_radius > t.minor_radius && t.minor_radius > 0)
                       ? absl::OkStatus()
                       : absl::InvalidArgumentError(
                             "torus requires major_radius > minor_radius > 0");
          },
          [](const SwissRoll& s) {
            return (s.turns > 0 && s.height > 0)
                       ? absl::OkStatus()
                       : absl::InvalidArgumentError(
                             "swiss roll turns and height must be positive");
          },
          [](const Sphere& s) {
            return s.radius > 0 ? absl::OkStatus()
                                : absl::InvalidArgumentError(
                                      "sphere radius must be positive");
          },
      },
      shape);
  if (!status.ok()) return status;
  ManifoldSpec spec(shape, ambient_dim);
  const int min_dim = spec.intrinsic_dim() + 1;
  if (ambient_dim < min_dim) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s needs ambient dimension >= %d, got %d", spec.name(), min_dim,
        ambient_dim));
  }
  return spec;
}

int ManifoldSpec::intrinsic_dim() const {
  return std::holds_alternative<Circle>(shape_) ? 1 : 2;
}

std::string ManifoldName(const ManifoldShape& shape) {
  return std::visit(Overloaded{
                        [](const Circle&) { return "circle"; },
                        [](const Torus&) { return "torus"; },
                        [](const SwissRoll&) { return "swissroll"; },
                        [](const Sphere&) { return "sphere"; },
                    },
                    shape);
}

absl::StatusOr<PointCloud> SampleManifold(const ManifoldSpec& spec, int n,
                                          RandomStream& rng) {
  if (n < 1) {
    return absl::InvalidArgumentError("sample count must be at least 1");
  }
  const int dim = spec.ambient_dim();
  Points pts = Points::Zero(n, dim);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    std::visit(
        Overloaded{
            [&](const Circle& c) {
              const double a = 2.0 * kPi * unit(rng);
              pts(i, 0) = c.radius * std::cos(a);
              pts(i, 1) = c.radius * std::sin(a);
            },
            [&](const Torus& t) {
              const double u = 2.0 * kPi * unit(rng);
              const double v = 2.0 * kPi * unit(rng);
              const double ring = t.major_radius + t.minor_radius * std::cos(v);
              pts(i, 0) = ring * std::cos(u);
              pts(i, 1) = ring * std::sin(u);
              pts(i, 2) = t.minor_radius * std::sin(v);
            },
            [&](const SwissRoll& s) {
              const double t0 = kSwissRollStart;
              const double t = t0 + (SwissRollEnd(s) - t0) * unit(rng);
              const double scale = SwissRollScale(s);
              pts(i, 0) = scale * t * std::cos(t);
              pts(i, 1) = s.height * (unit(rng) - 0.5);
              pts(i, 2) = scale * t * std::sin(t);
            },
            [&](const Sphere& s) {
              const double phi = 2.0 * kPi * unit(rng);
              const double z = 2.0 * unit(rng) - 1.0;
              const double ring = std::sqrt(std::max(0.0, 1.0 - z * z));
              pts(i, 0) = s.radius * ring * std::cos(phi);
              pts(i, 1) = s.radius * ring * std::sin(phi);
              pts(i, 2) = s.radius * z;
            },
        },
        spec.shape());
  }
  return PointCloud::Create(std::move(pts));
}

Vector SampleNoise(const NoiseModel& model, int dim, RandomStream& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector e(dim);
  for (int j = 0; j < dim; ++j) e[j] = normal(rng);
  if (model.kind == NoiseKind::kGaussian) {
    return e * (model.sigma / std::sqrt(dim + 2.0));
  }
  // Direction uniform on the sphere, radius sigma * u^(1/D).
  double norm = e.norm();
  while (norm == 0.0) {
    for (int j = 0; j < dim; ++j) e[j] = normal(rng);
    norm = e.norm();
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = model.sigma * std::pow(unit(rng), 1.0 / dim);
  e *= radius / norm;
  // Rounding can overshoot the ball by an ulp.
  for (double len = e.norm(); len > model.sigma; len = e.norm()) {
    e *= std::nextafter(model.sigma / len, 0.0);
  }
  return e;
}

absl::StatusOr<PointCloud> AddNoise(const PointCloud& pc,
                                    const NoiseModel& model,
                                    RandomStream& rng) {
  if (!(model.sigma > 0) || !std::isfinite(model.sigma)) {
    return absl::InvalidArgumentError("noise sigma must be positive");
  }
  Points noisy = pc.coords();
  for (int i = 0; i < pc.size(); ++i) {
    noisy.row(i) += SampleNoise(model, pc.dim(), rng).transpose();
  }
  return PointCloud::Create(std::move(noisy), pc.coords());
}

absl::StatusOr<Vector> ProjectToManifold(const ManifoldSpec& spec,
                                         const Vector& x) {
  if (x.size() != spec.ambient_dim()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "point has dimension %d, manifold lives in R^%d", x.size(),
        spec.ambient_dim()));
  }
  if (!x.allFinite()) {
    return absl::InvalidArgumentError("point has non-finite coordinates");
  }
  return std::visit(
      Overloaded{
          [&](const Circle& c) -> absl::StatusOr<Vector> {
            return RadialProjection(x, 2, c.radius, "circle");
          },
          [&](const Sphere& s) -> absl::StatusOr<Vector> {
            return RadialProjection(x, 3, s.radius, "sphere");
          },
          [&](const Torus& t) -> absl::StatusOr<Vector> {
            const double rho = std::hypot(x[0], x[1]);
            if (!(rho > 1e-12 * t.major_radius)) {
              return absl::InvalidArgumentError(
                  "torus projection undefined on the symmetry axis (reach "
                  "violation)");
            }
            Eigen::Vector3d core(t.major_radius * x[0] / rho,
                                 t.major_radius * x[1] / rho, 0.0);
            Eigen::Vector3d w = x.head<3>() - core;
            const double wn = w.norm();
            if (!(wn > 1e-12 * t.minor_radius)) {
              return absl::InvalidArgumentError(
                  "torus projection undefined on the core circle (reach "
                  "violation)");
            }
            Vector p = Vector::Zero(x.size());
            p.head<3>() = core + w * (t.minor_radius / wn);
            return p;
          },
          [&](const SwissRoll& s) -> absl::StatusOr<Vector> {
            const double t = SwissRollNearestParameter(s, x[0], x[2]);
            const double scale = SwissRollScale(s);
            Vector p = Vector::Zero(x.size());
            p[0] = scale * t * std::cos(t);
            p[1] = std::clamp(x[1], -0.5 * s.height, 0.5 * s.height);
            p[2] = scale * t * std::sin(t);
            return p;
          },
      },
      spec.shape());
}

absl::StatusOr<double> DistanceToManifold(const ManifoldSpec& spec,
                                          const Vector& x) {
  absl::StatusOr<Vector> p = ProjectToManifold(spec, x);
  if (!p.ok()) return p.status();
  return (x - *p).norm();
}

}  // namespace dpmd
