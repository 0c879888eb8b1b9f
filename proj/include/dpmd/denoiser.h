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

#ifndef DPMD_DENOISER_H_
#define DPMD_DENOISER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "dpmd/linalg.h"
#include "dpmd/neighbors.h"
#include "dpmd/point_cloud.h"
#include "dpmd/privacy.h"
#include "dpmd/random.h"

namespace dpmd {

// h = max{5 (ln n / n)^(1/(d+1)), 2 sqrt(sigma)}, natural logarithm.
double DefaultBandwidth(int n, int d, double sigma);

// Sample covariance (1 / (n_z - 1) normalization) of the references inside
// the closed ball B(z, h). Fewer than two neighbors give the zero matrix.
struct LocalCovariance {
  SymMatrix covariance;
  int count;
};
LocalCovariance ComputeLocalCovariance(const Points& refs,
                                       const RadiusIndex& index,
                                       const Vector& z, double h);

// Normalized compactly supported weights
//   alpha_i(x) proportional to (1 - |x - y_i|^2 / h^2)_+^beta.
// `support` is ascending and holds only strictly positive weights.
struct KernelWeights {
  std::vector<int> support;
  std::vector<double> alpha;

  bool empty() const { return support.empty(); }
};

KernelWeights ComputeKernelWeights(const RadiusIndex& index, const Vector& x,
                                   double h, double beta);

// Weights from an already computed neighbor list.
KernelWeights KernelWeightsFromNeighbors(const std::vector<Neighbor>& nbrs,
                                         double h, double beta);

// sum_i alpha_i y_i. Empty support is an error.
absl::StatusOr<Vector> WeightedMean(const Points& refs,
                                    const KernelWeights& weights);

// Non-private tangent projectors at every reference point, computed once with
// the same bandwidth as the kernel weights. References with fewer than
// `min_neighbors` neighbors are marked absent.
class ReferenceProjectors {
 public:
  static absl::StatusOr<ReferenceProjectors> Compute(const Points& refs,
                                                     const RadiusIndex& index,
                                                     int d, double h,
                                                     int min_neighbors);

  int size() const { return static_cast<int>(present_.size()); }
  int ambient_dim() const { return dim_; }
  int rank() const { return rank_; }
  bool present(int i) const { return present_[i] != 0; }
  int absent_count() const;

  // Orthonormal D x d basis for reference i (present only).
  Eigen::Map<const Matrix> basis(int i) const {
    return Eigen::Map<const Matrix>(
        &bases_[static_cast<size_t>(i) * dim_ * rank_], dim_, rank_);
  }
  Projector projector(int i) const;

 private:
  ReferenceProjectors() = default;

  int dim_ = 0;
  int rank_ = 0;
  std::vector<char> present_;
  std::vector<double> bases_;  // column-major D x d blocks
};

// sum_i alpha_i P_{y_i} over the support entries whose projector is present,
// with the weights renormalized over those entries. Errors when no support
// entry has a projector.
absl::StatusOr<SymMatrix> WeightedProjector(const ReferenceProjectors& projs,
                                            const KernelWeights& weights);

// x' = x - (I - P)(x - b).
Vector DenoiseStep(const Vector& x, const Projector& p, const Vector& b);

// Adds symmetric Gaussian noise of the given scale to `summary` and returns
// the projector onto the top-d eigenvectors of the sum. A zero scale draws no
// randomness.
absl::StatusOr<Projector> PrivatizeProjector(const SymMatrix& summary, int d,
                                             double scale, RandomStream& rng);

// How a standalone DP projector picks its noise scale.
struct NonPrivate {};
struct ZcdpNoise {
  double rho;
};
struct ApproxDpNoise {
  double epsilon;
  double delta;
  double c1 = 1.25;
};
using NoiseCalibration = std::variant<NonPrivate, ZcdpNoise, ApproxDpNoise>;

struct DpProjectorOptions {
  int d = 1;
  double h = 1.0;
  double c_proj = 1.0;
  // Defaults to d + 1.
  std::optional<int> min_neighbors;
  NoiseCalibration calibration = NonPrivate{};
};

struct DpProjectorResult {
  Projector projector;
  double noise_scale;
  int neighbor_count;
};

// Private local tangent projector at a public point z: local covariance,
// top-d projector, symmetric Gaussian noise calibrated to c_proj / (n h^d),
// and re-truncation to rank d. Neighborhoods smaller than min_neighbors fail
// with kFailedPrecondition before any noise is drawn.
absl::StatusOr<DpProjectorResult> DpProjector(const Points& refs,
                                              const RadiusIndex& index,
                                              const Vector& z,
                                              const DpProjectorOptions& options,
                                              RandomStream& rng);

struct DenoiseConfig {
  // Bandwidth; when unset it follows DefaultBandwidth with `sigma`.
  std::optional<double> h;
  // Reference noise level, needed only for the automatic bandwidth.
  std::optional<double> sigma;
  int d = 1;
  int steps = 3;
  double beta = 2.0;
  double theta = 0.5;
  // Unset means the non-private denoiser (all noise scales zero).
  std::optional<PrivacyBudget> budget;
  double c_proj = 1.0;
  double c_mean = 1.0;
  double c1 = 1.25;
  uint64_t seed = 0;
  // Defaults to d + 1.
  std::optional<int> min_neighbors;
  bool record_trajectory = false;
};

absl::Status ValidateConfig(const DenoiseConfig& cfg, int ambient_dim);

// Immutable reference-side state shared by every query: the references, their
// radius index and the cached tangent projectors.
class ReferenceModel {
 public:
  static absl::StatusOr<ReferenceModel> Build(const PointCloud& refs, int d,
                                              double h, int min_neighbors);

  const Points& points() const { return points_; }
  const RadiusIndex& index() const { return index_; }
  const ReferenceProjectors& projectors() const { return projectors_; }
  int size() const { return static_cast<int>(points_.rows()); }
  int dim() const { return static_cast<int>(points_.cols()); }
  int intrinsic_dim() const { return d_; }
  double bandwidth() const { return h_; }
  int min_neighbors() const { return min_neighbors_; }

 private:
  ReferenceModel(Points points, RadiusIndex index,
                 ReferenceProjectors projectors, int d, double h,
                 int min_neighbors)
      : points_(std::move(points)),
        index_(std::move(index)),
        projectors_(std::move(projectors)),
        d_(d),
        h_(h),
        min_neighbors_(min_neighbors) {}

  Points points_;
  RadiusIndex index_;
  ReferenceProjectors projectors_;
  int d_;
  double h_;
  int min_neighbors_;
};

enum class QueryStatus { kDenoised, kNoNeighbor };
std::string QueryStatusName(QueryStatus status);

struct StepRecord {
  double sigma_projector = 0.0;
  double sigma_mean = 0.0;
  double rho_projector = 0.0;
  double rho_mean = 0.0;
  // Number of references with positive kernel weight.
  int support = 0;
};

struct QueryResult {
  QueryStatus status = QueryStatus::kDenoised;
  Vector initial;
  // Equals `initial` bit for bit when status is kNoNeighbor.
  Vector final_point;
  // Last iterate reached before stopping; differs from final_point only when
  // a trajectory ran into an empty region after some steps.
  Vector last_iterate;
  std::vector<StepRecord> steps;
  // Iterates x^(0), ..., x^(executed steps); filled on request.
  std::vector<Vector> trajectory;
};

struct DenoiseReport {
  std::vector<QueryResult> queries;
  DenoiseConfig config;
  double bandwidth = 0.0;
  int min_neighbors = 0;
  int reference_count = 0;
  int absent_reference_projectors = 0;
  bool nonprivate = true;
  double rho_total = 0.0;
  double rho_spent = 0.0;
  // Budget scheduled for steps that never ran.
  double rho_unspent = 0.0;
  // (epsilon, delta) implied by the budget actually spent.
  double realized_epsilon = 0.0;
  double delta = 0.0;
  // Noise is calibrated to high-probability sensitivity bounds, so the
  // guarantee holds on that event.
  bool event_conditional_calibration = true;
  double wall_seconds = 0.0;

  Points FinalPoints() const;
};

// Private manifold denoiser: for every query, T fixed-point normal
// corrections using a DP kernel-weighted projector and a DP kernel-weighted
// mean, with zCDP noise drawn from substreams keyed by (query, step,
// mechanism).
absl::StatusOr<DenoiseReport> DenoiseQueries(const ReferenceModel& model,
                                             const PointCloud& queries,
                                             const DenoiseConfig& cfg);

// Builds the reference model from `refs` and runs the denoiser.
absl::StatusOr<DenoiseReport> DenoiseQueries(const PointCloud& refs,
                                             const PointCloud& queries,
                                             const DenoiseConfig& cfg);

// The bandwidth a config resolves to for n references.
absl::StatusOr<double> ResolveBandwidth(const DenoiseConfig& cfg, int n);

}  // namespace dpmd

#endif  // DPMD_DENOISER_H_
