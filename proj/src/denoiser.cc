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

#include "dpmd/denoiser.h"

#include <chrono>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace dpmd {
namespace {

// Covariance of the listed rows with 1 / (k - 1) normalization; zero for
// k <= 1.
// Ball members gathered row-major in tree order.
struct BallRows {
  std::vector<double> data;
  int count = 0;
};

void GatherBall(const RadiusIndex& index, const Vector& z, double h,
                BallRows& out) {
  out.data.clear();
  out.count = 0;
  index.ForEachInBall(z, h, [&](int, const double* row, double) {
    out.data.insert(out.data.end(), row, row + index.dim());
    ++out.count;
  });
}

SymMatrix CovarianceOfBall(const BallRows& ball, int dim) {
  const int k = ball.count;
  if (k <= 1) return SymMatrix(dim);
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> rows(ball.data.data(), k, dim);
  const Eigen::RowVectorXd mean = rows.colwise().sum() / k;
  Matrix upper = Matrix::Zero(dim, dim);
  upper.selfadjointView<Eigen::Upper>().rankUpdate(
      (rows.rowwise() - mean).transpose(), 1.0 / (k - 1));
  return *SymMatrix::FromUpperTriangle(upper);
}

int MinNeighbors(const std::optional<int>& configured, int d) {
  return configured.value_or(d + 1);
}

}  // namespace

double DefaultBandwidth(int n, int d, double sigma) {
  const double dn = static_cast<double>(n);
  const double density_branch =
      5.0 * std::pow(std::log(dn) / dn, 1.0 / (d + 1));
  return std::max(density_branch, 2.0 * std::sqrt(std::max(sigma, 0.0)));
}

absl::StatusOr<double> ResolveBandwidth(const DenoiseConfig& cfg, int n) {
  if (cfg.h.has_value()) {
    if (!(*cfg.h > 0.0) || !std::isfinite(*cfg.h)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("bandwidth must be positive, got %g", *cfg.h));
    }
    return *cfg.h;
  }
  if (!cfg.sigma.has_value()) {
    return absl::InvalidArgumentError(
        "automatic bandwidth needs the reference noise level sigma");
  }
  if (n < 2) {
    return absl::InvalidArgumentError(
        "automatic bandwidth needs at least two references");
  }
  return DefaultBandwidth(n, cfg.d, *cfg.sigma);
}

LocalCovariance ComputeLocalCovariance(const Points& refs,
                                       const RadiusIndex& index,
                                       const Vector& z, double h) {
  BallRows ball;
  GatherBall(index, z, h, ball);
  return LocalCovariance{CovarianceOfBall(ball, static_cast<int>(refs.cols())),
                         ball.count};
}

KernelWeights KernelWeightsFromNeighbors(const std::vector<Neighbor>& nbrs,
                                         double h, double beta) {
  KernelWeights w;
  const double h2 = h * h;
  double total = 0.0;
  for (const Neighbor& nb : nbrs) {
    const double base = 1.0 - nb.squared_distance / h2;
    if (!(base > 0.0)) continue;
    const double raw = std::pow(base, beta);
    if (!(raw > 0.0)) continue;
    w.support.push_back(nb.index);
    w.alpha.push_back(raw);
    total += raw;
  }
  for (double& a : w.alpha) a /= total;
  return w;
}

KernelWeights ComputeKernelWeights(const RadiusIndex& index, const Vector& x,
                                   double h, double beta) {
  return KernelWeightsFromNeighbors(index.RadiusQueryWithDistances(x, h), h,
                                    beta);
}

absl::StatusOr<Vector> WeightedMean(const Points& refs,
                                    const KernelWeights& weights) {
  if (weights.empty()) {
    return absl::FailedPreconditionError("weighted mean of an empty support");
  }
  Vector mean = Vector::Zero(refs.cols());
  for (size_t k = 0; k < weights.support.size(); ++k) {
    mean += weights.alpha[k] * refs.row(weights.support[k]).transpose();
  }
  return mean;
}

absl::StatusOr<ReferenceProjectors> ReferenceProjectors::Compute(
    const Points& refs, const RadiusIndex& index, int d, double h,
    int min_neighbors) {
  const int dim = static_cast<int>(refs.cols());
  if (d < 1 || d > dim) {
    return absl::InvalidArgumentError(
        absl::StrFormat("intrinsic dimension %d outside [1, %d]", d, dim));
  }
  if (index.size() != refs.rows() || index.dim() != dim) {
    return absl::InvalidArgumentError("index does not match the references");
  }
  ReferenceProjectors out;
  out.dim_ = dim;
  out.rank_ = d;
  out.present_.assign(refs.rows(), 0);
  out.bases_.assign(static_cast<size_t>(refs.rows()) * dim * d, 0.0);
  BallRows ball;
  for (int i = 0; i < refs.rows(); ++i) {
    GatherBall(index, refs.row(i).transpose(), h, ball);
    if (ball.count < min_neighbors) continue;
    absl::StatusOr<Projector> p = TopDProjector(CovarianceOfBall(ball, dim), d);
    if (!p.ok()) return p.status();
    Eigen::Map<Matrix>(&out.bases_[static_cast<size_t>(i) * dim * d], dim, d) =
        p->basis();
    out.present_[i] = 1;
  }
  return out;
}

int ReferenceProjectors::absent_count() const {
  int absent = 0;
  for (char p : present_) absent += p ? 0 : 1;
  return absent;
}

Projector ReferenceProjectors::projector(int i) const {
  return *Projector::FromBasis(Matrix(basis(i)));
}

absl::StatusOr<SymMatrix> WeightedProjector(const ReferenceProjectors& projs,
                                            const KernelWeights& weights) {
  double total = 0.0;
  int used = 0;
  for (size_t k = 0; k < weights.support.size(); ++k) {
    if (projs.present(weights.support[k])) {
      total += weights.alpha[k];
      ++used;
    }
  }
  if (used == 0 || !(total > 0.0)) {
    return absl::FailedPreconditionError(
        "no reference projector in the kernel support");
  }
  const int dim = projs.ambient_dim();
  const int rank = projs.rank();
  // Columns sqrt(alpha_i) V_i, so that B B^T = sum_i alpha_i V_i V_i^T.
  Matrix stacked(dim, static_cast<Eigen::Index>(used) * rank);
  int col = 0;
  for (size_t k = 0; k < weights.support.size(); ++k) {
    const int i = weights.support[k];
    if (!projs.present(i)) continue;
    stacked.middleCols(col, rank) =
        std::sqrt(weights.alpha[k] / total) * projs.basis(i);
    col += rank;
  }
  Matrix upper = Matrix::Zero(dim, dim);
  upper.selfadjointView<Eigen::Upper>().rankUpdate(stacked);
  return SymMatrix::FromUpperTriangle(upper);
}

Vector DenoiseStep(const Vector& x, const Projector& p, const Vector& b) {
  const Vector r = x - b;
  return x - (r - p.Apply(r));
}

absl::StatusOr<Projector> PrivatizeProjector(const SymMatrix& summary, int d,
                                             double scale, RandomStream& rng) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("noise scale must be finite and >= 0, got %g", scale));
  }
  if (scale == 0.0) return TopDProjector(summary, d);
  SymMatrix noisy = summary;
  noisy += SampleSymmetricGaussian(summary.dim(), scale, rng);
  return TopDProjector(noisy, d);
}

absl::StatusOr<DpProjectorResult> DpProjector(const Points& refs,
                                              const RadiusIndex& index,
                                              const Vector& z,
                                              const DpProjectorOptions& options,
                                              RandomStream& rng) {
  const SensitivityParams params{static_cast<int>(refs.rows()), options.h,
                                 options.d, options.c_proj, 1.0};
  if (absl::Status s = ValidateSensitivityParams(params); !s.ok()) return s;
  if (z.size() != refs.cols()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "query has dimension %d, references %d", z.size(), refs.cols()));
  }
  const int min_neighbors = MinNeighbors(options.min_neighbors, options.d);
  LocalCovariance local = ComputeLocalCovariance(refs, index, z, options.h);
  if (local.count < min_neighbors) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "only %d references within h=%g (need %d)", local.count, options.h,
        min_neighbors));
  }
  const double sensitivity = ProjectorSensitivity(params);
  absl::StatusOr<double> scale = std::visit(
      [&](const auto& c) -> absl::StatusOr<double> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, NonPrivate>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ZcdpNoise>) {
          return GaussianScaleForZcdp(sensitivity, c.rho);
        } else {
          return GaussianScaleForApproxDp(sensitivity, c.epsilon, c.delta,
                                          c.c1);
        }
      },
      options.calibration);
  if (!scale.ok()) return scale.status();

  absl::StatusOr<Projector> local_proj =
      TopDProjector(local.covariance, options.d);
  if (!local_proj.ok()) return local_proj.status();
  if (*scale == 0.0) {
    return DpProjectorResult{*std::move(local_proj), 0.0, local.count};
  }
  absl::StatusOr<SymMatrix> induced =
      SymMatrix::FromUpperTriangle(local_proj->Induced());
  if (!induced.ok()) return induced.status();
  absl::StatusOr<Projector> released =
      PrivatizeProjector(*induced, options.d, *scale, rng);
  if (!released.ok()) return released.status();
  return DpProjectorResult{*std::move(released), *scale, local.count};
}

absl::Status ValidateConfig(const DenoiseConfig& cfg, int ambient_dim) {
  if (cfg.d < 1 || cfg.d > ambient_dim) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "intrinsic dimension d=%d outside [1, %d]", cfg.d, ambient_dim));
  }
  if (cfg.steps < 1) {
    return absl::InvalidArgumentError("steps must be at least 1");
  }
  if (!(cfg.beta >= 2.0) || !std::isfinite(cfg.beta)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("kernel exponent beta must be >= 2, got %g", cfg.beta));
  }
  if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "theta must lie strictly inside (0, 1), got %g", cfg.theta));
  }
  if (!(cfg.c_proj > 0.0) || !(cfg.c_mean > 0.0) || !(cfg.c1 > 0.0)) {
    return absl::InvalidArgumentError(
        "c_proj, c_mean and c1 must be positive");
  }
  if (cfg.min_neighbors.has_value() && *cfg.min_neighbors < 1) {
    return absl::InvalidArgumentError("min_neighbors must be at least 1");
  }
  if (cfg.h.has_value() && !(*cfg.h > 0.0)) {
    return absl::InvalidArgumentError("bandwidth must be positive");
  }
  if (!cfg.h.has_value()) {
    if (!cfg.sigma.has_value()) {
      return absl::InvalidArgumentError(
          "automatic bandwidth needs the reference noise level sigma");
    }
    if (!(*cfg.sigma >= 0.0) || !std::isfinite(*cfg.sigma)) {
      return absl::InvalidArgumentError("sigma must be non-negative");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ReferenceModel> ReferenceModel::Build(const PointCloud& refs,
                                                     int d, double h,
                                                     int min_neighbors) {
  if (refs.size() < 1) {
    return absl::InvalidArgumentError("reference cloud is empty");
  }
  if (!(h > 0.0)) {
    return absl::InvalidArgumentError("bandwidth must be positive");
  }
  absl::StatusOr<RadiusIndex> index = RadiusIndex::Build(refs.coords());
  if (!index.ok()) return index.status();
  absl::StatusOr<ReferenceProjectors> projs = ReferenceProjectors::Compute(
      refs.coords(), *index, d, h, min_neighbors);
  if (!projs.ok()) return projs.status();
  return ReferenceModel(refs.coords(), *std::move(index), *std::move(projs), d,
                        h, min_neighbors);
}

std::string QueryStatusName(QueryStatus status) {
  return status == QueryStatus::kDenoised ? "denoised" : "no_neighbor";
}

Points DenoiseReport::FinalPoints() const {
  if (queries.empty()) return Points();
  Points out(queries.size(), queries.front().final_point.size());
  for (size_t q = 0; q < queries.size(); ++q) {
    out.row(q) = queries[q].final_point.transpose();
  }
  return out;
}

absl::StatusOr<DenoiseReport> DenoiseQueries(const ReferenceModel& model,
                                             const PointCloud& queries,
                                             const DenoiseConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const int dim = model.dim();
  if (queries.dim() != dim) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "queries have dimension %d but references have dimension %d",
        queries.dim(), dim));
  }
  if (absl::Status s = ValidateConfig(cfg, dim); !s.ok()) return s;
  absl::StatusOr<double> h = ResolveBandwidth(cfg, model.size());
  if (!h.ok()) return h.status();
  if (*h != model.bandwidth() || cfg.d != model.intrinsic_dim() ||
      MinNeighbors(cfg.min_neighbors, cfg.d) != model.min_neighbors()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "config (h=%g, d=%d, min_neighbors=%d) does not match the reference "
        "model (h=%g, d=%d, min_neighbors=%d)",
        *h, cfg.d, MinNeighbors(cfg.min_neighbors, cfg.d), model.bandwidth(),
        model.intrinsic_dim(), model.min_neighbors()));
  }
  const int m = queries.size();
  const int steps = cfg.steps;

  DenoiseReport report;
  report.config = cfg;
  report.bandwidth = *h;
  report.min_neighbors = model.min_neighbors();
  report.reference_count = model.size();
  report.absent_reference_projectors = model.projectors().absent_count();
  report.nonprivate = !cfg.budget.has_value();

  std::optional<BudgetSchedule> schedule;
  double sigma_p_unit = 0.0;  // sensitivity, scaled per step below
  double sigma_m_unit = 0.0;
  if (cfg.budget.has_value()) {
    absl::StatusOr<BudgetSchedule> s =
        MakeSchedule(*cfg.budget, m, steps, cfg.theta);
    if (!s.ok()) return s.status();
    schedule = *std::move(s);
    const SensitivityParams params{model.size(), *h, cfg.d, cfg.c_proj,
                                   cfg.c_mean};
    sigma_p_unit = ProjectorSensitivity(params);
    sigma_m_unit = MeanSensitivity(params);
    report.rho_total = cfg.budget->rho_total();
    report.delta = cfg.budget->delta();
  }
  PrivacyAccountant ledger(report.rho_total);

  report.queries.resize(m);
  for (int q = 0; q < m; ++q) {
    QueryResult& result = report.queries[q];
    result.initial = queries.Row(q);
    Vector x = result.initial;
    if (cfg.record_trajectory) result.trajectory.push_back(x);
    for (int t = 0; t < steps; ++t) {
      const std::vector<Neighbor> nbrs =
          model.index().RadiusQueryWithDistances(x, *h);
      if (static_cast<int>(nbrs.size()) < model.min_neighbors()) {
        result.status = QueryStatus::kNoNeighbor;
        break;
      }
      const KernelWeights weights =
          KernelWeightsFromNeighbors(nbrs, *h, cfg.beta);
      absl::StatusOr<SymMatrix> aggregated =
          WeightedProjector(model.projectors(), weights);
      if (!aggregated.ok()) {
        result.status = QueryStatus::kNoNeighbor;
        break;
      }
      absl::StatusOr<Vector> mean = WeightedMean(model.points(), weights);
      if (!mean.ok()) return mean.status();

      StepRecord record;
      record.support = static_cast<int>(weights.support.size());
      if (schedule.has_value()) {
        record.rho_projector = schedule->rho_projector(q, t);
        record.rho_mean = schedule->rho_mean(q, t);
        absl::StatusOr<double> sp =
            GaussianScaleForZcdp(sigma_p_unit, record.rho_projector);
        absl::StatusOr<double> sm =
            GaussianScaleForZcdp(sigma_m_unit, record.rho_mean);
        if (!sp.ok()) return sp.status();
        if (!sm.ok()) return sm.status();
        record.sigma_projector = *sp;
        record.sigma_mean = *sm;
      }

      RandomStream proj_rng =
          NoiseStream(cfg.seed, q, t, Mechanism::kProjector);
      absl::StatusOr<Projector> released = PrivatizeProjector(
          *aggregated, cfg.d, record.sigma_projector, proj_rng);
      if (!released.ok()) return released.status();
      if (absl::Status s = ledger.Spend(record.rho_projector); !s.ok()) {
        return s;
      }

      Vector mean_released = *std::move(mean);
      if (record.sigma_mean > 0.0) {
        RandomStream mean_rng = NoiseStream(cfg.seed, q, t, Mechanism::kMean);
        std::normal_distribution<double> normal(0.0, record.sigma_mean);
        for (int j = 0; j < dim; ++j) mean_released[j] += normal(mean_rng);
      }
      if (absl::Status s = ledger.Spend(record.rho_mean); !s.ok()) return s;

      x = DenoiseStep(x, *released, mean_released);
      result.steps.push_back(record);
      if (cfg.record_trajectory) result.trajectory.push_back(x);
    }
    result.last_iterate = x;
    result.final_point =
        result.status == QueryStatus::kNoNeighbor ? result.initial : x;
  }

  report.rho_spent = ledger.spent();
  report.rho_unspent = ledger.remaining();
  if (report.rho_spent > 0.0) {
    absl::StatusOr<double> eps = ZcdpToEpsilon(report.rho_spent, report.delta);
    if (!eps.ok()) return eps.status();
    report.realized_epsilon = *eps;
  }
  report.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return report;
}

absl::StatusOr<DenoiseReport> DenoiseQueries(const PointCloud& refs,
                                             const PointCloud& queries,
                                             const DenoiseConfig& cfg) {
  if (refs.size() < 1) {
    return absl::InvalidArgumentError("reference cloud is empty");
  }
  if (queries.dim() != refs.dim()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "queries have dimension %d but references have dimension %d",
        queries.dim(), refs.dim()));
  }
  if (absl::Status s = ValidateConfig(cfg, refs.dim()); !s.ok()) return s;
  absl::StatusOr<double> h = ResolveBandwidth(cfg, refs.size());
  if (!h.ok()) return h.status();
  absl::StatusOr<ReferenceModel> model = ReferenceModel::Build(
      refs, cfg.d, *h, MinNeighbors(cfg.min_neighbors, cfg.d));
  if (!model.ok()) return model.status();
  return DenoiseQueries(*model, queries, cfg);
}

}  // namespace dpmd
