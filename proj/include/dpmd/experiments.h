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

#ifndef DPMD_EXPERIMENTS_H_
#define DPMD_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmd/denoiser.h"
#include "dpmd/manifolds.h"
#include "dpmd/point_cloud.h"

namespace dpmd {

// |x~(q) - x_clean(q)| per query. `queries` must carry its clean companion.
absl::StatusOr<std::vector<double>> DistToClean(const DenoiseReport& report,
                                                const PointCloud& queries);

// Distance of every released point to the true manifold.
absl::StatusOr<std::vector<double>> DistToManifoldMetric(
    const DenoiseReport& report, const ManifoldSpec& spec);

// Distance of each row of `points` to the manifold.
absl::StatusOr<std::vector<double>> DistancesToManifold(
    const Points& points, const ManifoldSpec& spec);

double Mean(const std::vector<double>& v);
double Median(std::vector<double> v);

// References carry noise of level sigma, queries of level sqrt(sigma); both
// keep their clean companions. A zero query count leaves `queries` empty.
struct SyntheticDataset {
  PointCloud refs;
  PointCloud queries;
};

absl::StatusOr<SyntheticDataset> GenerateDataset(const ManifoldSpec& spec,
                                                 int n, int query_count,
                                                 double sigma, NoiseKind noise,
                                                 uint64_t seed);

// Cartesian parameter grid for the synthetic benchmark. Empty grids fall back
// to the per-manifold defaults of the simulation protocol.
struct SweepConfig {
  ManifoldShape manifold = Circle{};
  std::vector<int> n;
  std::vector<double> sigma;
  std::vector<double> epsilon;
  std::vector<int> ambient_dim;
  int repeats = 1;
  uint64_t seed = 0;
  int query_count = 200;
  NoiseKind noise = NoiseKind::kBoundedBall;
  // d, steps, beta, theta, h, c_proj, c_mean, c1 and min_neighbors are taken
  // from here; budget, sigma and seed are set per cell. d == 0 means the
  // manifold's intrinsic dimension.
  DenoiseConfig fixed;
  double delta = 0.1;
  std::string output;
};

// Parses the JSON sweep configuration (field names as in SweepConfig).
absl::StatusOr<SweepConfig> ParseSweepConfig(const std::string& json_text);
absl::StatusOr<SweepConfig> LoadSweepConfig(const std::string& path);

// Fills empty grids with the defaults for the configured manifold.
SweepConfig WithDefaultGrids(SweepConfig cfg);

struct MetricRow {
  std::string manifold;
  int n = 0;
  double sigma = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  int ambient_dim = 0;
  uint64_t seed = 0;
  std::string method;  // raw, nonprivate_md or dp_md
  std::string status = "ok";
  double mean_dist_clean = 0.0;
  double median_dist_clean = 0.0;
  double mean_dist_manifold = 0.0;
  double median_dist_manifold = 0.0;
  double runtime_seconds = 0.0;
  double bandwidth = 0.0;
  double c_proj = 0.0;
  double c_mean = 0.0;
  int no_neighbor = 0;
  std::string error;

  // Identity of the row for resuming: parameters, seed and method.
  std::string Key() const;
};

std::string MetricCsvHeader();
std::string MetricRowToCsv(const MetricRow& row);

// Runs one (n, sigma, ambient_dim, seed) data cell for every epsilon, three
// rows per epsilon. Exposed for tests that re-run a single cell.
std::vector<MetricRow> RunSweepCell(const SweepConfig& cfg, int n,
                                    double sigma, int ambient_dim,
                                    const std::vector<double>& epsilons,
                                    uint64_t seed);

// Runs the full grid, appending rows to cfg.output (when set) one line at a
// time. Keys already present in an existing output file are skipped. Returns
// the rows computed in this call.
absl::StatusOr<std::vector<MetricRow>> RunSweep(const SweepConfig& cfg);

}  // namespace dpmd

#endif  // DPMD_EXPERIMENTS_H_
