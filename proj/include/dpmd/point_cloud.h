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

#ifndef DPMD_POINT_CLOUD_H_
#define DPMD_POINT_CLOUD_H_

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmd/linalg.h"

namespace dpmd {

// Row-major n x D coordinates, one point per row.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>;

// A finite point cloud with an optional ground-truth companion of the same
// shape (row i of `clean` is the noiseless source of row i of `coords`).
class PointCloud {
 public:
  PointCloud() = default;

  static absl::StatusOr<PointCloud> Create(Points coords,
                                           std::optional<Points> clean = {});

  int size() const { return static_cast<int>(coords_.rows()); }
  int dim() const { return static_cast<int>(coords_.cols()); }
  const Points& coords() const { return coords_; }
  bool has_clean() const { return clean_.has_value(); }
  const Points& clean() const { return *clean_; }

  Vector Row(int i) const { return coords_.row(i).transpose(); }

 private:
  PointCloud(Points coords, std::optional<Points> clean)
      : coords_(std::move(coords)), clean_(std::move(clean)) {}

  Points coords_;
  std::optional<Points> clean_;
};

// CSV with header `x0,x1,...,x{D-1}` and one point per line. Values are
// written with 17 significant digits so they round-trip exactly.
absl::Status WritePointsCsv(const std::string& path, const Points& points);
absl::StatusOr<Points> ReadPointsCsv(const std::string& path);

}  // namespace dpmd

#endif  // DPMD_POINT_CLOUD_H_
