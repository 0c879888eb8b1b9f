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

#ifndef DPMD_NEIGHBORS_H_
#define DPMD_NEIGHBORS_H_

#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dpmd/linalg.h"
#include "dpmd/point_cloud.h"

namespace dpmd {

// Squared Euclidean distance accumulated coordinate by coordinate in index
// order. Every membership decision in the library goes through this function,
// so ball membership is bit-for-bit identical to a linear scan that uses it.
double SquaredDistance(const double* a, const double* b, int dim);

// Closed-ball membership, |a - b| <= h, evaluated as SquaredDistance <= h*h.
inline bool InClosedBall(const double* a, const double* b, int dim, double h) {
  return SquaredDistance(a, b, dim) <= h * h;
}

struct Neighbor {
  int index;
  double squared_distance;
};

// Exact fixed-radius search over an immutable point set (kd-tree). Pruning
// only discards a subtree when the splitting-plane bound, computed with the
// same rounding as SquaredDistance, already exceeds h^2, so results equal a
// linear scan exactly.
class RadiusIndex {
 public:
  static absl::StatusOr<RadiusIndex> Build(const Points& points);

  int size() const { return static_cast<int>(order_.size()); }
  int dim() const { return dim_; }

  // Indices i with |points[i] - x| <= h, ascending.
  std::vector<int> RadiusQuery(const Vector& x, double h) const;

  // Same set with squared distances, ascending by index.
  std::vector<Neighbor> RadiusQueryWithDistances(const Vector& x,
                                                 double h) const;

  // Calls fn(index, row, squared_distance) for every point of the closed
  // ball in tree order, where `row` points at dim() contiguous coordinates.
  template <typename Fn>
  void ForEachInBall(const Vector& x, double h, Fn&& fn) const;

 private:
  struct Node {
    int begin;
    int end;
    int axis;  // -1 for leaves.
    double split;
    int left;
    int right;
  };

  RadiusIndex() = default;
  int BuildNode(std::vector<int>& perm, const Points& points, int begin,
                int end);

  int dim_ = 0;
  std::vector<int> order_;    // tree position -> original row
  std::vector<double> data_;  // rows in tree order
  std::vector<Node> nodes_;
};

template <typename Fn>
void RadiusIndex::ForEachInBall(const Vector& x, double h, Fn&& fn) const {
  if (x.size() != dim_ || !(h >= 0)) return;
  const double h2 = h * h;
  const double* q = x.data();
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.axis < 0) {
      for (int pos = node.begin; pos < node.end; ++pos) {
        const double* row = &data_[static_cast<size_t>(pos) * dim_];
        const double d2 = SquaredDistance(row, q, dim_);
        if (d2 <= h2) fn(order_[pos], row, d2);
      }
      continue;
    }
    // Left rows satisfy coord <= split, right rows coord >= split. Squaring
    // and summing are monotone under rounding, so gap^2 > h^2 proves every
    // row on the far side is outside the ball.
    const double gap = q[node.axis] - node.split;
    const double gap2 = gap * gap;
    if (!(gap > 0 && gap2 > h2)) stack[top++] = node.left;
    if (!(gap < 0 && gap2 > h2)) stack[top++] = node.right;
  }
}

}  // namespace dpmd

#endif  // DPMD_NEIGHBORS_H_
