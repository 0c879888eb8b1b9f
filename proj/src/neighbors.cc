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

#include "dpmd/neighbors.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace dpmd {
namespace {

constexpr int kLeafSize = 16;

}  // namespace

double SquaredDistance(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

absl::StatusOr<RadiusIndex> RadiusIndex::Build(const Points& points) {
  if (points.rows() < 1 || points.cols() < 1) {
    return absl::InvalidArgumentError("cannot index an empty point set");
  }
  if (!points.allFinite()) {
    return absl::InvalidArgumentError("cannot index non-finite points");
  }
  RadiusIndex index;
  index.dim_ = static_cast<int>(points.cols());
  std::vector<int> perm(points.rows());
  std::iota(perm.begin(), perm.end(), 0);
  index.nodes_.reserve(2 * points.rows() / kLeafSize + 2);
  index.BuildNode(perm, points, 0, static_cast<int>(points.rows()));
  index.order_ = std::move(perm);
  index.data_.resize(points.size());
  for (size_t pos = 0; pos < index.order_.size(); ++pos) {
    for (int j = 0; j < index.dim_; ++j) {
      index.data_[pos * index.dim_ + j] = points(index.order_[pos], j);
    }
  }
  return index;
}

int RadiusIndex::BuildNode(std::vector<int>& perm, const Points& points,
                           int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end, -1, 0.0, -1, -1});
  if (end - begin <= kLeafSize) return id;

  int axis = 0;
  double widest = -1.0;
  for (int j = 0; j < dim_; ++j) {
    double lo = points(perm[begin], j);
    double hi = lo;
    for (int p = begin + 1; p < end; ++p) {
      const double v = points(perm[p], j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = j;
    }
  }
  if (widest <= 0.0) return id;  // all points coincide

  const int mid = begin + (end - begin) / 2;
  std::nth_element(perm.begin() + begin, perm.begin() + mid,
                   perm.begin() + end, [&](int a, int b) {
                     return points(a, axis) < points(b, axis);
                   });
  const double split = points(perm[mid], axis);
  const int left = BuildNode(perm, points, begin, mid);
  const int right = BuildNode(perm, points, mid, end);
  Node& node = nodes_[id];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

std::vector<Neighbor> RadiusIndex::RadiusQueryWithDistances(const Vector& x,
                                                            double h) const {
  std::vector<Neighbor> out;
  ForEachInBall(x, h, [&](int index, const double*, double d2) {
    out.push_back(Neighbor{index, d2});
  });
  std::sort(out.begin(), out.end(),
            [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
  return out;
}

std::vector<int> RadiusIndex::RadiusQuery(const Vector& x, double h) const {
  std::vector<Neighbor> hits = RadiusQueryWithDistances(x, h);
  std::vector<int> out(hits.size());
  for (size_t i = 0; i < hits.size(); ++i) out[i] = hits[i].index;
  return out;
}

}  // namespace dpmd
