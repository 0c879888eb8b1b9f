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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "dpmd/manifolds.h"
#include "dpmd/privacy.h"
#include "tests/test_util.h"

namespace dpmd {
namespace {

using ::dpmd::testing::AxisProjector;
using ::dpmd::testing::RandomBasis;
using ::dpmd::testing::RandomProjector;
using ::testing::DoubleNear;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

Points RowsOf(int dim, std::initializer_list<double> values) {
  const int n = static_cast<int>(values.size()) / dim;
  Points pts(n, dim);
  int k = 0;
  for (double v : values) {
    pts(k / dim, k % dim) = v;
    ++k;
  }
  return pts;
}

Vector Vec(std::initializer_list<double> v) {
  Vector out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// References drawn uniformly from [-1, 1]^d and embedded by `basis`.
Points SubspacePoints(const Matrix& basis, int n, RandomStream& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int d = static_cast<int>(basis.cols());
  Points pts(n, basis.rows());
  for (int i = 0; i < n; ++i) {
    Vector c(d);
    for (int k = 0; k < d; ++k) c[k] = unit(rng);
    pts.row(i) = (basis * c).transpose();
  }
  return pts;
}

PointCloud Cloud(Points pts) { return *PointCloud::Create(std::move(pts)); }

TEST(DefaultBandwidthTest, Examples) {
  EXPECT_THAT(DefaultBandwidth(20000, 1, 0.1), DoubleNear(0.632456, 1e-5));
  EXPECT_THAT(DefaultBandwidth(20000, 1, 0.0), DoubleNear(0.111263, 1e-5));
  const double n = 20000.0;
  EXPECT_DOUBLE_EQ(DefaultBandwidth(20000, 1, 0.0),
                   5.0 * std::sqrt(std::log(n) / n));
}

TEST(DefaultBandwidthTest, FirstBranchNonIncreasingInN) {
  for (int d : {1, 2, 3}) {
    double prev = DefaultBandwidth(3, d, 0.0);
    for (int n = 4; n < 5000; n += 7) {
      const double h = DefaultBandwidth(n, d, 0.0);
      ASSERT_LE(h, prev);
      prev = h;
    }
  }
}

TEST(ResolveBandwidthTest, ExplicitAutoAndMissingSigma) {
  DenoiseConfig cfg;
  cfg.h = 0.3;
  EXPECT_EQ(*ResolveBandwidth(cfg, 100), 0.3);
  cfg.h.reset();
  cfg.sigma = 0.1;
  EXPECT_EQ(*ResolveBandwidth(cfg, 20000), DefaultBandwidth(20000, 1, 0.1));
  cfg.sigma.reset();
  EXPECT_FALSE(ResolveBandwidth(cfg, 100).ok());
}

TEST(LocalCovarianceTest, ThreePointLine) {
  const Points refs = RowsOf(2, {1, 0, -1, 0, 0, 0});
  const RadiusIndex index = *RadiusIndex::Build(refs);
  const LocalCovariance local =
      ComputeLocalCovariance(refs, index, Vec({0, 0}), 2.0);
  EXPECT_EQ(local.count, 3);
  Matrix want = Matrix::Zero(2, 2);
  want(0, 0) = 1.0;
  EXPECT_TRUE(local.covariance.matrix().isApprox(want, 1e-15));
}

TEST(LocalCovarianceTest, SingleNeighborGivesZero) {
  const Points refs = RowsOf(2, {1, 0, 5, 5});
  const RadiusIndex index = *RadiusIndex::Build(refs);
  const LocalCovariance local =
      ComputeLocalCovariance(refs, index, Vec({1, 0.1}), 0.5);
  EXPECT_EQ(local.count, 1);
  EXPECT_EQ(local.covariance.matrix(), Matrix::Zero(2, 2));
  EXPECT_EQ(ComputeLocalCovariance(refs, index, Vec({9, 9}), 0.5).count, 0);
}

TEST(LocalCovarianceTest, MatchesDirectSumAndTranslationInvariance) {
  RandomStream rng(1);
  std::normal_distribution<double> normal;
  Points refs(400, 3);
  for (int i = 0; i < refs.rows(); ++i) {
    for (int j = 0; j < 3; ++j) refs(i, j) = normal(rng);
  }
  const Vector z = Vec({0.2, -0.1, 0.3});
  const RadiusIndex index = *RadiusIndex::Build(refs);
  const LocalCovariance local = ComputeLocalCovariance(refs, index, z, 1.2);

  // Oracle: two-pass sums over the linear-scan neighbor set.
  std::vector<int> members;
  for (int i = 0; i < refs.rows(); ++i) {
    if ((refs.row(i).transpose() - z).squaredNorm() <= 1.2 * 1.2) {
      members.push_back(i);
    }
  }
  ASSERT_EQ(local.count, static_cast<int>(members.size()));
  Vector mean = Vector::Zero(3);
  for (int i : members) mean += refs.row(i).transpose();
  mean /= members.size();
  Matrix want = Matrix::Zero(3, 3);
  for (int i : members) {
    const Vector c = refs.row(i).transpose() - mean;
    want += c * c.transpose();
  }
  want /= members.size() - 1.0;
  EXPECT_LE((local.covariance.matrix() - want).norm(), 1e-13);

  const Vector shift = Vec({10.0, -3.0, 7.5});
  Points moved = refs;
  moved.rowwise() += shift.transpose();
  const RadiusIndex moved_index = *RadiusIndex::Build(moved);
  const LocalCovariance local_moved =
      ComputeLocalCovariance(moved, moved_index, z + shift, 1.2);
  EXPECT_EQ(local_moved.count, local.count);
  EXPECT_LE((local_moved.covariance.matrix() - local.covariance.matrix())
                .norm(),
            1e-12);
}

TEST(KernelWeightsTest, PeakAndHalfBandwidth) {
  const Points refs = RowsOf(2, {0, 0, 0.5, 0, 1.0, 0, 3, 3});
  const RadiusIndex index = *RadiusIndex::Build(refs);
  const KernelWeights w = ComputeKernelWeights(index, Vec({0, 0}), 1.0, 2.0);
  // The point at distance exactly h has zero weight and is dropped.
  ASSERT_THAT(w.support, ElementsAre(0, 1));
  const double total = 1.0 + 0.5625;
  EXPECT_THAT(w.alpha[0], DoubleNear(1.0 / total, 1e-15));
  EXPECT_THAT(w.alpha[1], DoubleNear(0.5625 / total, 1e-15));
}

TEST(KernelWeightsTest, SingleNeighborHasUnitWeight) {
  const Points refs = RowsOf(1, {0.3, 9.0});
  const RadiusIndex index = *RadiusIndex::Build(refs);
  const KernelWeights w = ComputeKernelWeights(index, Vec({0.3}), 1.0, 3.0);
  ASSERT_THAT(w.support, ElementsAre(0));
  EXPECT_EQ(w.alpha[0], 1.0);
  EXPECT_TRUE(ComputeKernelWeights(index, Vec({5.0}), 1.0, 2.0).empty());
}

TEST(KernelWeightsTest, NormalizedSortedAndInsideBall) {
  RandomStream rng(2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Points refs(2000, 3);
  for (int i = 0; i < refs.rows(); ++i) {
    for (int j = 0; j < 3; ++j) refs(i, j) = unit(rng);
  }
  const RadiusIndex index = *RadiusIndex::Build(refs);
  for (int q = 0; q < 200; ++q) {
    const Vector x = Vec({unit(rng), unit(rng), unit(rng)});
    const double h = 0.05 + 0.5 * (unit(rng) + 1.0);
    const double beta = 2.0 + (unit(rng) + 1.0);
    const KernelWeights w = ComputeKernelWeights(index, x, h, beta);
    if (w.empty()) continue;
    ASSERT_TRUE(std::is_sorted(w.support.begin(), w.support.end()));
    const std::vector<int> ball = index.RadiusQuery(x, h);
    ASSERT_TRUE(std::includes(ball.begin(), ball.end(), w.support.begin(),
                              w.support.end()));
    for (double a : w.alpha) ASSERT_GT(a, 0.0);
    ASSERT_THAT(std::accumulate(w.alpha.begin(), w.alpha.end(), 0.0),
                DoubleNear(1.0, 1e-12));
  }
}

TEST(WeightedMeanTest, Examples) {
  const Points refs = RowsOf(2, {1, 2, 3, 6, 0, 0});
  KernelWeights single{{0}, {1.0}};
  EXPECT_EQ(*WeightedMean(refs, single), Vec({1, 2}));
  KernelWeights pair{{0, 1}, {0.5, 0.5}};
  EXPECT_TRUE(WeightedMean(refs, pair)->isApprox(Vec({2, 4}), 1e-15));
  EXPECT_FALSE(WeightedMean(refs, KernelWeights{}).ok());
}

TEST(WeightedMeanTest, CollinearPointsStayOnLine) {
  const Points refs = RowsOf(2, {0, 0, 0.5, 1.0, 0.8, 1.6, 5, 5});
  const RadiusIndex index = *RadiusIndex::Build(refs);
  const KernelWeights w = ComputeKernelWeights(index, Vec({0.3, 0.7}), 1.5, 2.0);
  ASSERT_EQ(w.support.size(), 3u);
  const Vector b = *WeightedMean(refs, w);
  Vector direct = Vector::Zero(2);
  for (size_t k = 0; k < w.support.size(); ++k) {
    direct += w.alpha[k] * refs.row(w.support[k]).transpose();
  }
  EXPECT_LE((b - direct).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THAT(b[1], DoubleNear(2.0 * b[0], 1e-14));
}

TEST(ReferenceProjectorsTest, LineInThreeSpace) {
  Points refs(60, 3);
  const Vector dir = Vec({1, 2, 2}) / 3.0;
  for (int i = 0; i < refs.rows(); ++i) {
    refs.row(i) = (0.05 * i * dir).transpose();
  }
  const RadiusIndex index = *RadiusIndex::Build(refs);
  absl::StatusOr<ReferenceProjectors> projs =
      ReferenceProjectors::Compute(refs, index, 1, 0.3, 2);
  ASSERT_TRUE(projs.ok()) << projs.status();
  const Matrix want = dir * dir.transpose();
  EXPECT_EQ(projs->absent_count(), 0);
  for (int i = 0; i < projs->size(); ++i) {
    ASSERT_TRUE(projs->present(i));
    ASSERT_LE((projs->projector(i).Induced() - want).norm(), 1e-8);
  }
}

TEST(ReferenceProjectorsTest, IsolatedReferenceIsAbsent) {
  const Points refs = RowsOf(2, {0, 0, 0.1, 0, 0.2, 0, 9, 9});
  const RadiusIndex index = *RadiusIndex::Build(refs);
  const ReferenceProjectors projs =
      *ReferenceProjectors::Compute(refs, index, 1, 0.5, 2);
  EXPECT_TRUE(projs.present(0));
  EXPECT_FALSE(projs.present(3));
  EXPECT_EQ(projs.absent_count(), 1);
}

TEST(ReferenceProjectorsTest, RejectsBadRank) {
  const Points refs = RowsOf(2, {0, 0, 1, 0});
  const RadiusIndex index = *RadiusIndex::Build(refs);
  EXPECT_FALSE(ReferenceProjectors::Compute(refs, index, 3, 1.0, 2).ok());
}

TEST(ReferenceProjectorsTest, PermutingReferencesPermutesProjectors) {
  RandomStream rng(3);
  const PointCloud circle = *AddNoise(
      *SampleManifold(*ManifoldSpec::Create(Circle{}, 2), 500, rng),
      {NoiseKind::kBoundedBall, 0.05}, rng);
  const Points& refs = circle.coords();
  std::vector<int> perm(refs.rows());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Points shuffled(refs.rows(), refs.cols());
  for (int i = 0; i < refs.rows(); ++i) shuffled.row(i) = refs.row(perm[i]);

  const ReferenceProjectors a =
      *ReferenceProjectors::Compute(refs, *RadiusIndex::Build(refs), 1, 0.3, 2);
  const ReferenceProjectors b = *ReferenceProjectors::Compute(
      shuffled, *RadiusIndex::Build(shuffled), 1, 0.3, 2);
  for (int i = 0; i < refs.rows(); ++i) {
    ASSERT_EQ(a.present(perm[i]), b.present(i));
    ASSERT_LE((a.projector(perm[i]).Induced() - b.projector(i).Induced())
                  .norm(),
              1e-12);
  }
}

// Two clusters whose local geometry is a horizontal and a vertical segment.
struct CrossFixture {
  Points refs;
  ReferenceProjectors projs;
};

CrossFixture MakeCross() {
  Points refs(20, 2);
  for (int i = 0; i < 10; ++i) {
    refs.row(i) << 0.01 * i, 0.0;
    refs.row(10 + i) << 5.0, 5.0 + 0.01 * i;
  }
  const RadiusIndex index = *RadiusIndex::Build(refs);
  return {refs, *ReferenceProjectors::Compute(refs, index, 1, 0.5, 2)};
}

TEST(WeightedProjectorTest, OrthogonalLinesAverageToHalfIdentity) {
  const CrossFixture f = MakeCross();
  const KernelWeights w{{3, 14}, {0.5, 0.5}};
  absl::StatusOr<SymMatrix> p = WeightedProjector(f.projs, w);
  ASSERT_TRUE(p.ok()) << p.status();
  EXPECT_LE((p->matrix() - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(WeightedProjectorTest, IdenticalProjectorsAreAFixedPoint) {
  const CrossFixture f = MakeCross();
  const KernelWeights w{{1, 2, 7}, {0.2, 0.3, 0.5}};
  const SymMatrix p = *WeightedProjector(f.projs, w);
  EXPECT_LE((p.matrix() - AxisProjector(2, {0}).Induced()).norm(), 1e-12);
}

TEST(WeightedProjectorTest, AbsentProjectorsAreRenormalizedAway) {
  Points refs = RowsOf(2, {0, 0, 0.1, 0, 0.2, 0, 0.35, 0.4});
  const RadiusIndex index = *RadiusIndex::Build(refs);
  // With h = 0.25 the last reference has no neighbor but itself.
  const ReferenceProjectors projs =
      *ReferenceProjectors::Compute(refs, index, 1, 0.25, 2);
  ASSERT_FALSE(projs.present(3));
  const KernelWeights w{{0, 3}, {0.25, 0.75}};
  const SymMatrix p = *WeightedProjector(projs, w);
  EXPECT_LE((p.matrix() - AxisProjector(2, {0}).Induced()).norm(), 1e-12);
  const KernelWeights only_absent{{3}, {1.0}};
  EXPECT_EQ(WeightedProjector(projs, only_absent).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(WeightedProjectorTest, EigenvaluesInUnitInterval) {
  RandomStream rng(4);
  const PointCloud cloud = *AddNoise(
      *SampleManifold(*ManifoldSpec::Create(Sphere{}, 4), 3000, rng),
      {NoiseKind::kBoundedBall, 0.1}, rng);
  const RadiusIndex index = *RadiusIndex::Build(cloud.coords());
  const ReferenceProjectors projs =
      *ReferenceProjectors::Compute(cloud.coords(), index, 2, 0.4, 3);
  std::uniform_int_distribution<int> pick(0, cloud.size() - 1);
  for (int q = 0; q < 200; ++q) {
    const Vector x = cloud.Row(pick(rng)) * 1.05;
    const KernelWeights w = ComputeKernelWeights(index, x, 0.4, 2.0);
    if (w.empty()) continue;
    const SymMatrix p = *WeightedProjector(projs, w);
    const EigenDecomposition eig = *SymEigh(p);
    ASSERT_LE(eig.values.maxCoeff(), 1.0 + 1e-10);
    ASSERT_GE(eig.values.minCoeff(), -1e-10);
  }
}

TEST(WeightedSummariesTest, PermutationInvariant) {
  RandomStream rng(5);
  const PointCloud cloud = *AddNoise(
      *SampleManifold(*ManifoldSpec::Create(Circle{}, 3), 800, rng),
      {NoiseKind::kBoundedBall, 0.05}, rng);
  const Points& refs = cloud.coords();
  std::vector<int> perm(refs.rows());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Points shuffled(refs.rows(), refs.cols());
  for (int i = 0; i < refs.rows(); ++i) shuffled.row(i) = refs.row(perm[i]);
  const RadiusIndex ia = *RadiusIndex::Build(refs);
  const RadiusIndex ib = *RadiusIndex::Build(shuffled);
  const ReferenceProjectors pa =
      *ReferenceProjectors::Compute(refs, ia, 1, 0.3, 2);
  const ReferenceProjectors pb =
      *ReferenceProjectors::Compute(shuffled, ib, 1, 0.3, 2);
  for (int q = 0; q < 50; ++q) {
    const Vector x = cloud.Row(q) * 1.1;
    const KernelWeights wa = ComputeKernelWeights(ia, x, 0.3, 2.0);
    const KernelWeights wb = ComputeKernelWeights(ib, x, 0.3, 2.0);
    ASSERT_LE((*WeightedMean(refs, wa) - *WeightedMean(shuffled, wb)).norm(),
              1e-12);
    ASSERT_LE((WeightedProjector(pa, wa)->matrix() -
               WeightedProjector(pb, wb)->matrix())
                  .norm(),
              1e-12);
  }
}

TEST(DenoiseStepTest, Examples) {
  const Vector x = Vec({1, 1});
  const Vector b = Vec({0, 0});
  EXPECT_EQ(DenoiseStep(x, AxisProjector(2, {0, 1}), Vec({3, 4})), x);
  EXPECT_EQ(DenoiseStep(x, AxisProjector(2, {0}), b), Vec({1, 0}));
}

TEST(DenoiseStepTest, PurelyNormalResidualLandsOnMean) {
  const Vector x = Vec({0, 2});
  const Vector b = Vec({0, -1});
  EXPECT_EQ(DenoiseStep(x, AxisProjector(2, {0}), b), b);
}

TEST(DenoiseStepTest, RemovesEntireNormalComponent) {
  RandomStream rng(6);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 500; ++trial) {
    const int dim = 2 + trial % 9;
    const int d = 1 + trial % (dim - 1);
    const Projector p = RandomProjector(dim, d, rng);
    Vector x(dim), b(dim);
    for (int j = 0; j < dim; ++j) {
      x[j] = normal(rng);
      b[j] = normal(rng);
    }
    const Vector next = DenoiseStep(x, p, b);
    const Vector r = next - b;
    ASSERT_LE((r - p.Apply(r)).norm(), 1e-10);
    ASSERT_LE((p.Apply(next - x)).norm(), 1e-10);
  }
}

TEST(DpProjectorTest, NonPrivateThreePointLine) {
  const Points refs = RowsOf(2, {1, 0, -1, 0, 0, 0});
  const RadiusIndex index = *RadiusIndex::Build(refs);
  RandomStream rng(7);
  DpProjectorOptions opts;
  opts.d = 1;
  opts.h = 2.0;
  absl::StatusOr<DpProjectorResult> r =
      DpProjector(refs, index, Vec({0, 0}), opts, rng);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->noise_scale, 0.0);
  EXPECT_EQ(r->neighbor_count, 3);
  EXPECT_TRUE(r->projector.Induced().isApprox(AxisProjector(2, {0}).Induced(),
                                              1e-15));
}

TEST(DpProjectorTest, ExactPlaneInFiveSpace) {
  RandomStream rng(8);
  const Matrix basis = RandomBasis(5, 2, rng);
  const Points refs = SubspacePoints(basis, 300, rng);
  const RadiusIndex index = *RadiusIndex::Build(refs);
  DpProjectorOptions opts;
  opts.d = 2;
  opts.h = 0.8;
  const DpProjectorResult r =
      *DpProjector(refs, index, Vector::Zero(5), opts, rng);
  EXPECT_LE(*PrincipalAngleDistance(r.projector, *Projector::FromBasis(basis)),
            1e-8);
}

TEST(DpProjectorTest, NonPrivateEquivalenceIsExact) {
  RandomStream rng(9);
  const PointCloud cloud = *AddNoise(
      *SampleManifold(*ManifoldSpec::Create(Torus{}, 4), 2000, rng),
      {NoiseKind::kBoundedBall, 0.1}, rng);
  const RadiusIndex index = *RadiusIndex::Build(cloud.coords());
  DpProjectorOptions opts;
  opts.d = 2;
  opts.h = 0.6;
  for (int q = 0; q < 20; ++q) {
    const Vector z = cloud.Row(q);
    const DpProjectorResult r =
        *DpProjector(cloud.coords(), index, z, opts, rng);
    const Projector want = *TopDProjector(
        ComputeLocalCovariance(cloud.coords(), index, z, 0.6).covariance, 2);
    ASSERT_EQ(r.projector.basis(), want.basis());
  }
}

TEST(DpProjectorTest, InsufficientNeighborsDrawsNoNoise) {
  const Points refs = RowsOf(2, {0, 0, 0.1, 0, 5, 5});
  const RadiusIndex index = *RadiusIndex::Build(refs);
  RandomStream rng(10);
  const RandomStream before = rng;
  DpProjectorOptions opts;
  opts.d = 1;
  opts.h = 0.5;
  opts.calibration = ZcdpNoise{0.1};
  absl::StatusOr<DpProjectorResult> r =
      DpProjector(refs, index, Vec({5, 5}), opts, rng);
  EXPECT_EQ(r.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_TRUE(rng == before);
}

TEST(DpProjectorTest, CalibratedScales) {
  RandomStream rng(11);
  const PointCloud cloud =
      *SampleManifold(*ManifoldSpec::Create(Circle{}, 2), 1000, rng);
  const RadiusIndex index = *RadiusIndex::Build(cloud.coords());
  DpProjectorOptions opts;
  opts.d = 1;
  opts.h = 0.5;
  opts.c_proj = 2.0;
  const double delta2 = ProjectorSensitivity({1000, 0.5, 1, 2.0, 1.0});

  opts.calibration = ZcdpNoise{0.05};
  DpProjectorResult r = *DpProjector(cloud.coords(), index, cloud.Row(0),
                                     opts, rng);
  EXPECT_EQ(r.noise_scale, *GaussianScaleForZcdp(delta2, 0.05));
  EXPECT_EQ(r.projector.rank(), 1);

  opts.calibration = ApproxDpNoise{0.5, 0.1, 1.25};
  r = *DpProjector(cloud.coords(), index, cloud.Row(0), opts, rng);
  EXPECT_EQ(r.noise_scale, *GaussianScaleForApproxDp(delta2, 0.5, 0.1));

  opts.calibration = ApproxDpNoise{1.5, 0.1, 1.25};
  EXPECT_FALSE(
      DpProjector(cloud.coords(), index, cloud.Row(0), opts, rng).ok());
}

TEST(PrivatizeProjectorTest, HeavyNoiseStillYieldsRankDProjector) {
  RandomStream rng(12);
  const SymMatrix summary =
      *SymMatrix::FromUpperTriangle(AxisProjector(6, {0, 1}).Induced());
  for (int k = 0; k < 50; ++k) {
    const Projector p = *PrivatizeProjector(summary, 2, 100.0, rng);
    const Matrix m = p.Induced();
    ASSERT_EQ(p.rank(), 2);
    ASSERT_LE((m * m - m).norm(), 1e-8);
    ASSERT_THAT(m.trace(), DoubleNear(2.0, 1e-8));
  }
  EXPECT_FALSE(PrivatizeProjector(summary, 2, -1.0, rng).ok());
}

DenoiseConfig LinearConfig(int d, double h) {
  DenoiseConfig cfg;
  cfg.d = d;
  cfg.h = h;
  cfg.steps = 1;
  return cfg;
}

TEST(DenoiseQueriesTest, LinearSubspaceOracle) {
  RandomStream rng(13);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> coord(-0.7, 0.7);
  for (auto [d, dim] : {std::pair{1, 3}, {2, 5}, {3, 8}}) {
    const Matrix basis = RandomBasis(dim, d, rng);
    const Matrix proj = basis * basis.transpose();
    const PointCloud refs = Cloud(SubspacePoints(basis, 500, rng));
    const double h = 0.6;
    Points queries(100, dim);
    for (int q = 0; q < 100; ++q) {
      Vector c(d);
      for (int k = 0; k < d; ++k) c[k] = coord(rng);
      Vector normal_dir(dim);
      for (int j = 0; j < dim; ++j) normal_dir[j] = normal(rng);
      normal_dir -= proj * normal_dir;
      normal_dir.normalize();
      queries.row(q) = (basis * c + 0.3 * h * normal_dir).transpose();
    }
    absl::StatusOr<DenoiseReport> report =
        DenoiseQueries(refs, Cloud(queries), LinearConfig(d, h));
    ASSERT_TRUE(report.ok()) << report.status();
    for (int q = 0; q < 100; ++q) {
      const QueryResult& r = report->queries[q];
      ASSERT_EQ(r.status, QueryStatus::kDenoised);
      const Vector want = proj * r.initial;
      ASSERT_LE((r.final_point - want).cwiseAbs().maxCoeff(), 1e-8)
          << "d=" << d << " D=" << dim;
    }
  }
}

TEST(DenoiseQueriesTest, NoNeighborQueryUnchangedAndFree) {
  RandomStream rng(14);
  const PointCloud refs =
      *SampleManifold(*ManifoldSpec::Create(Circle{}, 2), 2000, rng);
  const PointCloud queries = Cloud(RowsOf(2, {1.05, 0.0, 30.0, 30.0}));
  DenoiseConfig cfg;
  cfg.h = 0.3;
  cfg.budget = *PrivacyBudget::Create(1.0, 0.1);
  const DenoiseReport report = *DenoiseQueries(refs, queries, cfg);
  const QueryResult& far = report.queries[1];
  EXPECT_EQ(far.status, QueryStatus::kNoNeighbor);
  EXPECT_EQ(far.final_point, far.initial);
  EXPECT_EQ(far.last_iterate, far.initial);
  EXPECT_TRUE(far.steps.empty());
  EXPECT_EQ(report.queries[0].status, QueryStatus::kDenoised);
  EXPECT_EQ(report.queries[0].steps.size(), 3u);
  // Only the first query released anything: half the total budget.
  EXPECT_THAT(report.rho_spent, DoubleNear(0.5 * report.rho_total, 1e-15));
  EXPECT_THAT(report.rho_unspent, DoubleNear(0.5 * report.rho_total, 1e-15));
  EXPECT_THAT(report.realized_epsilon,
              DoubleNear(*ZcdpToEpsilon(report.rho_spent, 0.1), 1e-15));
}

TEST(DenoiseQueriesTest, MinNeighborsThresholdIsInclusive) {
  const PointCloud refs = Cloud(RowsOf(2, {0, 0, 0.1, 0, 5, 5}));
  DenoiseConfig cfg;
  cfg.h = 0.5;
  cfg.steps = 1;
  const PointCloud q = Cloud(RowsOf(2, {0.05, 0.05, 5.0, 5.1}));
  const DenoiseReport report = *DenoiseQueries(refs, q, cfg);
  EXPECT_EQ(report.queries[0].status, QueryStatus::kDenoised);
  EXPECT_EQ(report.queries[1].status, QueryStatus::kNoNeighbor);
}

TEST(DenoiseQueriesTest, NonPrivateHasNoNoiseAndSpendsNothing) {
  RandomStream rng(15);
  const PointCloud refs = *AddNoise(
      *SampleManifold(*ManifoldSpec::Create(Circle{}, 2), 3000, rng),
      {NoiseKind::kBoundedBall, 0.05}, rng);
  const PointCloud queries = *AddNoise(
      *SampleManifold(*ManifoldSpec::Create(Circle{}, 2), 20, rng),
      {NoiseKind::kBoundedBall, 0.2}, rng);
  DenoiseConfig cfg;
  cfg.sigma = 0.05;
  const DenoiseReport report = *DenoiseQueries(refs, queries, cfg);
  EXPECT_TRUE(report.nonprivate);
  EXPECT_EQ(report.rho_spent, 0.0);
  for (const QueryResult& r : report.queries) {
    for (const StepRecord& s : r.steps) {
      ASSERT_EQ(s.sigma_projector, 0.0);
      ASSERT_EQ(s.sigma_mean, 0.0);
    }
  }
}

struct CircleRun {
  PointCloud refs;
  PointCloud queries;
};

CircleRun SmallCircle(uint64_t seed) {
  RandomStream rng(seed);
  const ManifoldSpec spec = *ManifoldSpec::Create(Circle{}, 3);
  return {*AddNoise(*SampleManifold(spec, 4000, rng),
                    {NoiseKind::kBoundedBall, 0.1}, rng),
          *AddNoise(*SampleManifold(spec, 30, rng),
                    {NoiseKind::kBoundedBall, std::sqrt(0.1)}, rng)};
}

TEST(DenoiseQueriesTest, DeterministicGivenSeed) {
  const CircleRun run = SmallCircle(16);
  DenoiseConfig cfg;
  cfg.sigma = 0.1;
  cfg.budget = *PrivacyBudget::Create(1.0, 0.1);
  cfg.seed = 42;
  cfg.record_trajectory = true;
  const DenoiseReport a = *DenoiseQueries(run.refs, run.queries, cfg);
  const DenoiseReport b = *DenoiseQueries(run.refs, run.queries, cfg);
  ASSERT_EQ(a.FinalPoints(), b.FinalPoints());
  for (size_t q = 0; q < a.queries.size(); ++q) {
    ASSERT_EQ(a.queries[q].trajectory.size(), b.queries[q].trajectory.size());
    for (size_t k = 0; k < a.queries[q].trajectory.size(); ++k) {
      ASSERT_EQ(a.queries[q].trajectory[k], b.queries[q].trajectory[k]);
    }
  }
  cfg.seed = 43;
  const DenoiseReport c = *DenoiseQueries(run.refs, run.queries, cfg);
  EXPECT_NE(a.FinalPoints(), c.FinalPoints());
}

TEST(DenoiseQueriesTest, NoiseScaleBookkeeping) {
  const CircleRun run = SmallCircle(17);
  DenoiseConfig cfg;
  cfg.sigma = 0.1;
  cfg.steps = 2;
  cfg.theta = 0.3;
  cfg.c_proj = 1.5;
  cfg.c_mean = 0.7;
  cfg.budget = *PrivacyBudget::Create(2.0, 1e-3);
  const DenoiseReport report = *DenoiseQueries(run.refs, run.queries, cfg);
  const BudgetSchedule schedule =
      *MakeSchedule(*cfg.budget, run.queries.size(), 2, 0.3);
  const SensitivityParams params{run.refs.size(), report.bandwidth, 1, 1.5,
                                 0.7};
  for (int q = 0; q < run.queries.size(); ++q) {
    const QueryResult& r = report.queries[q];
    for (int t = 0; t < static_cast<int>(r.steps.size()); ++t) {
      const StepRecord& s = r.steps[t];
      ASSERT_EQ(s.rho_projector, schedule.rho_projector(q, t));
      ASSERT_EQ(s.rho_mean, schedule.rho_mean(q, t));
      ASSERT_EQ(s.sigma_projector,
                *GaussianScaleForZcdp(ProjectorSensitivity(params),
                                      s.rho_projector));
      ASSERT_EQ(s.sigma_mean,
                *GaussianScaleForZcdp(MeanSensitivity(params), s.rho_mean));
    }
  }
}

TEST(DenoiseQueriesTest, RejectsInvalidConfigs) {
  const CircleRun run = SmallCircle(18);
  DenoiseConfig cfg;
  cfg.sigma = 0.1;
  DenoiseConfig bad = cfg;
  bad.beta = 1.5;
  EXPECT_THAT(DenoiseQueries(run.refs, run.queries, bad).status().message(),
              HasSubstr("beta"));
  bad = cfg;
  bad.steps = 0;
  EXPECT_FALSE(DenoiseQueries(run.refs, run.queries, bad).ok());
  bad = cfg;
  bad.theta = 1.0;
  EXPECT_FALSE(DenoiseQueries(run.refs, run.queries, bad).ok());
  bad = cfg;
  bad.d = 4;
  EXPECT_FALSE(DenoiseQueries(run.refs, run.queries, bad).ok());
  bad = cfg;
  bad.sigma.reset();
  EXPECT_FALSE(DenoiseQueries(run.refs, run.queries, bad).ok());
  const PointCloud flat = Cloud(Points::Zero(3, 2));
  EXPECT_THAT(DenoiseQueries(run.refs, flat, cfg).status().message(),
              HasSubstr("dimension 2"));
}

TEST(DenoiseQueriesTest, ModelMismatchRejected) {
  const CircleRun run = SmallCircle(19);
  const ReferenceModel model = *ReferenceModel::Build(run.refs, 1, 0.5, 2);
  DenoiseConfig cfg;
  cfg.h = 0.5;
  EXPECT_TRUE(DenoiseQueries(model, run.queries, cfg).ok());
  cfg.h = 0.6;
  EXPECT_FALSE(DenoiseQueries(model, run.queries, cfg).ok());
  cfg.h = 0.5;
  cfg.min_neighbors = 5;
  EXPECT_FALSE(DenoiseQueries(model, run.queries, cfg).ok());
}

TEST(DenoiseQueriesTest, CircleDeskRunImprovesEverySeed) {
  const ManifoldSpec spec = *ManifoldSpec::Create(Circle{}, 2);
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    RandomStream rng(seed);
    const PointCloud refs = *AddNoise(*SampleManifold(spec, 20000, rng),
                                      {NoiseKind::kBoundedBall, 0.1}, rng);
    const PointCloud queries =
        *AddNoise(*SampleManifold(spec, 200, rng),
                  {NoiseKind::kBoundedBall, std::sqrt(0.1)}, rng);
    DenoiseConfig cfg;
    cfg.sigma = 0.1;
    cfg.budget = *PrivacyBudget::Create(1.0, 0.1);
    cfg.seed = seed;
    const DenoiseReport report = *DenoiseQueries(refs, queries, cfg);
    double before = 0.0, after = 0.0;
    for (const QueryResult& r : report.queries) {
      before += *DistanceToManifold(spec, r.initial);
      after += *DistanceToManifold(spec, r.final_point);
    }
    EXPECT_LT(after, before) << "seed " << seed;
  }
}

}  // namespace
}  // namespace dpmd
