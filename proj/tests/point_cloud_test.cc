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

#include "dpmd/point_cloud.h"

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "dpmd/random.h"

namespace dpmd {
namespace {

using ::testing::HasSubstr;

std::string TempPath(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

TEST(PointCloudTest, CreateValidatesCleanShape) {
  Points coords = Points::Zero(3, 2);
  EXPECT_TRUE(PointCloud::Create(coords, Points::Ones(3, 2)).ok());
  EXPECT_FALSE(PointCloud::Create(coords, Points::Ones(3, 3)).ok());
  EXPECT_FALSE(PointCloud::Create(coords, Points::Ones(2, 2)).ok());
}

TEST(PointCloudTest, CreateRejectsNonFinite) {
  Points coords = Points::Zero(2, 2);
  coords(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(PointCloud::Create(coords).ok());
  Points clean = Points::Zero(2, 2);
  clean(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(PointCloud::Create(Points::Zero(2, 2), clean).ok());
}

TEST(PointsCsvTest, RoundTripIsBitExact) {
  RandomStream rng(1);
  std::normal_distribution<double> normal(0.0, 1e3);
  Points pts(50, 4);
  for (int i = 0; i < pts.rows(); ++i) {
    for (int j = 0; j < pts.cols(); ++j) pts(i, j) = normal(rng);
  }
  pts(0, 0) = 1e-300;
  pts(1, 1) = -0.0;
  const std::string path = TempPath("round_trip.csv");
  ASSERT_TRUE(WritePointsCsv(path, pts).ok());
  absl::StatusOr<Points> back = ReadPointsCsv(path);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, pts);
}

TEST(PointsCsvTest, HeaderNamesColumns) {
  const std::string path = TempPath("header.csv");
  ASSERT_TRUE(WritePointsCsv(path, Points::Zero(1, 3)).ok());
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x0,x1,x2");
}

TEST(PointsCsvTest, RejectsBadHeader) {
  const std::string path = TempPath("bad_header.csv");
  WriteText(path, "a,b\n1,2\n");
  EXPECT_THAT(ReadPointsCsv(path).status().message(), HasSubstr("header"));
}

TEST(PointsCsvTest, RejectsRaggedRow) {
  const std::string path = TempPath("ragged.csv");
  WriteText(path, "x0,x1\n1,2\n3\n");
  EXPECT_FALSE(ReadPointsCsv(path).ok());
}

TEST(PointsCsvTest, RejectsMalformedNumber) {
  const std::string path = TempPath("malformed.csv");
  WriteText(path, "x0,x1\n1,abc\n");
  EXPECT_FALSE(ReadPointsCsv(path).ok());
}

TEST(PointsCsvTest, RejectsMissingFileAndEmptyBody) {
  EXPECT_EQ(ReadPointsCsv(TempPath("does_not_exist.csv")).status().code(),
            absl::StatusCode::kNotFound);
  const std::string path = TempPath("no_rows.csv");
  WriteText(path, "x0,x1\n");
  EXPECT_FALSE(ReadPointsCsv(path).ok());
}

TEST(DeriveSeedTest, KeysSeparateStreams) {
  EXPECT_EQ(DeriveSeed(5, {1, 2, 1}), DeriveSeed(5, {1, 2, 1}));
  EXPECT_NE(DeriveSeed(5, {1, 2, 1}), DeriveSeed(5, {1, 2, 2}));
  EXPECT_NE(DeriveSeed(5, {1, 2, 1}), DeriveSeed(5, {2, 1, 1}));
  EXPECT_NE(DeriveSeed(5, {1, 2, 1}), DeriveSeed(6, {1, 2, 1}));
  EXPECT_NE(DeriveSeed(5, {0}), DeriveSeed(5, {0, 0}));
}

TEST(DeriveSeedTest, NoiseStreamsDependOnlyOnTheirKeys) {
  RandomStream a = NoiseStream(9, 3, 1, Mechanism::kMean);
  RandomStream b = NoiseStream(9, 3, 1, Mechanism::kMean);
  RandomStream c = NoiseStream(9, 3, 1, Mechanism::kProjector);
  const uint64_t first = a();
  EXPECT_EQ(first, b());
  EXPECT_NE(first, c());
}

}  // namespace
}  // namespace dpmd
