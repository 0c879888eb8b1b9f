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

#include <cmath>
#include <fstream>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace dpmd {

absl::StatusOr<PointCloud> PointCloud::Create(Points coords,
                                              std::optional<Points> clean) {
  if (!coords.allFinite()) {
    return absl::InvalidArgumentError("point cloud has non-finite coordinates");
  }
  if (clean.has_value()) {
    if (clean->rows() != coords.rows() || clean->cols() != coords.cols()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "clean companion shape %dx%d does not match coordinates %dx%d",
          clean->rows(), clean->cols(), coords.rows(), coords.cols()));
    }
    if (!clean->allFinite()) {
      return absl::InvalidArgumentError(
          "clean companion has non-finite coordinates");
    }
  }
  return PointCloud(std::move(coords), std::move(clean));
}

absl::Status WritePointsCsv(const std::string& path, const Points& points) {
  std::ofstream out(path);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot open ", path));
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    out << (j ? "," : "") << "x" << j;
  }
  out << "\n";
  std::string line;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (j) line += ',';
      absl::StrAppendFormat(&line, "%.17g", points(i, j));
    }
    out << line << "\n";
  }
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<Points> ReadPointsCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": empty file"));
  }
  std::vector<std::string> header =
      absl::StrSplit(absl::StripAsciiWhitespace(line), ',');
  for (size_t j = 0; j < header.size(); ++j) {
    if (header[j] != absl::StrCat("x", j)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "%s: header column %d is '%s', expected 'x%d'", path, j, header[j],
          j));
    }
  }
  const int dim = static_cast<int>(header.size());
  std::vector<double> values;
  int rows = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view trimmed = absl::StripAsciiWhitespace(line);
    if (trimmed.empty()) continue;
    std::vector<absl::string_view> fields = absl::StrSplit(trimmed, ',');
    if (static_cast<int>(fields.size()) != dim) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "%s:%d: expected %d fields, found %d", path, line_no, dim,
          fields.size()));
    }
    for (absl::string_view f : fields) {
      double v;
      if (!absl::SimpleAtod(f, &v) || !std::isfinite(v)) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "%s:%d: malformed number '%s'", path, line_no, f));
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": no data rows"));
  }
  return Points(Eigen::Map<const Points>(values.data(), rows, dim));
}

}  // namespace dpmd
