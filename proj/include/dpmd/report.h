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

#ifndef DPMD_REPORT_H_
#define DPMD_REPORT_H_

#include <optional>
#include <string>

#include "absl/status/status.h"
#include "dpmd/denoiser.h"
#include "dpmd/point_cloud.h"

namespace dpmd {

// Structured JSON rendering of a report: config echo, bandwidth, privacy
// totals and one record per query with its per-step noise scales.
std::string ReportToJson(const DenoiseReport& report);

absl::Status WriteReportJson(const std::string& path,
                             const DenoiseReport& report);

// Flat per-query CSV:
//   query,status,steps_executed,final_support,displacement[,dist_to_clean]
// The last column appears when `clean` holds the noiseless queries.
absl::Status WriteQueryMetricsCsv(const std::string& path,
                                  const DenoiseReport& report,
                                  const std::optional<Points>& clean);

}  // namespace dpmd

#endif  // DPMD_REPORT_H_
