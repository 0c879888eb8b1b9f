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

#include "dpmd/report.h"

#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace dpmd {
namespace {

using Json = nlohmann::json;

std::vector<double> ToStd(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Json ConfigToJson(const DenoiseConfig& cfg, double h, int min_neighbors) {
  Json j;
  j["h"] = h;
  j["h_mode"] = cfg.h.has_value() ? "fixed" : "auto";
  if (cfg.sigma.has_value()) j["sigma"] = *cfg.sigma;
  j["d"] = cfg.d;
  j["steps"] = cfg.steps;
  j["beta"] = cfg.beta;
  j["theta"] = cfg.theta;
  j["c_proj"] = cfg.c_proj;
  j["c_mean"] = cfg.c_mean;
  j["c1"] = cfg.c1;
  j["seed"] = cfg.seed;
  j["min_neighbors"] = min_neighbors;
  if (cfg.budget.has_value()) {
    j["budget"] = {{"epsilon", cfg.budget->epsilon()},
                   {"delta", cfg.budget->delta()},
                   {"rho_total", cfg.budget->rho_total()}};
  } else {
    j["budget"] = "nonprivate";
  }
  return j;
}

}  // namespace

std::string ReportToJson(const DenoiseReport& report) {
  Json j;
  j["config"] =
      ConfigToJson(report.config, report.bandwidth, report.min_neighbors);
  j["reference_count"] = report.reference_count;
  j["absent_reference_projectors"] = report.absent_reference_projectors;
  j["privacy"] = {
      {"nonprivate", report.nonprivate},
      {"rho_total", report.rho_total},
      {"rho_spent", report.rho_spent},
      {"rho_unspent", report.rho_unspent},
      {"realized_epsilon", report.realized_epsilon},
      {"delta", report.delta},
      {"event_conditional_calibration", report.event_conditional_calibration},
  };
  j["wall_seconds"] = report.wall_seconds;
  Json queries = Json::array();
  for (size_t q = 0; q < report.queries.size(); ++q) {
    const QueryResult& r = report.queries[q];
    Json jq;
    jq["query"] = q;
    jq["status"] = QueryStatusName(r.status);
    jq["initial"] = ToStd(r.initial);
    jq["final"] = ToStd(r.final_point);
    if (r.status == QueryStatus::kNoNeighbor && !r.steps.empty()) {
      jq["last_iterate"] = ToStd(r.last_iterate);
    }
    Json steps = Json::array();
    for (const StepRecord& s : r.steps) {
      steps.push_back({{"sigma_P", s.sigma_projector},
                       {"sigma_m", s.sigma_mean},
                       {"rho_P", s.rho_projector},
                       {"rho_m", s.rho_mean},
                       {"support", s.support}});
    }
    jq["steps"] = std::move(steps);
    if (!r.trajectory.empty()) {
      Json traj = Json::array();
      for (const Vector& x : r.trajectory) traj.push_back(ToStd(x));
      jq["trajectory"] = std::move(traj);
    }
    queries.push_back(std::move(jq));
  }
  j["queries"] = std::move(queries);
  return j.dump(2);
}

absl::Status WriteReportJson(const std::string& path,
                             const DenoiseReport& report) {
  std::ofstream out(path);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot open ", path));
  out << ReportToJson(report) << "\n";
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::Status WriteQueryMetricsCsv(const std::string& path,
                                  const DenoiseReport& report,
                                  const std::optional<Points>& clean) {
  if (clean.has_value() &&
      clean->rows() != static_cast<Eigen::Index>(report.queries.size())) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "clean queries have %d rows, report has %d queries", clean->rows(),
        report.queries.size()));
  }
  std::ofstream out(path);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot open ", path));
  out << "query,status,steps_executed,final_support,displacement";
  if (clean.has_value()) out << ",dist_to_clean";
  out << "\n";
  for (size_t q = 0; q < report.queries.size(); ++q) {
    const QueryResult& r = report.queries[q];
    std::string line = absl::StrFormat(
        "%d,%s,%d,%d,%.17g", q, QueryStatusName(r.status), r.steps.size(),
        r.steps.empty() ? 0 : r.steps.back().support,
        (r.final_point - r.initial).norm());
    if (clean.has_value()) {
      absl::StrAppendFormat(
          &line, ",%.17g",
          (r.final_point - clean->row(q).transpose()).norm());
    }
    out << line << "\n";
  }
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

}  // namespace dpmd
