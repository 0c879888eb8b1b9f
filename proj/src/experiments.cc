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

#include "dpmd/experiments.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace dpmd {
namespace {

using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

template <typename T>
absl::StatusOr<std::vector<T>> ReadGrid(const Json& j, const char* key) {
  std::vector<T> out;
  if (!j.contains(key)) return out;
  const Json& v = j.at(key);
  try {
    if (v.is_array()) {
      for (const Json& e : v) out.push_back(e.get<T>());
    } else {
      out.push_back(v.get<T>());
    }
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("sweep config field '", key, "': ", e.what()));
  }
  for (const T& x : out) {
    if (!(x > 0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("sweep config field '", key, "' must be positive"));
    }
  }
  return out;
}

absl::StatusOr<ManifoldShape> ParseManifold(const Json& j) {
  std::string kind;
  Json params = Json::object();
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else if (j.is_object() && j.contains("kind")) {
    kind = j.at("kind").get<std::string>();
    params = j;
  } else {
    return absl::InvalidArgumentError(
        "manifold must be a name or an object with a 'kind'");
  }
  auto get = [&](const char* key, double fallback) {
    return params.contains(key) ? params.at(key).get<double>() : fallback;
  };
  if (kind == "circle") return ManifoldShape(Circle{get("radius", 1.0)});
  if (kind == "sphere") return ManifoldShape(Sphere{get("radius", 1.0)});
  if (kind == "torus") {
    return ManifoldShape(
        Torus{get("major_radius", 2.0), get("minor_radius", 0.5)});
  }
  if (kind == "swissroll" || kind == "swiss_roll") {
    return ManifoldShape(SwissRoll{get("turns", 1.5), get("height", 1.0)});
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown manifold kind '", kind, "'"));
}

// Row template shared by the three methods of one (cell, epsilon).
MetricRow BaseRow(const std::string& manifold, int n, double sigma,
                  double epsilon, double delta, int dim, uint64_t seed,
                  const DenoiseConfig& fixed) {
  MetricRow row;
  row.manifold = manifold;
  row.n = n;
  row.sigma = sigma;
  row.epsilon = epsilon;
  row.delta = delta;
  row.ambient_dim = dim;
  row.seed = seed;
  row.c_proj = fixed.c_proj;
  row.c_mean = fixed.c_mean;
  return row;
}

absl::Status FillMetrics(MetricRow& row, const Points& released,
                         const PointCloud& queries, const ManifoldSpec& spec) {
  std::vector<double> clean(released.rows());
  for (Eigen::Index q = 0; q < released.rows(); ++q) {
    clean[q] = (released.row(q) - queries.clean().row(q)).norm();
  }
  absl::StatusOr<std::vector<double>> manifold =
      DistancesToManifold(released, spec);
  if (!manifold.ok()) return manifold.status();
  row.mean_dist_clean = Mean(clean);
  row.median_dist_clean = Median(clean);
  row.mean_dist_manifold = Mean(*manifold);
  row.median_dist_manifold = Median(*manifold);
  return absl::OkStatus();
}

int CountNoNeighbor(const DenoiseReport& report) {
  int count = 0;
  for (const QueryResult& r : report.queries) {
    count += r.status == QueryStatus::kNoNeighbor ? 1 : 0;
  }
  return count;
}

}  // namespace

absl::StatusOr<std::vector<double>> DistToClean(const DenoiseReport& report,
                                                const PointCloud& queries) {
  if (!queries.has_clean()) {
    return absl::InvalidArgumentError("queries carry no clean pairing");
  }
  if (queries.size() != static_cast<int>(report.queries.size())) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "report has %d queries but the clean pairing has %d",
        report.queries.size(), queries.size()));
  }
  std::vector<double> out(report.queries.size());
  for (size_t q = 0; q < out.size(); ++q) {
    const Vector& x = report.queries[q].final_point;
    if (x.size() != queries.dim()) {
      return absl::InvalidArgumentError("dimension mismatch with clean points");
    }
    out[q] = (x - queries.clean().row(q).transpose()).norm();
  }
  return out;
}

absl::StatusOr<std::vector<double>> DistancesToManifold(
    const Points& points, const ManifoldSpec& spec) {
  std::vector<double> out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    absl::StatusOr<double> d =
        DistanceToManifold(spec, points.row(i).transpose());
    if (!d.ok()) return d.status();
    out[i] = *d;
  }
  return out;
}

absl::StatusOr<std::vector<double>> DistToManifoldMetric(
    const DenoiseReport& report, const ManifoldSpec& spec) {
  return DistancesToManifold(report.FinalPoints(), spec);
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

absl::StatusOr<SyntheticDataset> GenerateDataset(const ManifoldSpec& spec,
                                                 int n, int query_count,
                                                 double sigma, NoiseKind noise,
                                                 uint64_t seed) {
  if (!(sigma > 0.0)) {
    return absl::InvalidArgumentError("sigma must be positive");
  }
  RandomStream ref_sample = MakeStream(seed, {1});
  RandomStream ref_noise = MakeStream(seed, {2});
  RandomStream query_sample = MakeStream(seed, {3});
  RandomStream query_noise = MakeStream(seed, {4});
  absl::StatusOr<PointCloud> clean_refs = SampleManifold(spec, n, ref_sample);
  if (!clean_refs.ok()) return clean_refs.status();
  absl::StatusOr<PointCloud> refs =
      AddNoise(*clean_refs, NoiseModel{noise, sigma}, ref_noise);
  if (!refs.ok()) return refs.status();
  if (query_count == 0) return SyntheticDataset{*std::move(refs), PointCloud()};
  absl::StatusOr<PointCloud> clean_queries =
      SampleManifold(spec, query_count, query_sample);
  if (!clean_queries.ok()) return clean_queries.status();
  absl::StatusOr<PointCloud> queries = AddNoise(
      *clean_queries, NoiseModel{noise, std::sqrt(sigma)}, query_noise);
  if (!queries.ok()) return queries.status();
  return SyntheticDataset{*std::move(refs), *std::move(queries)};
}

absl::StatusOr<SweepConfig> ParseSweepConfig(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed sweep config: ", e.what()));
  }
  if (!j.is_object()) {
    return absl::InvalidArgumentError("sweep config must be a JSON object");
  }
  static const std::set<std::string> kKnown = {
      "manifold", "n",     "sigma",       "epsilon", "ambient_dim",
      "repeats",  "seed",  "query_count", "noise",   "fixed",
      "delta",    "output"};
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.count(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown sweep config field '", key, "'"));
    }
  }
  SweepConfig cfg;
  try {
    if (j.contains("manifold")) {
      absl::StatusOr<ManifoldShape> shape = ParseManifold(j.at("manifold"));
      if (!shape.ok()) return shape.status();
      cfg.manifold = *shape;
    }
    auto n = ReadGrid<int>(j, "n");
    auto sigma = ReadGrid<double>(j, "sigma");
    auto eps = ReadGrid<double>(j, "epsilon");
    auto dims = ReadGrid<int>(j, "ambient_dim");
    for (const absl::Status& s :
         {n.status(), sigma.status(), eps.status(), dims.status()}) {
      if (!s.ok()) return s;
    }
    cfg.n = *n;
    cfg.sigma = *sigma;
    cfg.epsilon = *eps;
    cfg.ambient_dim = *dims;
    cfg.repeats = j.value("repeats", 1);
    cfg.seed = j.value("seed", uint64_t{0});
    cfg.query_count = j.value("query_count", 200);
    cfg.delta = j.value("delta", 0.1);
    cfg.output = j.value("output", std::string());
    const std::string noise = j.value("noise", std::string("bounded"));
    if (noise == "bounded") {
      cfg.noise = NoiseKind::kBoundedBall;
    } else if (noise == "gaussian") {
      cfg.noise = NoiseKind::kGaussian;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown noise model '", noise, "'"));
    }
    cfg.fixed.d = 0;
    if (j.contains("fixed")) {
      const Json& f = j.at("fixed");
      cfg.fixed.d = f.value("d", 0);
      if (f.contains("h") && !(f.at("h").is_string() &&
                               f.at("h").get<std::string>() == "auto")) {
        cfg.fixed.h = f.at("h").get<double>();
      }
      cfg.fixed.steps = f.value("steps", cfg.fixed.steps);
      cfg.fixed.beta = f.value("beta", cfg.fixed.beta);
      cfg.fixed.theta = f.value("theta", cfg.fixed.theta);
      cfg.fixed.c_proj = f.value("c_proj", cfg.fixed.c_proj);
      cfg.fixed.c_mean = f.value("c_mean", cfg.fixed.c_mean);
      cfg.fixed.c1 = f.value("c1", cfg.fixed.c1);
      if (f.contains("min_neighbors") && !f.at("min_neighbors").is_null()) {
        cfg.fixed.min_neighbors = f.at("min_neighbors").get<int>();
      }
    }
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed sweep config: ", e.what()));
  }
  if (cfg.repeats < 1) {
    return absl::InvalidArgumentError("repeats must be at least 1");
  }
  if (cfg.query_count < 1) {
    return absl::InvalidArgumentError("query_count must be at least 1");
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  return cfg;
}

absl::StatusOr<SweepConfig> LoadSweepConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseSweepConfig(buffer.str());
}

SweepConfig WithDefaultGrids(SweepConfig cfg) {
  const std::vector<double> kEpsilons = {0.05, 0.10, 0.30, 0.50,
                                         0.70, 1.0,  2.0,  3.0};
  const std::vector<int> kSizes = {10000, 20000, 30000, 40000, 50000};
  std::vector<int> n = kSizes;
  std::vector<double> sigma;
  std::vector<double> eps = kEpsilons;
  std::vector<int> dims;
  if (std::holds_alternative<Circle>(cfg.manifold)) {
    sigma = {0.05, 0.10, 0.20, 0.30, 0.40};
    dims = {2};
  } else if (std::holds_alternative<Sphere>(cfg.manifold)) {
    n = {30000};
    sigma = {0.30};
    eps = {1.0};
    dims = {5, 10, 20, 50, 100};
  } else {
    sigma = {0.05, 0.10, 0.15, 0.25, 0.35};
    dims = {3};
  }
  if (cfg.n.empty()) cfg.n = n;
  if (cfg.sigma.empty()) cfg.sigma = sigma;
  if (cfg.epsilon.empty()) cfg.epsilon = eps;
  if (cfg.ambient_dim.empty()) cfg.ambient_dim = dims;
  return cfg;
}

std::string MetricCsvHeader() {
  return "manifold,n,sigma,epsilon,delta,ambient_dim,seed,method,status,"
         "mean_dist_clean,median_dist_clean,mean_dist_manifold,"
         "median_dist_manifold,runtime_seconds,bandwidth,c_proj,c_mean,"
         "no_neighbor,error";
}

std::string MetricRowToCsv(const MetricRow& r) {
  return absl::StrFormat(
      "%s,%d,%.17g,%.17g,%.17g,%d,%d,%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g,"
      "%.17g,%.17g,%.17g,%d,%s",
      r.manifold, r.n, r.sigma, r.epsilon, r.delta, r.ambient_dim, r.seed,
      r.method, r.status, r.mean_dist_clean, r.median_dist_clean,
      r.mean_dist_manifold, r.median_dist_manifold, r.runtime_seconds,
      r.bandwidth, r.c_proj, r.c_mean, r.no_neighbor, Sanitize(r.error));
}

std::string MetricRow::Key() const {
  std::vector<std::string> fields = absl::StrSplit(MetricRowToCsv(*this), ',');
  fields.resize(8);
  return absl::StrJoin(fields, "|");
}

std::vector<MetricRow> RunSweepCell(const SweepConfig& cfg, int n,
                                    double sigma, int ambient_dim,
                                    const std::vector<double>& epsilons,
                                    uint64_t seed) {
  std::vector<MetricRow> rows;
  const std::string name = ManifoldName(cfg.manifold);
  auto fail_all = [&](const absl::Status& status) {
    rows.clear();
    for (double eps : epsilons) {
      for (const char* method : {"raw", "nonprivate_md", "dp_md"}) {
        MetricRow row =
            BaseRow(name, n, sigma, eps, cfg.delta, ambient_dim, seed, cfg.fixed);
        row.method = method;
        row.status = "error";
        row.error = std::string(status.message());
        rows.push_back(row);
      }
    }
    return rows;
  };

  absl::StatusOr<ManifoldSpec> spec =
      ManifoldSpec::Create(cfg.manifold, ambient_dim);
  if (!spec.ok()) return fail_all(spec.status());
  absl::StatusOr<SyntheticDataset> data = GenerateDataset(
      *spec, n, cfg.query_count, sigma, cfg.noise, seed);
  if (!data.ok()) return fail_all(data.status());

  DenoiseConfig base = cfg.fixed;
  if (base.d == 0) base.d = spec->intrinsic_dim();
  base.sigma = sigma;
  base.seed = DeriveSeed(seed, {5});
  base.budget.reset();
  absl::StatusOr<double> h = ResolveBandwidth(base, n);
  if (!h.ok()) return fail_all(h.status());

  const auto build_start = Clock::now();
  absl::StatusOr<ReferenceModel> model = ReferenceModel::Build(
      data->refs, base.d, *h, base.min_neighbors.value_or(base.d + 1));
  const double build_seconds = Seconds(build_start);
  if (!model.ok()) return fail_all(model.status());

  const auto np_start = Clock::now();
  absl::StatusOr<DenoiseReport> nonprivate =
      DenoiseQueries(*model, data->queries, base);
  const double np_seconds = build_seconds + Seconds(np_start);

  for (double eps : epsilons) {
    MetricRow raw =
        BaseRow(name, n, sigma, eps, cfg.delta, ambient_dim, seed, cfg.fixed);
    raw.bandwidth = *h;
    raw.method = "raw";
    if (absl::Status s = FillMetrics(raw, data->queries.coords(),
                                     data->queries, *spec);
        !s.ok()) {
      raw.status = "error";
      raw.error = std::string(s.message());
    }
    rows.push_back(raw);

    MetricRow np = raw;
    np.method = "nonprivate_md";
    np.status = "ok";
    np.error.clear();
    if (!nonprivate.ok()) {
      np.status = "error";
      np.error = std::string(nonprivate.status().message());
    } else {
      np.runtime_seconds = np_seconds;
      np.no_neighbor = CountNoNeighbor(*nonprivate);
      if (absl::Status s = FillMetrics(np, nonprivate->FinalPoints(),
                                       data->queries, *spec);
          !s.ok()) {
        np.status = "error";
        np.error = std::string(s.message());
      }
    }
    rows.push_back(np);

    MetricRow dp = raw;
    dp.method = "dp_md";
    dp.status = "ok";
    dp.error.clear();
    absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Create(eps, cfg.delta);
    if (!budget.ok()) {
      dp.status = "error";
      dp.error = std::string(budget.status().message());
      rows.push_back(dp);
      continue;
    }
    DenoiseConfig private_cfg = base;
    private_cfg.budget = *budget;
    const auto dp_start = Clock::now();
    absl::StatusOr<DenoiseReport> released =
        DenoiseQueries(*model, data->queries, private_cfg);
    dp.runtime_seconds = build_seconds + Seconds(dp_start);
    if (!released.ok()) {
      dp.status = "error";
      dp.error = std::string(released.status().message());
    } else {
      dp.no_neighbor = CountNoNeighbor(*released);
      if (absl::Status s = FillMetrics(dp, released->FinalPoints(),
                                       data->queries, *spec);
          !s.ok()) {
        dp.status = "error";
        dp.error = std::string(s.message());
      }
    }
    rows.push_back(dp);
  }
  return rows;
}

absl::StatusOr<std::vector<MetricRow>> RunSweep(const SweepConfig& config) {
  const SweepConfig cfg = WithDefaultGrids(config);
  std::set<std::string> done;
  bool need_header = true;
  if (!cfg.output.empty()) {
    std::ifstream existing(cfg.output);
    std::string line;
    if (existing && std::getline(existing, line)) {
      if (line != MetricCsvHeader()) {
        return absl::FailedPreconditionError(absl::StrCat(
            cfg.output, " exists but is not a sweep output file"));
      }
      need_header = false;
      while (std::getline(existing, line)) {
        std::vector<std::string> fields = absl::StrSplit(line, ',');
        if (fields.size() < 8) continue;
        fields.resize(8);
        done.insert(absl::StrJoin(fields, "|"));
      }
    }
  }
  std::ofstream out;
  if (!cfg.output.empty()) {
    out.open(cfg.output, std::ios::app);
    if (!out) {
      return absl::UnavailableError(absl::StrCat("cannot open ", cfg.output));
    }
    if (need_header) out << MetricCsvHeader() << "\n" << std::flush;
  }

  std::vector<MetricRow> computed;
  const std::string name = ManifoldName(cfg.manifold);
  for (int dim : cfg.ambient_dim) {
    for (int n : cfg.n) {
      for (double sigma : cfg.sigma) {
        for (int r = 0; r < cfg.repeats; ++r) {
          const uint64_t seed = cfg.seed + static_cast<uint64_t>(r);
          std::vector<double> pending;
          for (double eps : cfg.epsilon) {
            for (const char* method : {"raw", "nonprivate_md", "dp_md"}) {
              MetricRow probe =
                  BaseRow(name, n, sigma, eps, cfg.delta, dim, seed, cfg.fixed);
              probe.method = method;
              if (!done.count(probe.Key())) {
                pending.push_back(eps);
                break;
              }
            }
          }
          if (pending.empty()) continue;
          for (MetricRow& row :
               RunSweepCell(cfg, n, sigma, dim, pending, seed)) {
            const std::string key = row.Key();
            if (done.count(key)) continue;
            done.insert(key);
            if (out.is_open()) out << MetricRowToCsv(row) << "\n" << std::flush;
            computed.push_back(std::move(row));
          }
        }
      }
    }
  }
  return computed;
}

}  // namespace dpmd
