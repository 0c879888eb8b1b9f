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

#include "dpmd/cli.h"

#include <algorithm>
#include <cmath>
#include <optional>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpmd/denoiser.h"
#include "dpmd/experiments.h"
#include "dpmd/manifolds.h"
#include "dpmd/privacy.h"
#include "dpmd/report.h"

namespace dpmd {
namespace {

struct GenerateArgs {
  std::string manifold;
  int n = 0;
  double sigma = 0.0;
  int ambient_dim = 0;
  int query_count = 200;
  uint64_t seed = 0;
  std::string noise = "bounded";
  std::string out;
  std::string clean_out;
  std::string queries_out;
  std::string queries_clean_out;
};

struct DenoiseArgs {
  std::string refs;
  std::string queries;
  int d = 1;
  std::string h = "auto";
  std::optional<double> sigma;
  int steps = 3;
  double beta = 2.0;
  double epsilon = 1.0;
  double delta = 0.1;
  double theta = 0.5;
  double c_proj = 1.0;
  double c_mean = 1.0;
  double c1 = 1.25;
  uint64_t seed = 0;
  std::optional<int> min_neighbors;
  std::string out;
  std::string report;
  std::string metrics;
  std::string queries_clean;
  bool nonprivate = false;
  bool trajectory = false;
};

struct AccountArgs {
  double epsilon = 1.0;
  double delta = 0.1;
  int queries = 1;
  int steps = 3;
  double theta = 0.5;
  int n = 1;
  double h = 1.0;
  int d = 1;
  double c_proj = 1.0;
  double c_mean = 1.0;
};

// "<dir>/<stem><suffix>" for `path` with its extension removed.
std::string SiblingPath(const std::string& path, const std::string& suffix) {
  const size_t slash = path.find_last_of('/');
  const size_t dot = path.find_last_of('.');
  const bool has_ext =
      dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? path.substr(0, dot) : path) + suffix;
}

absl::StatusOr<ManifoldShape> ShapeFromName(const std::string& name) {
  if (name == "circle") return ManifoldShape(Circle{});
  if (name == "torus") return ManifoldShape(Torus{});
  if (name == "swissroll") return ManifoldShape(SwissRoll{});
  if (name == "sphere") return ManifoldShape(Sphere{});
  return absl::InvalidArgumentError(absl::StrCat("unknown manifold ", name));
}

absl::Status RunGenerate(const GenerateArgs& a, std::ostream& out) {
  absl::StatusOr<ManifoldShape> shape = ShapeFromName(a.manifold);
  if (!shape.ok()) return shape.status();
  int dim = a.ambient_dim;
  if (dim == 0) dim = std::holds_alternative<Circle>(*shape) ? 2 : 3;
  absl::StatusOr<ManifoldSpec> spec = ManifoldSpec::Create(*shape, dim);
  if (!spec.ok()) return spec.status();
  const NoiseKind noise =
      a.noise == "gaussian" ? NoiseKind::kGaussian : NoiseKind::kBoundedBall;
  absl::StatusOr<SyntheticDataset> data =
      GenerateDataset(*spec, a.n, a.query_count, a.sigma, noise, a.seed);
  if (!data.ok()) return data.status();
  if (absl::Status s = WritePointsCsv(a.out, data->refs.coords()); !s.ok()) {
    return s;
  }
  if (!a.clean_out.empty()) {
    if (absl::Status s = WritePointsCsv(a.clean_out, data->refs.clean());
        !s.ok()) {
      return s;
    }
  }
  out << absl::StrFormat("wrote %d %s references in R^%d to %s\n", a.n,
                         spec->name(), dim, a.out);
  if (a.query_count > 0) {
    const std::string queries_out = a.queries_out.empty()
                                        ? SiblingPath(a.out, "_queries.csv")
                                        : a.queries_out;
    const std::string queries_clean_out =
        a.queries_clean_out.empty() ? SiblingPath(a.out, "_queries_clean.csv")
                                    : a.queries_clean_out;
    if (absl::Status s = WritePointsCsv(queries_out, data->queries.coords());
        !s.ok()) {
      return s;
    }
    if (absl::Status s =
            WritePointsCsv(queries_clean_out, data->queries.clean());
        !s.ok()) {
      return s;
    }
    out << absl::StrFormat("wrote %d queries to %s (clean: %s)\n",
                           a.query_count, queries_out, queries_clean_out);
  }
  return absl::OkStatus();
}

absl::Status RunDenoise(const DenoiseArgs& a, std::ostream& out) {
  absl::StatusOr<Points> refs = ReadPointsCsv(a.refs);
  if (!refs.ok()) return refs.status();
  absl::StatusOr<Points> queries = ReadPointsCsv(a.queries);
  if (!queries.ok()) return queries.status();
  if (refs->cols() != queries->cols()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dimension mismatch: references are %d-dimensional, queries are "
        "%d-dimensional",
        refs->cols(), queries->cols()));
  }
  std::optional<Points> clean;
  if (!a.queries_clean.empty()) {
    absl::StatusOr<Points> c = ReadPointsCsv(a.queries_clean);
    if (!c.ok()) return c.status();
    clean = *std::move(c);
  }

  DenoiseConfig cfg;
  if (a.h != "auto") {
    double h;
    if (!absl::SimpleAtod(a.h, &h)) {
      return absl::InvalidArgumentError(
          absl::StrCat("--h must be 'auto' or a number, got ", a.h));
    }
    cfg.h = h;
  } else if (!a.sigma.has_value()) {
    return absl::InvalidArgumentError("--h auto requires --sigma");
  }
  cfg.sigma = a.sigma;
  cfg.d = a.d;
  cfg.steps = a.steps;
  cfg.beta = a.beta;
  cfg.theta = a.theta;
  cfg.c_proj = a.c_proj;
  cfg.c_mean = a.c_mean;
  cfg.c1 = a.c1;
  cfg.seed = a.seed;
  cfg.min_neighbors = a.min_neighbors;
  cfg.record_trajectory = a.trajectory;
  if (!a.nonprivate) {
    absl::StatusOr<PrivacyBudget> budget =
        PrivacyBudget::Create(a.epsilon, a.delta);
    if (!budget.ok()) return budget.status();
    cfg.budget = *budget;
  }

  absl::StatusOr<PointCloud> ref_cloud = PointCloud::Create(*std::move(refs));
  if (!ref_cloud.ok()) return ref_cloud.status();
  absl::StatusOr<PointCloud> query_cloud =
      PointCloud::Create(*std::move(queries));
  if (!query_cloud.ok()) return query_cloud.status();
  absl::StatusOr<DenoiseReport> report =
      DenoiseQueries(*ref_cloud, *query_cloud, cfg);
  if (!report.ok()) return report.status();

  if (absl::Status s = WritePointsCsv(a.out, report->FinalPoints()); !s.ok()) {
    return s;
  }
  if (absl::Status s = WriteReportJson(a.report, *report); !s.ok()) return s;
  const std::string metrics =
      a.metrics.empty() ? SiblingPath(a.report, "_metrics.csv") : a.metrics;
  if (absl::Status s = WriteQueryMetricsCsv(metrics, *report, clean); !s.ok()) {
    return s;
  }
  int no_neighbor = 0;
  for (const QueryResult& r : report->queries) {
    no_neighbor += r.status == QueryStatus::kNoNeighbor ? 1 : 0;
  }
  out << absl::StrFormat(
      "denoised %d queries (h=%g, %d no_neighbor); rho spent %.6g of %.6g; "
      "report %s\n",
      report->queries.size(), report->bandwidth, no_neighbor,
      report->rho_spent, report->rho_total, a.report);
  return absl::OkStatus();
}

absl::Status RunAccount(const AccountArgs& a, std::ostream& out) {
  absl::StatusOr<PrivacyBudget> budget =
      PrivacyBudget::Create(a.epsilon, a.delta);
  if (!budget.ok()) return budget.status();
  absl::StatusOr<BudgetSchedule> schedule =
      MakeSchedule(*budget, a.queries, a.steps, a.theta);
  if (!schedule.ok()) return schedule.status();
  const SensitivityParams params{a.n, a.h, a.d, a.c_proj, a.c_mean};
  if (absl::Status s = ValidateSensitivityParams(params); !s.ok()) return s;
  const double delta_p = ProjectorSensitivity(params);
  const double delta_m = MeanSensitivity(params);
  out << "query,step,rho_P,rho_m,sigma_P,sigma_m\n";
  for (int q = 0; q < a.queries; ++q) {
    for (int t = 0; t < a.steps; ++t) {
      const double rho_p = schedule->rho_projector(q, t);
      const double rho_m = schedule->rho_mean(q, t);
      absl::StatusOr<double> sigma_p = GaussianScaleForZcdp(delta_p, rho_p);
      absl::StatusOr<double> sigma_m = GaussianScaleForZcdp(delta_m, rho_m);
      if (!sigma_p.ok()) return sigma_p.status();
      if (!sigma_m.ok()) return sigma_m.status();
      out << absl::StrFormat("%d,%d,%.17g,%.17g,%.17g,%.17g\n", q, t, rho_p,
                             rho_m, *sigma_p, *sigma_m);
    }
  }
  return absl::OkStatus();
}

absl::Status RunSweepCommand(const std::string& config_path,
                             const std::string& output, std::ostream& out) {
  absl::StatusOr<SweepConfig> cfg = LoadSweepConfig(config_path);
  if (!cfg.ok()) return cfg.status();
  if (!output.empty()) cfg->output = output;
  if (cfg->output.empty()) {
    return absl::InvalidArgumentError(
        "sweep needs an output path (config 'output' or --output)");
  }
  absl::StatusOr<std::vector<MetricRow>> rows = RunSweep(*cfg);
  if (!rows.ok()) return rows.status();
  int errors = 0;
  for (const MetricRow& r : *rows) errors += r.status == "ok" ? 0 : 1;
  out << absl::StrFormat("appended %d rows (%d with errors) to %s\n",
                         rows->size(), errors, cfg->output);
  return absl::OkStatus();
}

}  // namespace

int CliMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Differentially private manifold denoising", "dpmd"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate =
      app.add_subcommand("generate", "Sample a noisy synthetic manifold");
  generate->add_option("--manifold", gen.manifold)
      ->required()
      ->check(CLI::IsMember({"circle", "torus", "swissroll", "sphere"}));
  generate->add_option("--n", gen.n, "Reference count")
      ->required()
      ->check(CLI::PositiveNumber);
  generate->add_option("--sigma", gen.sigma, "Reference noise level")
      ->required()
      ->check(CLI::PositiveNumber);
  generate->add_option("--ambient-dim", gen.ambient_dim,
                       "Ambient dimension (default 2 for circle, else 3)");
  generate->add_option("--query-count", gen.query_count,
                       "Queries to draw at noise level sqrt(sigma)")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--seed", gen.seed);
  generate->add_option("--noise", gen.noise)
      ->check(CLI::IsMember({"bounded", "gaussian"}));
  generate->add_option("--out", gen.out, "Noisy reference CSV")->required();
  generate->add_option("--clean-out", gen.clean_out, "Clean reference CSV");
  generate->add_option("--queries-out", gen.queries_out,
                       "Query CSV (default <out>_queries.csv)");
  generate->add_option("--queries-clean-out", gen.queries_clean_out,
                       "Clean query CSV (default <out>_queries_clean.csv)");

  DenoiseArgs den;
  CLI::App* denoise =
      app.add_subcommand("denoise", "Denoise queries against references");
  denoise->add_option("--refs", den.refs)->required();
  denoise->add_option("--queries", den.queries)->required();
  denoise->add_option("--d", den.d, "Intrinsic dimension")->required();
  denoise->add_option("--h", den.h, "Bandwidth or 'auto'");
  denoise->add_option("--sigma", den.sigma,
                      "Reference noise level for --h auto");
  denoise->add_option("--steps", den.steps);
  denoise->add_option("--beta", den.beta);
  denoise->add_option("--epsilon", den.epsilon);
  denoise->add_option("--delta", den.delta);
  denoise->add_option("--theta", den.theta);
  denoise->add_option("--c-proj", den.c_proj);
  denoise->add_option("--c-mean", den.c_mean);
  denoise->add_option("--c1", den.c1);
  denoise->add_option("--seed", den.seed);
  denoise->add_option("--min-neighbors", den.min_neighbors);
  denoise->add_option("--out", den.out, "Denoised points CSV")->required();
  denoise->add_option("--report", den.report, "JSON report")->required();
  denoise->add_option("--metrics", den.metrics,
                      "Per-query CSV (default <report>_metrics.csv)");
  denoise->add_option("--queries-clean", den.queries_clean,
                      "Clean queries, adds dist_to_clean to the metrics");
  denoise->add_flag("--nonprivate", den.nonprivate);
  denoise->add_flag("--trajectory", den.trajectory,
                    "Record per-step iterates in the report");

  std::string sweep_config;
  std::string sweep_output;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("--config", sweep_config)->required();
  sweep->add_option("--output", sweep_output, "Overrides the config output");

  AccountArgs acc;
  CLI::App* account =
      app.add_subcommand("account", "Print the per-step budget schedule");
  account->add_option("--epsilon", acc.epsilon)->required();
  account->add_option("--delta", acc.delta)->required();
  account->add_option("--queries", acc.queries)->required();
  account->add_option("--steps", acc.steps)->required();
  account->add_option("--theta", acc.theta);
  account->add_option("--n", acc.n)->required();
  account->add_option("--h", acc.h)->required();
  account->add_option("--d", acc.d)->required();
  account->add_option("--c-proj", acc.c_proj);
  account->add_option("--c-mean", acc.c_mean);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "dpmd: error: " << e.what() << "\n";
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  absl::Status status;
  if (generate->parsed()) {
    status = RunGenerate(gen, out);
  } else if (denoise->parsed()) {
    status = RunDenoise(den, out);
  } else if (sweep->parsed()) {
    status = RunSweepCommand(sweep_config, sweep_output, out);
  } else if (account->parsed()) {
    status = RunAccount(acc, out);
  }
  if (!status.ok()) {
    err << "dpmd: error: " << status.message() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace dpmd
