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

#include "dpmd/privacy.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"

namespace dpmd {
namespace {

absl::Status CheckDelta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> ZcdpToEpsilon(double rho, double delta) {
  if (absl::Status s = CheckDelta(delta); !s.ok()) return s;
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("rho must be finite and non-negative, got %g", rho));
  }
  return rho + 2.0 * std::sqrt(rho * std::log(1.0 / delta));
}

absl::StatusOr<double> EpsilonToZcdp(double epsilon, double delta) {
  if (absl::Status s = CheckDelta(delta); !s.ok()) return s;
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be finite and positive, got %g", epsilon));
  }
  const double l = std::log(1.0 / delta);
  // sqrt(L + eps) - sqrt(L), rewritten to avoid cancellation.
  const double root = epsilon / (std::sqrt(l + epsilon) + std::sqrt(l));
  return root * root;
}

absl::Status ValidateSensitivityParams(const SensitivityParams& p) {
  if (p.n < 1) return absl::InvalidArgumentError("n must be at least 1");
  if (!(p.h > 0.0) || !std::isfinite(p.h)) {
    return absl::InvalidArgumentError("bandwidth h must be positive");
  }
  if (p.d < 1) return absl::InvalidArgumentError("d must be at least 1");
  if (!(p.c_proj > 0.0) || !(p.c_mean > 0.0)) {
    return absl::InvalidArgumentError(
        "sensitivity constants must be positive");
  }
  return absl::OkStatus();
}

double ProjectorSensitivity(const SensitivityParams& p) {
  return p.c_proj / (p.n * std::pow(p.h, p.d));
}

double MeanSensitivity(const SensitivityParams& p) {
  return p.c_mean / (p.n * std::pow(p.h, p.d - 1));
}

absl::StatusOr<double> GaussianScaleForZcdp(double delta2, double rho) {
  if (!(delta2 > 0.0) || !std::isfinite(delta2)) {
    return absl::InvalidArgumentError("sensitivity must be positive");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "zCDP budget must be positive (got %g); zero budget needs infinite "
        "noise",
        rho));
  }
  return delta2 / std::sqrt(2.0 * rho);
}

absl::StatusOr<double> GaussianScaleForApproxDp(double delta2, double epsilon,
                                                double delta, double c1) {
  if (absl::Status s = CheckDelta(delta); !s.ok()) return s;
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "classical Gaussian calibration needs 0 < epsilon < 1, got %g",
        epsilon));
  }
  if (!(delta2 >= 0.0) || !std::isfinite(delta2)) {
    return absl::InvalidArgumentError("sensitivity must be non-negative");
  }
  if (!(c1 > delta)) {
    return absl::InvalidArgumentError("c1 must exceed delta");
  }
  return std::sqrt(2.0 * std::log(c1 / delta)) * delta2 / epsilon;
}

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon,
                                                    double delta) {
  absl::StatusOr<double> rho = EpsilonToZcdp(epsilon, delta);
  if (!rho.ok()) return rho.status();
  return PrivacyBudget(epsilon, delta, *rho);
}

double BudgetSchedule::QueryTotal(int query) const {
  double total = 0.0;
  for (int t = 0; t < steps_; ++t) {
    total += rho_p_[Offset(query, t)] + rho_m_[Offset(query, t)];
  }
  return total;
}

absl::StatusOr<BudgetSchedule> MakeSchedule(const PrivacyBudget& budget,
                                            int queries, int steps,
                                            double theta) {
  if (queries < 1 || steps < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "schedule needs at least one query and one step (got m=%d, T=%d)",
        queries, steps));
  }
  if (!(theta > 0.0 && theta < 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "theta must lie strictly inside (0, 1), got %g", theta));
  }
  BudgetSchedule schedule;
  schedule.queries_ = queries;
  schedule.steps_ = steps;
  schedule.theta_ = theta;
  schedule.rho_total_ = budget.rho_total();
  const double per_step =
      budget.rho_total() / (static_cast<double>(queries) * steps);
  const size_t cells = static_cast<size_t>(queries) * steps;
  schedule.rho_p_.assign(cells, theta * per_step);
  schedule.rho_m_.assign(cells, (1.0 - theta) * per_step);
  return schedule;
}

PrivacyAccountant::PrivacyAccountant(double rho_total) : total_(rho_total) {}

absl::Status PrivacyAccountant::Spend(double rho) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("cannot spend rho=%g", rho));
  }
  const double slack = 1e-12 * std::max(1.0, total_);
  if (spent() + rho > total_ + slack) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "privacy budget exceeded: spending %.17g with %.17g remaining", rho,
        remaining()));
  }
  const double sum = spent_ + rho;
  if (std::abs(spent_) >= std::abs(rho)) {
    compensation_ += (spent_ - sum) + rho;
  } else {
    compensation_ += (rho - sum) + spent_;
  }
  spent_ = sum;
  return absl::OkStatus();
}

double PrivacyAccountant::remaining() const {
  return std::max(0.0, total_ - spent());
}

}  // namespace dpmd
