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

#ifndef DPMD_PRIVACY_H_
#define DPMD_PRIVACY_H_

#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpmd {

// Conversion from rho-zCDP to (epsilon, delta)-DP:
//   epsilon = rho + 2 sqrt(rho ln(1/delta)).
absl::StatusOr<double> ZcdpToEpsilon(double rho, double delta);

// Inverse of ZcdpToEpsilon in rho: rho = (sqrt(L + epsilon) - sqrt(L))^2 with
// L = ln(1/delta).
absl::StatusOr<double> EpsilonToZcdp(double epsilon, double delta);

// Inputs to the l2-sensitivity bounds of the local geometric summaries. The
// bounds are order-only, so the absolute constants are configuration.
struct SensitivityParams {
  int n = 1;
  double h = 1.0;
  int d = 1;
  double c_proj = 1.0;
  double c_mean = 1.0;
};

absl::Status ValidateSensitivityParams(const SensitivityParams& p);

// Frobenius sensitivity of a (weighted) local tangent projector:
// c_proj / (n h^d).
double ProjectorSensitivity(const SensitivityParams& p);

// l2 sensitivity of the kernel-weighted local mean: c_mean / (n h^(d-1)).
double MeanSensitivity(const SensitivityParams& p);

// Gaussian-mechanism scale for rho-zCDP: sigma = delta2 / sqrt(2 rho).
absl::StatusOr<double> GaussianScaleForZcdp(double delta2, double rho);

// Classical (epsilon, delta) calibration
//   sigma = sqrt(2 ln(c1 / delta)) * delta2 / epsilon,
// valid for 0 < epsilon < 1. c1 = 1.25 is the textbook constant.
absl::StatusOr<double> GaussianScaleForApproxDp(double delta2, double epsilon,
                                                double delta,
                                                double c1 = 1.25);

// An (epsilon, delta) target and the total zCDP budget it converts to.
class PrivacyBudget {
 public:
  static absl::StatusOr<PrivacyBudget> Create(double epsilon, double delta);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  double rho_total() const { return rho_total_; }

 private:
  PrivacyBudget(double epsilon, double delta, double rho)
      : epsilon_(epsilon), delta_(delta), rho_total_(rho) {}

  double epsilon_;
  double delta_;
  double rho_total_;
};

// Per-(query, step) zCDP allocation for the projector and mean mechanisms.
// Built uniformly: rho_P = theta rho_tot / (m T), rho_m = (1 - theta) rho_tot
// / (m T).
class BudgetSchedule {
 public:
  int queries() const { return queries_; }
  int steps() const { return steps_; }
  double theta() const { return theta_; }
  double rho_total() const { return rho_total_; }

  double rho_projector(int query, int step) const {
    return rho_p_[Offset(query, step)];
  }
  double rho_mean(int query, int step) const {
    return rho_m_[Offset(query, step)];
  }
  // Sum of both mechanisms over every step of one query.
  double QueryTotal(int query) const;

 private:
  friend absl::StatusOr<BudgetSchedule> MakeSchedule(const PrivacyBudget&,
                                                     int, int, double);
  size_t Offset(int query, int step) const {
    return static_cast<size_t>(query) * steps_ + step;
  }

  int queries_ = 0;
  int steps_ = 0;
  double theta_ = 0.5;
  double rho_total_ = 0.0;
  std::vector<double> rho_p_;
  std::vector<double> rho_m_;
};

// theta must lie strictly inside (0, 1): at either end one mechanism would
// receive zero budget and need infinite noise.
absl::StatusOr<BudgetSchedule> MakeSchedule(const PrivacyBudget& budget,
                                            int queries, int steps,
                                            double theta);

// Running zCDP ledger. Spends compose additively; a spend that would take the
// cumulative total past the budget by more than 1e-12 * max(1, total) is
// refused and leaves the ledger untouched. Not internally synchronized.
class PrivacyAccountant {
 public:
  explicit PrivacyAccountant(double rho_total);

  absl::Status Spend(double rho);

  double total() const { return total_; }
  double spent() const { return spent_ + compensation_; }
  double remaining() const;

 private:
  double total_;
  // Neumaier-compensated running sum.
  double spent_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace dpmd

#endif  // DPMD_PRIVACY_H_
