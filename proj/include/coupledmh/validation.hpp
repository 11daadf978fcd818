// Copyright 2026 The coupledmh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coupledmh/core_model.hpp"
#include "coupledmh/experiments.hpp"

namespace coupledmh {

/// One-dimensional validation suite for the coupled kernels: atom masses and
/// KS tests for marginals, meeting frequency against the quadrature bounds,
/// cost counters, and faithfulness from x = y.
struct ValidationConfig {
  /// "normal" (N(0,1) target, N(z, sigma2) proposals) or "exponential"
  /// (Expo(1) target, N(z + kappa, sigma2) proposals).
  std::string target = "normal";
  double sigma2 = 10.0;
  double kappa = 3.0;
  /// Rule used by the coupled samplers. The oracles always use the MH rule,
  /// so anything else is a negative control.
  AcceptanceRule acceptance = AcceptanceRule::metropolis_hastings();
  std::string acceptance_name = "mh";
  std::vector<CouplingChoice> couplings = all_coupling_choices();
  std::vector<std::pair<double, double>> pairs{{0.25, 4.0}, {0.0, 1.0}, {-1.0, 3.0}};
  std::int64_t draws = 100'000;
  std::uint64_t seed = 1;
  double ks_alpha = 1e-3;
  double n_se = 3.0;
  double loop_moment_rel_tol = 0.05;
};

struct CheckResult {
  std::string check;
  std::string coupling;
  double x = 0.0;
  double y = 0.0;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// The MH kernel the oracles are computed for.
MhKernel reference_kernel(const ValidationConfig& config);

std::vector<CheckResult> run_validation(const ValidationConfig& config);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace coupledmh
