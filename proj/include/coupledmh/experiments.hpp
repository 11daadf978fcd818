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
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coupledmh/core_model.hpp"
#include "coupledmh/cost.hpp"
#include "coupledmh/kernel_couplings.hpp"
#include "coupledmh/rng.hpp"

namespace coupledmh {

struct MeetingRecord {
  std::int64_t replication = 0;
  std::uint64_t seed = 0;
  std::int64_t tau = 0;
  bool capped = false;
  /// Set when the coupling raised (e.g. a rejection-loop cap); tau then holds
  /// the iteration at which it happened.
  bool failed = false;
  std::string error;
  CostCounters total_cost;
};

/// Runs the coupled chains from (x0, y0) until X_t = Y_t or `max_iterations`
/// transitions. tau counts coupled transitions; tau = 0 iff x0 == y0. When
/// `distances` is given, |X_t - Y_t| is appended for t = 0..tau.
MeetingRecord run_coupled_chain(const CoupledKernel& coupled, const Point& x0, const Point& y0,
                                std::int64_t max_iterations, RngStream& rng,
                                std::vector<double>* distances = nullptr);

/// The six coupling families compared in the experiments.
enum class CouplingChoice { SQ_MI, SQ_MR, MI, MR, C_MI, C_MR };

const std::vector<CouplingChoice>& all_coupling_choices();
std::string label(CouplingChoice c);
/// Parses "SQ+MI", "MI", "C+MR", ... Throws InvalidArgument.
CouplingChoice parse_coupling_choice(const std::string& s);
/// True for the families whose residuals are coupled by reflection.
bool uses_reflection_residuals(CouplingChoice c);

/// Builds the coupled kernel for `choice`; proposal couplings are built on
/// `kernel.proposal`, so a drifted proposal gives the drifted reflection.
CoupledKernel build_coupled_kernel(CouplingChoice choice, const MhKernel& kernel,
                                   std::int64_t loop_cap = kDefaultLoopCap);

struct ReplicationOptions {
  std::int64_t replications = 1000;
  std::int64_t max_iterations = 100'000;
  std::uint64_t base_seed = 1;
  int threads = 1;
  /// Fixed initial states; when unset both chains start from independent
  /// target draws.
  std::optional<Point> x0;
  std::optional<Point> y0;
};

/// Replication i uses RngStream(base_seed, i); results are indexed by i and
/// do not depend on `threads`.
std::vector<MeetingRecord> run_replications(const CoupledKernel& coupled,
                                            const ReplicationOptions& opts);

struct MeetingSummary {
  std::string coupling;
  int dim = 1;
  double mean_tau = 0.0;
  double se_tau = 0.0;
  std::int64_t n = 0;
  std::int64_t capped = 0;
  std::int64_t failed = 0;
  CostCounters cost;
};

/// Mean and standard error (sample sd / sqrt(n)) of tau over replications
/// that met; capped and failed ones are counted separately.
MeetingSummary summarize(const std::vector<MeetingRecord>& records);

struct ExpoConfig {
  double kappa = 3.0;
  double sigma2 = 3.0;
  std::vector<CouplingChoice> couplings = all_coupling_choices();
  ReplicationOptions run{10'000, 100'000, 1, 1, {}, {}};
};

struct GaussianConfig {
  double ell = 2.38;
  std::vector<int> dims{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<CouplingChoice> couplings = all_coupling_choices();
  ReplicationOptions run{1'000, 1'000'000, 1, 1, {}, {}};
};

struct TraceConfig {
  double ell = 2.38;
  int dim = 100;
  std::int64_t horizon = 1000;
  std::vector<CouplingChoice> couplings = all_coupling_choices();
  ReplicationOptions run{1'000, 1000, 1, 1, {}, {}};
};

struct DistanceTrace {
  std::string coupling;
  int dim = 1;
  std::vector<double> mean_distance;  // t = 0..horizon
  std::int64_t n = 0;
};

/// Expo(1) target with N(z + kappa, sigma2) proposals.
std::vector<MeetingSummary> expo_experiment(const ExpoConfig& config);

/// N(0, I_d) target with N(z, ell^2 / d I_d) proposals, one row per
/// (coupling, d).
std::vector<MeetingSummary> gaussian_experiment(const GaussianConfig& config);

/// Mean |X_t - Y_t| per iteration; met pairs contribute zero afterwards.
std::vector<DistanceTrace> distance_trace_experiment(const TraceConfig& config);

void write_expo_csv(std::ostream& out, const std::vector<MeetingSummary>& rows);
void write_gaussian_csv(std::ostream& out, const std::vector<MeetingSummary>& rows);
void write_trace_csv(std::ostream& out, const std::vector<DistanceTrace>& traces);

}  // namespace coupledmh
