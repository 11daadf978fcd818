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

namespace coupledmh {

/// Work done by one or more coupled transitions.
///
/// `density_evals` tallies evaluation units the way the cost analysis of the
/// coupled samplers does: each f-, q- or residual-valued quantity entering an
/// accept test counts once, and the reflection step of the full-kernel
/// reflection coupling counts once. The acceptance-ratio evaluation inside a
/// full MH step is not included; it is one per `p_draws`, so
/// `total_evaluations()` adds it back.
struct CostCounters {
  std::int64_t p_draws = 0;
  std::int64_t q_draws = 0;
  std::int64_t density_evals = 0;
  std::int64_t loop_iters = 0;

  std::int64_t total_evaluations() const { return density_evals + p_draws; }

  CostCounters& operator+=(const CostCounters& o) {
    p_draws += o.p_draws;
    q_draws += o.q_draws;
    density_evals += o.density_evals;
    loop_iters += o.loop_iters;
    return *this;
  }

  friend CostCounters operator+(CostCounters a, const CostCounters& b) { return a += b; }
  friend bool operator==(const CostCounters&, const CostCounters&) = default;
};

}  // namespace coupledmh
