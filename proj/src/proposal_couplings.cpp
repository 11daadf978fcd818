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

#include "coupledmh/proposal_couplings.hpp"

#include <cmath>
#include <utility>

#include "coupledmh/errors.hpp"

namespace coupledmh {

namespace detail {
void throw_reflect_degenerate() {
  throw Error(ErrorCode::kInvalidArgument, "reflect: x == y, reflection direction undefined");
}
}  // namespace detail

ProposalPair sample_bqmi(const ProposalKernel& q, const Point& x, const Point& y, RngStream& rng,
                         CostCounters& cost, std::int64_t loop_cap) {
  Point xp = q.sample(x, rng);
  ++cost.q_draws;
  if (same_point(x, y)) return {xp, xp};

  const double lqx = q.log_density(x, xp);
  const double lqy = q.log_density(y, xp);
  cost.density_evals += 2;
  if (std::log(rng.uniform()) + lqx <= lqy) return {xp, xp};

  for (std::int64_t iter = 0;; ++iter) {
    if (iter >= loop_cap) throw LoopCapExceeded("sample_bqmi");
    ++cost.loop_iters;
    Point yt = q.sample(y, rng);
    ++cost.q_draws;
    const double ly = q.log_density(y, yt);
    const double lx = q.log_density(x, yt);
    cost.density_evals += 2;
    if (std::log(rng.uniform()) + ly > lx) return {std::move(xp), std::move(yt)};
  }
}

ProposalPair sample_bqmr(const ProposalKernel& q, const Point& x, const Point& y, RngStream& rng,
                         CostCounters& cost) {
  if (!q.spherically_symmetric())
    throw Error(ErrorCode::kInvalidArgument,
                "sample_bqmr: proposal kernel must be spherically symmetric");
  Point xp = q.sample(x, rng);
  ++cost.q_draws;
  if (same_point(x, y)) return {xp, xp};

  const double lqx = q.log_density(x, xp);
  const double lqy = q.log_density(y, xp);
  cost.density_evals += 2;
  if (std::log(rng.uniform()) + lqx <= lqy) return {xp, xp};

  Point yp = reflect(q.center(x), q.center(y), xp);
  return {std::move(xp), std::move(yp)};
}

ProposalPair sample_bqmr_drifted(double kappa, double sigma2, const Point& x, const Point& y,
                                 RngStream& rng) {
  if (x.size() != 1 || y.size() != 1)
    throw Error(ErrorCode::kInvalidArgument, "sample_bqmr_drifted: one-dimensional states only");
  CostCounters scratch;
  return sample_bqmr(ProposalKernel::drifted_gaussian(kappa, sigma2), x, y, rng, scratch);
}

namespace {

auto min_log_density(const ProposalKernel& q) {
  return [q](const Point& x, const Point& y, const Point& z) {
    return std::min(q.log_density(x, z), q.log_density(y, z));
  };
}

}  // namespace

ProposalCoupling bqmi_coupling(ProposalKernel q, std::int64_t loop_cap) {
  ProposalCoupling c;
  c.name = "MI";
  c.is_maximal = true;
  c.log_diagonal_density = min_log_density(q);
  c.sample_pair = [q = std::move(q), loop_cap](const Point& x, const Point& y, RngStream& rng,
                                               CostCounters& cost) {
    return sample_bqmi(q, x, y, rng, cost, loop_cap);
  };
  return c;
}

ProposalCoupling bqmr_coupling(ProposalKernel q) {
  if (!q.spherically_symmetric())
    throw Error(ErrorCode::kInvalidArgument,
                "bqmr_coupling: proposal kernel must be spherically symmetric");
  ProposalCoupling c;
  c.name = "MR";
  c.is_maximal = true;
  c.log_diagonal_density = min_log_density(q);
  c.sample_pair = [q = std::move(q)](const Point& x, const Point& y, RngStream& rng,
                                     CostCounters& cost) {
    return sample_bqmr(q, x, y, rng, cost);
  };
  return c;
}

double diagonal_density(const ProposalCoupling& coupling, const Point& x, const Point& y,
                        const Point& z) {
  if (!coupling.log_diagonal_density)
    throw Error(ErrorCode::kMissingDiagonalDensity,
                "diagonal_density: coupling '" + coupling.name + "' declares no diagonal density");
  return std::exp(coupling.log_diagonal_density(x, y, z));
}

}  // namespace coupledmh
