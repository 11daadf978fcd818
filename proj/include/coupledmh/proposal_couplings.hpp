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
#include <string>
#include <utility>

#include <Eigen/Core>

#include "coupledmh/core_model.hpp"
#include "coupledmh/cost.hpp"
#include "coupledmh/rng.hpp"

namespace coupledmh {

inline constexpr std::int64_t kDefaultLoopCap = 1'000'000;

struct ProposalPair {
  Point xp;
  Point yp;
};

/// A coupling of Q(x, .) and Q(y, .).
///
/// `log_diagonal_density(x, y, z)` is the log density of the event x' = y' = z;
/// it is left empty by couplings that do not declare one.
struct ProposalCoupling {
  std::string name;
  bool is_maximal = false;
  std::function<ProposalPair(const Point&, const Point&, RngStream&, CostCounters&)> sample_pair;
  std::function<double(const Point&, const Point&, const Point&)> log_diagonal_density;

  ProposalPair sample(const Point& x, const Point& y, RngStream& rng) const {
    CostCounters scratch;
    return sample_pair(x, y, rng, scratch);
  }
};

/// Reflection through the hyperplane bisecting x and y:
/// T_xy(x') = y + (I - 2 e e^T)(x' - x), e = (y - x) / |y - x|.
/// Throws InvalidArgument when x == y.
template <typename DerivedX, typename DerivedY, typename DerivedP>
Point reflect(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
              const Eigen::MatrixBase<DerivedP>& xp);

/// Maximal coupling with independent residuals. Throws LoopCapExceeded if the
/// residual rejection sampler runs more than `loop_cap` times.
ProposalPair sample_bqmi(const ProposalKernel& q, const Point& x, const Point& y, RngStream& rng,
                         CostCounters& cost, std::int64_t loop_cap = kDefaultLoopCap);

/// Maximal coupling with reflection residuals. The reflection is taken about
/// the proposal centres, so drifted kernels reflect through the midpoint of
/// the two proposal means. Requires a spherically symmetric kernel.
ProposalPair sample_bqmr(const ProposalKernel& q, const Point& x, const Point& y, RngStream& rng,
                         CostCounters& cost);

/// Reflection-residual coupling of N(x + kappa, sigma2) and N(y + kappa, sigma2).
ProposalPair sample_bqmr_drifted(double kappa, double sigma2, const Point& x, const Point& y,
                                 RngStream& rng);

ProposalCoupling bqmi_coupling(ProposalKernel q, std::int64_t loop_cap = kDefaultLoopCap);
ProposalCoupling bqmr_coupling(ProposalKernel q);

/// Density of x' = y' = z. Throws MissingDiagonalDensity for couplings that
/// do not declare one.
double diagonal_density(const ProposalCoupling& coupling, const Point& x, const Point& y,
                        const Point& z);

// ---------------------------------------------------------------------------

namespace detail {
[[noreturn]] void throw_reflect_degenerate();
}

template <typename DerivedX, typename DerivedY, typename DerivedP>
Point reflect(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
              const Eigen::MatrixBase<DerivedP>& xp) {
  const Point diff = y - x;
  const double norm = diff.norm();
  if (!(norm > 0.0)) detail::throw_reflect_degenerate();
  const Point e = diff / norm;
  const Point step = xp - x;
  return y + step - 2.0 * e.dot(step) * e;
}

}  // namespace coupledmh
