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
#include <optional>
#include <string>

#include "coupledmh/core_model.hpp"
#include "coupledmh/cost.hpp"
#include "coupledmh/proposal_couplings.hpp"
#include "coupledmh/rng.hpp"

namespace coupledmh {

struct CoupledDraw {
  Point X;
  Point Y;
  bool met = false;
  CostCounters cost;
};

struct BernoulliPair {
  bool bx = false;
  bool by = false;
};

/// A coupling of Bern(p) and Bern(q).
using BernoulliCoupling = std::function<BernoulliPair(double p, double q, RngStream&)>;

/// Shared-uniform coupling: P(Bx = By = 1) = min(p, q).
BernoulliPair maximal_bernoulli_pair(double p, double q, RngStream& rng);

/// Independent draws; a valid but non-maximal alternative for the
/// off-diagonal indicator coupling.
BernoulliPair independent_bernoulli_pair(double p, double q, RngStream& rng);

/// Status-quo coupling: coupled proposals, maximally coupled MH acceptances.
CoupledDraw sample_bpsq(const MhKernel& kernel, const ProposalCoupling& qbar, const Point& x,
                        const Point& y, RngStream& rng);

/// Full-kernel maximal coupling with independent residuals.
CoupledDraw sample_bpmi(const MhKernel& kernel, const Point& x, const Point& y, RngStream& rng,
                        std::int64_t loop_cap = kDefaultLoopCap);

struct BpmrResiduals {
  double f_m = 0.0;
  double fr_xy = 0.0;
  double fr_yx = 0.0;
  double ft_yx = 0.0;
};

/// Residual functions of the full-kernel reflection coupling at z:
/// the overlap f(x,z) ^ f(y,z), both residuals, and the y residual left over
/// after the reflected x residual is removed.
BpmrResiduals bpmr_residuals(const MhKernel& kernel, const Point& x, const Point& y,
                             const Point& z);

/// Full-kernel maximal coupling with reflection residuals.
CoupledDraw sample_bpmr(const MhKernel& kernel, const Point& x, const Point& y, RngStream& rng,
                        std::int64_t loop_cap = kDefaultLoopCap);

enum class ProposalKind { Diagonal, OffDiagonal };

struct BpcProbabilities {
  ProposalKind kind = ProposalKind::Diagonal;
  double px = 0.0;
  double py = 0.0;
};

/// Acceptance probabilities used by the conditional coupling.
///
/// Diagonal proposals (x' = y'): px = 1 ^ f(x,x') / q^m(x'), or 1 when
/// q^m(x') = 0. Off-diagonal: px = f^r(x') / q^r(x') with
/// f^r = 0 v (f - q^m) and q^r = q - q^m, and px = 0 when q^r = 0.
BpcProbabilities bpc_probabilities(const MhKernel& kernel, const ProposalCoupling& qbar,
                                   const Point& x, const Point& y, const Point& xp,
                                   const Point& yp);

/// Conditional coupling: maximal on proposed meetings, `b2` elsewhere.
CoupledDraw sample_bpc(const MhKernel& kernel, const ProposalCoupling& qbar, const Point& x,
                       const Point& y, RngStream& rng,
                       const BernoulliCoupling& b2 = maximal_bernoulli_pair);

/// A coupled transition kernel packaged for drivers.
struct CoupledKernel {
  enum class Tag { SQ, MI, MR, C };

  Tag tag = Tag::MI;
  std::string name;
  MhKernel kernel;
  std::optional<ProposalCoupling> proposal_coupling;
  BernoulliCoupling off_diagonal = maximal_bernoulli_pair;
  std::int64_t loop_cap = kDefaultLoopCap;

  CoupledDraw sample(const Point& x, const Point& y, RngStream& rng) const;
};

CoupledKernel make_bpsq(MhKernel kernel, ProposalCoupling qbar);
CoupledKernel make_bpmi(MhKernel kernel, std::int64_t loop_cap = kDefaultLoopCap);
CoupledKernel make_bpmr(MhKernel kernel, std::int64_t loop_cap = kDefaultLoopCap);
CoupledKernel make_bpc(MhKernel kernel, ProposalCoupling qbar,
                       BernoulliCoupling off_diagonal = maximal_bernoulli_pair);

std::string to_string(CoupledKernel::Tag tag);

}  // namespace coupledmh
