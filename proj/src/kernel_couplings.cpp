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

#include "coupledmh/kernel_couplings.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "coupledmh/errors.hpp"

namespace coupledmh {

namespace {

constexpr double kLogFloor = -745.0;
constexpr double kProbTolerance = 1e-9;

// log(max(0, e^a - e^b))
double log_diff_pos(double a, double b) {
  if (!(a > b)) return kNegInf;
  if (b == kNegInf) return a;
  return a + std::log(-std::expm1(b - a));
}

double exp_floored(double log_value) {
  return log_value < kLogFloor ? 0.0 : std::exp(log_value);
}

double checked_probability(double p, const char* what) {
  if (!(p >= -kProbTolerance && p <= 1.0 + kProbTolerance))
    throw Error(ErrorCode::kInconsistentKernel, std::string(what) + ": probability out of range");
  return std::clamp(p, 0.0, 1.0);
}

CoupledDraw faithful_step(const MhKernel& kernel, const Point& x, RngStream& rng) {
  CoupledDraw d;
  MhStep s = sample_mh_step(kernel, x, rng);
  d.X = s.next;
  d.Y = std::move(s.next);
  d.met = true;
  d.cost.p_draws = 1;
  d.cost.q_draws = 1;
  return d;
}

void count_mh_step(CostCounters& cost) {
  ++cost.p_draws;
  ++cost.q_draws;
}

void finish(CoupledDraw& d) { d.met = same_point(d.X, d.Y); }

}  // namespace

BernoulliPair maximal_bernoulli_pair(double p, double q, RngStream& rng) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "maximal_bernoulli_pair: p, q must lie in [0, 1]");
  const double u = rng.uniform();
  return {u < p, u < q};
}

BernoulliPair independent_bernoulli_pair(double p, double q, RngStream& rng) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "independent_bernoulli_pair: p, q must lie in [0, 1]");
  const bool bx = rng.uniform() < p;
  return {bx, rng.uniform() < q};
}

CoupledDraw sample_bpsq(const MhKernel& kernel, const ProposalCoupling& qbar, const Point& x,
                        const Point& y, RngStream& rng) {
  if (same_point(x, y)) return faithful_step(kernel, x, rng);
  CoupledDraw d;
  ProposalPair props = qbar.sample_pair(x, y, rng, d.cost);
  const double ax = std::exp(kernel.log_acceptance(x, props.xp));
  const double ay = std::exp(kernel.log_acceptance(y, props.yp));
  d.cost.density_evals += 2;
  const BernoulliPair b = maximal_bernoulli_pair(ax, ay, rng);
  d.X = b.bx ? std::move(props.xp) : x;
  d.Y = b.by ? std::move(props.yp) : y;
  finish(d);
  return d;
}

CoupledDraw sample_bpmi(const MhKernel& kernel, const Point& x, const Point& y, RngStream& rng,
                        std::int64_t loop_cap) {
  if (same_point(x, y)) return faithful_step(kernel, x, rng);
  CoupledDraw d;
  d.X = sample_mh_step(kernel, x, rng).next;
  count_mh_step(d.cost);

  if (!same_point(d.X, x)) {
    const double lfx = kernel.log_subdensity(x, d.X);
    const double lfy = kernel.log_subdensity(y, d.X);
    d.cost.density_evals += 2;
    if (std::log(rng.uniform()) + lfx <= lfy) {
      d.Y = d.X;
      d.met = true;
      return d;
    }
  }

  for (std::int64_t iter = 0;; ++iter) {
    if (iter >= loop_cap) throw LoopCapExceeded("sample_bpmi");
    ++d.cost.loop_iters;
    Point yt = sample_mh_step(kernel, y, rng).next;
    count_mh_step(d.cost);
    if (same_point(yt, y)) {
      d.Y = std::move(yt);
      break;
    }
    const double lfy = kernel.log_subdensity(y, yt);
    const double lfx = kernel.log_subdensity(x, yt);
    d.cost.density_evals += 2;
    if (std::log(rng.uniform()) + lfy > lfx) {
      d.Y = std::move(yt);
      break;
    }
  }
  finish(d);
  return d;
}

BpmrResiduals bpmr_residuals(const MhKernel& kernel, const Point& x, const Point& y,
                             const Point& z) {
  if (same_point(x, y) || same_point(z, x) || same_point(z, y))
    throw Error(ErrorCode::kInvalidArgument, "bpmr_residuals: need z != x, z != y, x != y");
  const double fx = std::exp(kernel.log_subdensity(x, z));
  const double fy = std::exp(kernel.log_subdensity(y, z));
  const Point zr = reflect(y, x, z);
  const double fx_r = std::exp(kernel.log_subdensity(x, zr));
  const double fy_r = std::exp(kernel.log_subdensity(y, zr));

  BpmrResiduals r;
  r.f_m = std::min(fx, fy);
  r.fr_xy = fx - r.f_m;
  r.fr_yx = fy - r.f_m;
  const double fr_xy_at_reflection = fx_r - std::min(fx_r, fy_r);
  r.ft_yx = r.fr_yx - std::min(r.fr_yx, fr_xy_at_reflection);
  return r;
}

CoupledDraw sample_bpmr(const MhKernel& kernel, const Point& x, const Point& y, RngStream& rng,
                        std::int64_t loop_cap) {
  if (same_point(x, y)) return faithful_step(kernel, x, rng);
  CoupledDraw d;
  d.X = sample_mh_step(kernel, x, rng).next;
  count_mh_step(d.cost);
  const bool moved = !same_point(d.X, x);

  double lfx = kNegInf;
  double lfy = kNegInf;
  if (moved) {
    lfx = kernel.log_subdensity(x, d.X);
    lfy = kernel.log_subdensity(y, d.X);
    d.cost.density_evals += 2;
    if (std::log(rng.uniform()) + lfx <= lfy) {
      d.Y = d.X;
      d.met = true;
      return d;
    }
  }

  // Reflected candidate for Y.
  Point yt = reflect(x, y, d.X);
  d.cost.density_evals += 1;
  if (moved) {
    const double lfr_xy = log_diff_pos(lfx, lfy);
    const double lfr_yx = log_diff_pos(kernel.log_subdensity(y, yt), kernel.log_subdensity(x, yt));
    d.cost.density_evals += 2;
    if (std::log(rng.uniform()) + lfr_xy <= lfr_yx) {
      d.Y = std::move(yt);
      finish(d);
      return d;
    }
  }

  // Rejection sampler for r(y) delta_y + f~t_yx with proposal P(y, .).
  for (std::int64_t iter = 0;; ++iter) {
    if (iter >= loop_cap) throw LoopCapExceeded("sample_bpmr");
    ++d.cost.loop_iters;
    Point cand = sample_mh_step(kernel, y, rng).next;
    count_mh_step(d.cost);
    if (same_point(cand, y)) {
      d.Y = std::move(cand);
      break;
    }
    const double lf_y = kernel.log_subdensity(y, cand);
    const double lfr_yx = log_diff_pos(lf_y, kernel.log_subdensity(x, cand));
    const Point back = reflect(y, x, cand);
    const double lfr_xy_back =
        log_diff_pos(kernel.log_subdensity(x, back), kernel.log_subdensity(y, back));
    const double lft_yx = log_diff_pos(lfr_yx, lfr_xy_back);
    d.cost.density_evals += 2;
    if (std::log(rng.uniform()) + lf_y <= lft_yx) {
      d.Y = std::move(cand);
      break;
    }
  }
  finish(d);
  return d;
}

namespace {

// 1 ^ f(z) / q^m(z) for a proposed meeting at z; 1 when q^m(z) = 0.
double diagonal_acceptance(const MhKernel& kernel, const Point& from, const Point& z,
                           double log_qm) {
  if (log_qm == kNegInf) return 1.0;
  const double log_ratio = kernel.log_subdensity(from, z) - log_qm;
  return checked_probability(std::min(1.0, exp_floored(log_ratio)), "bpc_probabilities");
}

// f^r(z) / q^r(z) off the diagonal. Written as (a - m) v 0 / (1 - m) with
// a = a(from, z) and m = q^m(z) / q(from, z), which stays finite in high
// dimension where q itself underflows.
double residual_acceptance(const MhKernel& kernel, const Point& from, const Point& z,
                           double log_qm) {
  const double log_q = kernel.log_q(from, z);
  const double log_m = log_qm - log_q;
  if (log_m > std::log1p(kProbTolerance))
    throw Error(ErrorCode::kInconsistentKernel,
                "bpc_probabilities: diagonal density exceeds the proposal density");
  if (log_m >= 0.0) return 0.0;
  const double a = exp_floored(kernel.log_acceptance(from, z));
  const double m = exp_floored(log_m);
  const double c = std::max(0.0, a - m) / -std::expm1(log_m);
  return checked_probability(c, "bpc_probabilities");
}

}  // namespace

BpcProbabilities bpc_probabilities(const MhKernel& kernel, const ProposalCoupling& qbar,
                                   const Point& x, const Point& y, const Point& xp,
                                   const Point& yp) {
  if (!qbar.log_diagonal_density)
    throw Error(ErrorCode::kMissingDiagonalDensity,
                "bpc_probabilities: proposal coupling '" + qbar.name +
                    "' declares no diagonal density");
  BpcProbabilities out;
  if (same_point(xp, yp)) {
    const double log_qm = qbar.log_diagonal_density(x, y, xp);
    out.kind = ProposalKind::Diagonal;
    out.px = diagonal_acceptance(kernel, x, xp, log_qm);
    out.py = diagonal_acceptance(kernel, y, xp, log_qm);
  } else {
    out.kind = ProposalKind::OffDiagonal;
    out.px = residual_acceptance(kernel, x, xp, qbar.log_diagonal_density(x, y, xp));
    out.py = residual_acceptance(kernel, y, yp, qbar.log_diagonal_density(x, y, yp));
  }
  return out;
}

CoupledDraw sample_bpc(const MhKernel& kernel, const ProposalCoupling& qbar, const Point& x,
                       const Point& y, RngStream& rng, const BernoulliCoupling& b2) {
  if (!qbar.log_diagonal_density)
    throw Error(ErrorCode::kMissingDiagonalDensity,
                "sample_bpc: proposal coupling '" + qbar.name + "' declares no diagonal density");
  if (same_point(x, y)) return faithful_step(kernel, x, rng);
  CoupledDraw d;
  ProposalPair props = qbar.sample_pair(x, y, rng, d.cost);
  const BpcProbabilities probs = bpc_probabilities(kernel, qbar, x, y, props.xp, props.yp);
  // Diagonal: min of two q plus two f. Off-diagonal: q and q^m on each side plus two a.
  d.cost.density_evals += probs.kind == ProposalKind::Diagonal ? 4 : 6;
  const BernoulliPair b = probs.kind == ProposalKind::Diagonal
                              ? maximal_bernoulli_pair(probs.px, probs.py, rng)
                              : b2(probs.px, probs.py, rng);
  d.X = b.bx ? std::move(props.xp) : x;
  d.Y = b.by ? std::move(props.yp) : y;
  finish(d);
  return d;
}

CoupledDraw CoupledKernel::sample(const Point& x, const Point& y, RngStream& rng) const {
  switch (tag) {
    case Tag::SQ:
      return sample_bpsq(kernel, *proposal_coupling, x, y, rng);
    case Tag::MI:
      return sample_bpmi(kernel, x, y, rng, loop_cap);
    case Tag::MR:
      return sample_bpmr(kernel, x, y, rng, loop_cap);
    case Tag::C:
      return sample_bpc(kernel, *proposal_coupling, x, y, rng, off_diagonal);
  }
  throw Error(ErrorCode::kInvalidArgument, "CoupledKernel: unknown tag");
}

CoupledKernel make_bpsq(MhKernel kernel, ProposalCoupling qbar) {
  CoupledKernel c;
  c.tag = CoupledKernel::Tag::SQ;
  c.name = "SQ+" + qbar.name;
  c.kernel = std::move(kernel);
  c.proposal_coupling = std::move(qbar);
  return c;
}

CoupledKernel make_bpmi(MhKernel kernel, std::int64_t loop_cap) {
  CoupledKernel c;
  c.tag = CoupledKernel::Tag::MI;
  c.name = "MI";
  c.kernel = std::move(kernel);
  c.loop_cap = loop_cap;
  return c;
}

CoupledKernel make_bpmr(MhKernel kernel, std::int64_t loop_cap) {
  CoupledKernel c;
  c.tag = CoupledKernel::Tag::MR;
  c.name = "MR";
  c.kernel = std::move(kernel);
  c.loop_cap = loop_cap;
  return c;
}

CoupledKernel make_bpc(MhKernel kernel, ProposalCoupling qbar, BernoulliCoupling off_diagonal) {
  if (!qbar.log_diagonal_density)
    throw Error(ErrorCode::kMissingDiagonalDensity,
                "make_bpc: proposal coupling '" + qbar.name + "' declares no diagonal density");
  CoupledKernel c;
  c.tag = CoupledKernel::Tag::C;
  c.name = "C+" + qbar.name;
  c.kernel = std::move(kernel);
  c.proposal_coupling = std::move(qbar);
  c.off_diagonal = std::move(off_diagonal);
  return c;
}

std::string to_string(CoupledKernel::Tag tag) {
  switch (tag) {
    case CoupledKernel::Tag::SQ: return "SQ";
    case CoupledKernel::Tag::MI: return "MI";
    case CoupledKernel::Tag::MR: return "MR";
    case CoupledKernel::Tag::C: return "C";
  }
  return "?";
}

}  // namespace coupledmh
