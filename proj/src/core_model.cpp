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

#include "coupledmh/core_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "coupledmh/errors.hpp"

namespace coupledmh {

namespace {

// log(e^a + e^b)
double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

void check_point(const Point& z, const char* what) {
  if (z.size() < 1 || !z.allFinite())
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": point must be finite, d >= 1");
}

TargetDistribution TargetDistribution::standard_normal(Eigen::Index dim) {
  const double log_norm = -0.5 * static_cast<double>(dim) * std::log(2.0 * std::numbers::pi);
  TargetDistribution t;
  t.dim = dim;
  t.name = "normal";
  t.log_density = [log_norm](const Point& z) { return log_norm - 0.5 * z.squaredNorm(); };
  t.sample = [dim](RngStream& rng) { return rng.normal_vector(dim); };
  return t;
}

TargetDistribution TargetDistribution::exponential(double rate) {
  if (!(rate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "exponential: rate must be > 0");
  TargetDistribution t;
  t.dim = 1;
  t.name = "exponential";
  t.support_lo = 0.0;
  t.log_density = [rate](const Point& z) {
    return z[0] < 0.0 ? kNegInf : std::log(rate) - rate * z[0];
  };
  t.sample = [rate](RngStream& rng) { return Point::Constant(1, rng.exponential() / rate); };
  return t;
}

ProposalKernel ProposalKernel::gaussian(Eigen::Index dim, double sigma2) {
  if (!(sigma2 > 0.0) || dim < 1)
    throw Error(ErrorCode::kInvalidArgument, "gaussian proposal: need sigma2 > 0, d >= 1");
  const double sd = std::sqrt(sigma2);
  const double log_norm =
      -0.5 * static_cast<double>(dim) * std::log(2.0 * std::numbers::pi * sigma2);
  ProposalKernel q;
  q.dim = dim;
  q.name = "gaussian";
  q.sample = [sd, dim](const Point& z, RngStream& rng) -> Point {
    return z + sd * rng.normal_vector(dim);
  };
  q.log_density = [log_norm, sigma2](const Point& from, const Point& to) {
    return log_norm - 0.5 * (to - from).squaredNorm() / sigma2;
  };
  q.center = [](const Point& z) { return z; };
  q.scale = sd;
  return q;
}

ProposalKernel ProposalKernel::drifted_gaussian(double kappa, double sigma2) {
  if (!(sigma2 > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "drifted gaussian proposal: need sigma2 > 0");
  const double sd = std::sqrt(sigma2);
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * sigma2);
  ProposalKernel q;
  q.dim = 1;
  q.name = "drifted_gaussian";
  q.sample = [sd, kappa](const Point& z, RngStream& rng) -> Point {
    return Point::Constant(1, z[0] + kappa + sd * rng.normal());
  };
  q.log_density = [log_norm, sigma2, kappa](const Point& from, const Point& to) {
    const double r = to[0] - from[0] - kappa;
    return log_norm - 0.5 * r * r / sigma2;
  };
  q.center = [kappa](const Point& z) -> Point { return z.array() + kappa; };
  q.scale = sd;
  return q;
}

AcceptanceRule AcceptanceRule::constant(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "constant acceptance must lie in [0, 1]");
  return custom_rule([p](const Point&, const Point&) { return p; });
}

double MhKernel::log_acceptance(const Point& x, const Point& xp) const {
  switch (acceptance.kind) {
    case AcceptanceRule::Kind::MetropolisHastings: {
      const double lp_new = target.log_density(xp);
      if (lp_new == kNegInf) return kNegInf;
      const double log_ratio =
          lp_new + log_q(xp, x) - target.log_density(x) - log_q(x, xp);
      return std::min(0.0, log_ratio);
    }
    case AcceptanceRule::Kind::Barker: {
      const double lp_new = target.log_density(xp);
      if (lp_new == kNegInf) return kNegInf;
      const double forward = lp_new + log_q(xp, x);
      const double backward = target.log_density(x) + log_q(x, xp);
      return forward - log_add_exp(forward, backward);
    }
    case AcceptanceRule::Kind::Custom:
      return std::log(acceptance.custom(x, xp));
  }
  return kNegInf;
}

double MhKernel::log_subdensity(const Point& x, const Point& xp) const {
  const double la = log_acceptance(x, xp);
  if (la == kNegInf) return kNegInf;
  return log_q(x, xp) + la;
}

MhKernel gaussian_rwm_kernel(Eigen::Index dim, double sigma2) {
  return {TargetDistribution::standard_normal(dim), ProposalKernel::gaussian(dim, sigma2),
          AcceptanceRule::metropolis_hastings()};
}

MhKernel drifted_exponential_kernel(double kappa, double sigma2) {
  return {TargetDistribution::exponential(1.0), ProposalKernel::drifted_gaussian(kappa, sigma2),
          AcceptanceRule::metropolis_hastings()};
}

namespace {

void require_support(const MhKernel& kernel, const Point& x, const char* what) {
  if (kernel.target.log_density(x) == kNegInf)
    throw Error(ErrorCode::kOutsideSupport,
                std::string(what) + ": current state lies outside the target support");
}

}  // namespace

double mh_acceptance(const MhKernel& kernel, const Point& x, const Point& xp) {
  check_point(x, "mh_acceptance");
  check_point(xp, "mh_acceptance");
  require_support(kernel, x, "mh_acceptance");
  return std::exp(kernel.log_acceptance(x, xp));
}

double transition_subdensity(const MhKernel& kernel, const Point& x, const Point& xp) {
  check_point(x, "transition_subdensity");
  check_point(xp, "transition_subdensity");
  if (same_point(x, xp))
    throw Error(ErrorCode::kInvalidArgument,
                "transition_subdensity: f is defined off the atom only (x' == x)");
  require_support(kernel, x, "transition_subdensity");
  return std::exp(kernel.log_subdensity(x, xp));
}

MhStep sample_mh_step(const MhKernel& kernel, const Point& x, RngStream& rng) {
  MhStep step;
  step.proposal = kernel.proposal.sample(x, rng);
  const double a = std::exp(kernel.log_acceptance(x, step.proposal));
  step.accepted = rng.uniform() < a;
  step.next = step.accepted ? step.proposal : x;
  return step;
}

}  // namespace coupledmh
