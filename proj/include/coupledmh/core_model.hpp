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

#include <functional>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "coupledmh/rng.hpp"

namespace coupledmh {

/// A state in R^d. Equality between points is exact coordinate-wise equality.
using Point = Eigen::VectorXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline bool same_point(const Point& a, const Point& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

/// Throws InvalidArgument unless every coordinate is finite.
void check_point(const Point& z, const char* what);

struct TargetDistribution {
  Eigen::Index dim = 1;
  std::string name;
  /// Returns -inf exactly outside the support.
  std::function<double(const Point&)> log_density;
  /// Exact sampler, used to initialise chains at stationarity.
  std::function<Point(RngStream&)> sample;
  /// Lower edge of the support in one dimension; -inf for unbounded targets.
  double support_lo = kNegInf;

  static TargetDistribution standard_normal(Eigen::Index dim);
  /// Expo(rate) on [0, inf).
  static TargetDistribution exponential(double rate = 1.0);
};

/// Proposal kernel Q(z, .) with density q(z, .).
///
/// `center` is set only for kernels that are spherically symmetric about a
/// point depending on z; reflection couplings require it. `scale` is the
/// per-coordinate standard deviation, used to size quadrature grids.
struct ProposalKernel {
  Eigen::Index dim = 1;
  std::string name;
  std::function<Point(const Point&, RngStream&)> sample;
  std::function<double(const Point& from, const Point& to)> log_density;
  std::function<Point(const Point&)> center;
  double scale = 0.0;

  bool spherically_symmetric() const { return static_cast<bool>(center); }

  /// N(z, sigma2 I_d). sigma2 is a variance.
  static ProposalKernel gaussian(Eigen::Index dim, double sigma2);
  /// One-dimensional N(z + kappa, sigma2).
  static ProposalKernel drifted_gaussian(double kappa, double sigma2);
};

struct AcceptanceRule {
  enum class Kind { MetropolisHastings, Barker, Custom };

  Kind kind = Kind::MetropolisHastings;
  /// Only for Kind::Custom: returns a probability for (x, x').
  std::function<double(const Point&, const Point&)> custom;

  static AcceptanceRule metropolis_hastings() { return {}; }
  static AcceptanceRule barker() { return {Kind::Barker, {}}; }
  static AcceptanceRule custom_rule(std::function<double(const Point&, const Point&)> fn) {
    return {Kind::Custom, std::move(fn)};
  }
  static AcceptanceRule constant(double p);
};

struct MhKernel {
  TargetDistribution target;
  ProposalKernel proposal;
  AcceptanceRule acceptance;

  Eigen::Index dim() const { return target.dim; }

  /// log a(x, x'). Assumes x is in the support; -inf if x' is not.
  double log_acceptance(const Point& x, const Point& xp) const;
  /// log f(x, x') = log q(x, x') + log a(x, x'), for x' != x. Unchecked.
  double log_subdensity(const Point& x, const Point& xp) const;
  double log_q(const Point& x, const Point& xp) const { return proposal.log_density(x, xp); }
};

/// Standard normal target with N(z, sigma2) random-walk proposals under MH.
MhKernel gaussian_rwm_kernel(Eigen::Index dim, double sigma2);
/// Expo(1) target with N(z + kappa, sigma2) proposals under MH.
MhKernel drifted_exponential_kernel(double kappa, double sigma2);

/// Acceptance probability a(x, x') in [0, 1]. Throws OutsideSupport if x is
/// not in the support of the target.
double mh_acceptance(const MhKernel& kernel, const Point& x, const Point& xp);

/// f(x, x') = q(x, x') a(x, x'). Throws InvalidArgument when x' == x.
double transition_subdensity(const MhKernel& kernel, const Point& x, const Point& xp);

struct MhStep {
  Point next;
  Point proposal;
  bool accepted = false;
};

MhStep sample_mh_step(const MhKernel& kernel, const Point& x, RngStream& rng);

}  // namespace coupledmh
