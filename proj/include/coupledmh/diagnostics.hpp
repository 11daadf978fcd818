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

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "coupledmh/core_model.hpp"

namespace coupledmh {

/// Composite-Simpson grid on [lo, hi]. `panels` is the total panel count and
/// is distributed over the sub-intervals cut at `breakpoints`, so kinks and
/// support edges of the integrand land on nodes.
struct Grid1D {
  double lo = -1.0;
  double hi = 1.0;
  int panels = 1 << 14;
  std::vector<double> breakpoints;

  void validate() const;
  Grid1D refined() const;
};

struct Quadrature {
  double value = 0.0;
  double abs_error = 0.0;
};

/// Simpson integral of g over the grid. The error estimate is the change
/// against the half-resolution rule plus a tail term g(lo) + g(hi) times the
/// grid width.
Quadrature integrate(const std::function<double(double)>& g, const Grid1D& grid);

/// Grid covering +-10 proposal standard deviations around the proposal
/// centres of x and y, with breakpoints at x, y, their midpoint and the
/// lower support edge of the target. The grid is not clipped to the support,
/// so the tail term sees zeros there rather than the jump at the edge.
Grid1D default_grid(const MhKernel& kernel, double x, double y);

struct AtomMassEstimate {
  double value = 0.0;
  double abs_error_bound = 0.0;
};

/// r(x) = 1 - int f(x, z) dz for a one-dimensional kernel.
AtomMassEstimate atom_mass(const MhKernel& kernel, double x, const Grid1D& grid);
AtomMassEstimate atom_mass(const MhKernel& kernel, double x);

struct CouplingBounds {
  double tv = 0.0;        // || P(x,.) - P(y,.) ||_TV
  double meet_max = 1.0;  // 1 - tv
  double meet_sq = 1.0;   // int (q ^ q)(a ^ a), status-quo meeting probability
  double p_c = 1.0;       // one-step coupling probability, equal to meet_max
  double p_r = 0.0;       // reflection acceptance mass of the full-kernel reflection coupling
  double abs_error = 0.0;
};

CouplingBounds kernel_tv_1d(const MhKernel& kernel, double x, double y, const Grid1D& grid);
CouplingBounds kernel_tv_1d(const MhKernel& kernel, double x, double y);

/// int q(x,.) ^ q(y,.) for a one-dimensional proposal, by quadrature.
Quadrature proposal_overlap_1d(const ProposalKernel& q, double x, double y, const Grid1D& grid);

double normal_cdf(double z);

/// P(chi^2_1 >= delta^2 / (4 sigma^2)) = 2 Phi(-delta / (2 sigma)): the
/// meeting probability of any maximal coupling of N(x, sigma^2 I_d) and
/// N(y, sigma^2 I_d) with |y - x| = delta. Independent of d.
double gaussian_overlap(double delta, double sigma, int dim = 1);

struct KsResult {
  double statistic = 0.0;
  double threshold = 0.0;

  bool rejects() const { return statistic > threshold; }
};

/// Asymptotic Kolmogorov critical value c(alpha) = sqrt(-ln(alpha / 2) / 2).
double ks_critical_value(double alpha);

/// Two-sample Kolmogorov-Smirnov statistic with the asymptotic threshold
/// c(alpha) sqrt((n + m) / (n m)).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double alpha = 1e-3);

/// One-sample statistic against a continuous CDF.
KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf,
                       double alpha = 1e-3);

inline double binomial_se(double p, std::size_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace coupledmh
