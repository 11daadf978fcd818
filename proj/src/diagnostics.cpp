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

#include "coupledmh/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "coupledmh/errors.hpp"
#include "coupledmh/proposal_couplings.hpp"

namespace coupledmh {

void Grid1D::validate() const {
  if (!(lo < hi) || panels < 2 || !std::isfinite(lo) || !std::isfinite(hi))
    throw Error(ErrorCode::kInvalidArgument, "Grid1D: need finite lo < hi and panels >= 2");
}

Grid1D Grid1D::refined() const {
  Grid1D g = *this;
  g.panels *= 2;
  return g;
}

namespace {

struct SegmentSums {
  double fine = 0.0;
  double coarse = 0.0;
};

// Simpson at n and n / 2 panels from one set of evaluations; n % 4 == 0.
SegmentSums simpson_segment(const std::function<double(double)>& g, double a, double b, int n) {
  const double h = (b - a) / n;
  double fine_odd = 0.0, fine_even = 0.0, coarse_odd = 0.0, coarse_even = 0.0;
  const double ga = g(a);
  const double gb = g(b);
  for (int i = 1; i < n; ++i) {
    const double v = g(a + i * h);
    if (i % 2 == 1) {
      fine_odd += v;
    } else {
      fine_even += v;
      if (i % 4 == 2)
        coarse_odd += v;
      else
        coarse_even += v;
    }
  }
  return {h / 3.0 * (ga + gb + 4.0 * fine_odd + 2.0 * fine_even),
          2.0 * h / 3.0 * (ga + gb + 4.0 * coarse_odd + 2.0 * coarse_even)};
}

double point_value(const Point& p) { return p[0]; }

}  // namespace

Quadrature integrate(const std::function<double(double)>& g, const Grid1D& grid) {
  grid.validate();
  std::vector<double> cuts{grid.lo, grid.hi};
  for (double b : grid.breakpoints)
    if (b > grid.lo && b < grid.hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double width = grid.hi - grid.lo;
  double fine = 0.0, coarse = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double len = cuts[s + 1] - cuts[s];
    int n = static_cast<int>(std::ceil(grid.panels * len / width / 4.0)) * 4;
    n = std::max(n, 4);
    const SegmentSums sums = simpson_segment(g, cuts[s], cuts[s + 1], n);
    fine += sums.fine;
    coarse += sums.coarse;
  }
  const double tail = (std::abs(g(grid.lo)) + std::abs(g(grid.hi))) * width;
  return {fine, std::abs(fine - coarse) + tail};
}

Grid1D default_grid(const MhKernel& kernel, double x, double y) {
  const ProposalKernel& q = kernel.proposal;
  const double sd = q.scale > 0.0 ? q.scale : 1.0;
  const Point px = Point::Constant(1, x);
  const Point py = Point::Constant(1, y);
  const double cx = q.center ? point_value(q.center(px)) : x;
  const double cy = q.center ? point_value(q.center(py)) : y;

  Grid1D grid;
  grid.lo = std::min({x, y, cx, cy}) - 10.0 * sd;
  grid.hi = std::max({x, y, cx, cy}) + 10.0 * sd;
  const double edge = kernel.target.support_lo;
  if (std::isfinite(edge)) grid.breakpoints.push_back(edge);
  grid.breakpoints.insert(grid.breakpoints.end(), {x, y, 0.5 * (x + y), cx, cy});
  return grid;
}

namespace {

void require_1d(const MhKernel& kernel, const char* what) {
  if (kernel.dim() != 1)
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": one-dimensional kernels only");
}

void require_in_support(const MhKernel& kernel, double x, const char* what) {
  if (!std::isfinite(x) || kernel.target.log_density(Point::Constant(1, x)) == kNegInf)
    throw Error(ErrorCode::kOutsideSupport, std::string(what) + ": state outside target support");
}

// exp(log f(x, z)) as a function of scalar z.
auto subdensity_fn(const MhKernel& kernel, double x) {
  return [&kernel, px = Point::Constant(1, x)](double z) {
    return std::exp(kernel.log_subdensity(px, Point::Constant(1, z)));
  };
}

}  // namespace

AtomMassEstimate atom_mass(const MhKernel& kernel, double x, const Grid1D& grid) {
  require_1d(kernel, "atom_mass");
  require_in_support(kernel, x, "atom_mass");
  const Quadrature mass = integrate(subdensity_fn(kernel, x), grid);
  if (mass.value > 1.0 + 1e-6 + mass.abs_error)
    throw Error(ErrorCode::kInconsistentKernel,
                "atom_mass: integral of f exceeds 1 (" + std::to_string(mass.value) + ")");
  return {std::clamp(1.0 - mass.value, 0.0, 1.0), mass.abs_error};
}

AtomMassEstimate atom_mass(const MhKernel& kernel, double x) {
  return atom_mass(kernel, x, default_grid(kernel, x, x));
}

CouplingBounds kernel_tv_1d(const MhKernel& kernel, double x, double y, const Grid1D& grid) {
  require_1d(kernel, "kernel_tv_1d");
  require_in_support(kernel, x, "kernel_tv_1d");
  require_in_support(kernel, y, "kernel_tv_1d");
  CouplingBounds out;
  if (x == y) return out;

  const Point px = Point::Constant(1, x);
  const Point py = Point::Constant(1, y);
  auto fx = subdensity_fn(kernel, x);
  auto fy = subdensity_fn(kernel, y);

  const Quadrature overlap = integrate([&](double z) { return std::min(fx(z), fy(z)); }, grid);
  if (overlap.value > 1.0 + 1e-6 + overlap.abs_error)
    throw Error(ErrorCode::kInconsistentKernel, "kernel_tv_1d: overlap integral exceeds 1");

  const Quadrature sq = integrate(
      [&](double z) {
        const Point pz = Point::Constant(1, z);
        const double lq = std::min(kernel.log_q(px, pz), kernel.log_q(py, pz));
        const double la = std::min(kernel.log_acceptance(px, pz), kernel.log_acceptance(py, pz));
        return la == kNegInf ? 0.0 : std::exp(lq + la);
      },
      grid);

  // Reflection acceptance mass: int fr_yx(z) ^ fr_xy(T_yx(z)) dz.
  const Quadrature refl = integrate(
      [&](double z) {
        const double z_back = point_value(reflect(py, px, Point::Constant(1, z)));
        const double fr_yx = std::max(0.0, fy(z) - fx(z));
        const double fr_xy = std::max(0.0, fx(z_back) - fy(z_back));
        return std::min(fr_yx, fr_xy);
      },
      grid);

  out.meet_max = std::clamp(overlap.value, 0.0, 1.0);
  out.tv = 1.0 - out.meet_max;
  out.p_c = out.meet_max;
  out.meet_sq = std::clamp(sq.value, 0.0, out.meet_max);
  out.p_r = std::clamp(refl.value, 0.0, 1.0 - out.p_c);
  out.abs_error = std::max({overlap.abs_error, sq.abs_error, refl.abs_error});
  return out;
}

CouplingBounds kernel_tv_1d(const MhKernel& kernel, double x, double y) {
  return kernel_tv_1d(kernel, x, y, default_grid(kernel, x, y));
}

Quadrature proposal_overlap_1d(const ProposalKernel& q, double x, double y, const Grid1D& grid) {
  const Point px = Point::Constant(1, x);
  const Point py = Point::Constant(1, y);
  return integrate(
      [&](double z) {
        const Point pz = Point::Constant(1, z);
        return std::exp(std::min(q.log_density(px, pz), q.log_density(py, pz)));
      },
      grid);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double gaussian_overlap(double delta, double sigma, int dim) {
  if (!(delta >= 0.0) || !(sigma > 0.0) || dim < 1)
    throw Error(ErrorCode::kInvalidArgument, "gaussian_overlap: need delta >= 0, sigma > 0, d >= 1");
  return std::erfc(delta / (2.0 * sigma * std::numbers::sqrt2));
}

double ks_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "ks_critical_value: alpha must lie in (0, 1)");
  return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.empty() || b.empty())
    throw Error(ErrorCode::kInvalidArgument, "ks_two_sample: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double n = static_cast<double>(sa.size());
  const double m = static_cast<double>(sb.size());

  double stat = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    stat = std::max(stat, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return {stat, ks_critical_value(alpha) * std::sqrt((n + m) / (n * m))};
}

KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf,
                       double alpha) {
  if (sample.empty()) throw Error(ErrorCode::kInvalidArgument, "ks_one_sample: empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double F = cdf(s[i]);
    stat = std::max({stat, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
  }
  return {stat, ks_critical_value(alpha) / std::sqrt(n)};
}

}  // namespace coupledmh
