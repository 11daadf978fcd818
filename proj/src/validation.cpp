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

#include "coupledmh/validation.hpp"

#include <algorithm>
#include <cmath>

#include "coupledmh/diagnostics.hpp"
#include "coupledmh/errors.hpp"
#include "coupledmh/kernel_couplings.hpp"

namespace coupledmh {

namespace {

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t n = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double variance() const {
    const double m = mean();
    return (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
  }
  double se() const { return std::sqrt(variance() / static_cast<double>(n)); }
};

CheckResult within(std::string check, std::string coupling, double x, double y, double observed,
                   double expected, double tolerance) {
  return {std::move(check), std::move(coupling), x,         y,
          observed,         expected,            tolerance, std::abs(observed - expected) <= tolerance};
}

std::vector<double> accepted_moves(const MhKernel& kernel, double from, std::int64_t draws,
                                   RngStream& rng) {
  const Point p = Point::Constant(1, from);
  std::vector<double> out;
  for (std::int64_t i = 0; i < draws; ++i) {
    MhStep s = sample_mh_step(kernel, p, rng);
    if (s.accepted) out.push_back(s.next[0]);
  }
  return out;
}

}  // namespace

MhKernel reference_kernel(const ValidationConfig& config) {
  if (config.target == "normal") return gaussian_rwm_kernel(1, config.sigma2);
  if (config.target == "exponential") return drifted_exponential_kernel(config.kappa, config.sigma2);
  throw Error(ErrorCode::kInvalidArgument, "unknown validation target '" + config.target + "'");
}

std::vector<CheckResult> run_validation(const ValidationConfig& config) {
  if (config.draws < 2) throw Error(ErrorCode::kInvalidArgument, "validation needs draws >= 2");
  const MhKernel reference = reference_kernel(config);
  MhKernel sampled = reference;
  sampled.acceptance = config.acceptance;

  std::vector<CheckResult> results;
  const auto n = static_cast<std::size_t>(config.draws);
  const double nd = static_cast<double>(config.draws);

  for (std::size_t pi = 0; pi < config.pairs.size(); ++pi) {
    const auto [x, y] = config.pairs[pi];
    const Point px = Point::Constant(1, x);
    const Point py = Point::Constant(1, y);
    const std::uint64_t stream_base = 1000 * static_cast<std::uint64_t>(pi);

    if (x == y) {
      for (std::size_t k = 0; k < config.couplings.size(); ++k) {
        const CoupledKernel ck = build_coupled_kernel(config.couplings[k], sampled);
        RngStream rng(config.seed, stream_base + k);
        std::int64_t met = 0;
        for (std::size_t i = 0; i < n; ++i) met += ck.sample(px, py, rng).met ? 1 : 0;
        results.push_back(within("faithful", ck.name, x, y, static_cast<double>(met), nd, 0.0));
      }
      continue;
    }

    const CouplingBounds bounds = kernel_tv_1d(reference, x, y);
    const double rx = atom_mass(reference, x).value;
    const double ry = atom_mass(reference, y).value;
    RngStream ref_rng(config.seed, stream_base + 999);
    const std::vector<double> ref_x = accepted_moves(reference, x, config.draws, ref_rng);
    const std::vector<double> ref_y = accepted_moves(reference, y, config.draws, ref_rng);

    for (std::size_t k = 0; k < config.couplings.size(); ++k) {
      const CouplingChoice choice = config.couplings[k];
      const CoupledKernel ck = build_coupled_kernel(choice, sampled);
      RngStream rng(config.seed, stream_base + k);

      std::int64_t atom_x = 0, atom_y = 0, met = 0;
      std::vector<double> moved_x, moved_y;
      Moments p_draws, total_evals, density_evals, loops;
      for (std::size_t i = 0; i < n; ++i) {
        const CoupledDraw d = ck.sample(px, py, rng);
        if (d.X[0] == x) ++atom_x; else moved_x.push_back(d.X[0]);
        if (d.Y[0] == y) ++atom_y; else moved_y.push_back(d.Y[0]);
        if (d.met) ++met;
        p_draws.add(static_cast<double>(d.cost.p_draws));
        total_evals.add(static_cast<double>(d.cost.total_evaluations()));
        density_evals.add(static_cast<double>(d.cost.density_evals));
        loops.add(static_cast<double>(d.cost.loop_iters));
      }

      const std::string& name = ck.name;
      results.push_back(within("atom_x", name, x, y, atom_x / nd, rx,
                               config.n_se * binomial_se(rx, n)));
      results.push_back(within("atom_y", name, x, y, atom_y / nd, ry,
                               config.n_se * binomial_se(ry, n)));
      for (auto [check, moved, ref] : {std::tuple{"ks_x", &moved_x, &ref_x},
                                       std::tuple{"ks_y", &moved_y, &ref_y}}) {
        CheckResult r{check, name, x, y, 1.0, 0.0, 0.0, false};
        if (!moved->empty() && !ref->empty()) {
          const KsResult ks = ks_two_sample(*moved, *ref, config.ks_alpha);
          r.observed = ks.statistic;
          r.tolerance = ks.threshold;
          r.pass = !ks.rejects();
        }
        results.push_back(r);
      }

      const double freq = met / nd;
      if (ck.tag == CoupledKernel::Tag::SQ) {
        results.push_back(within("meet", name, x, y, freq, bounds.meet_sq,
                                 config.n_se * binomial_se(bounds.meet_sq, n) + bounds.abs_error));
        CheckResult below{"sq_below_max", name, x, y, freq, bounds.meet_max, 0.0, false};
        below.pass = freq < bounds.meet_max && bounds.meet_sq < bounds.meet_max - bounds.abs_error;
        results.push_back(below);
      } else {
        results.push_back(within("meet", name, x, y, freq, bounds.meet_max,
                                 config.n_se * binomial_se(bounds.meet_max, n) + bounds.abs_error));
      }

      if (ck.tag == CoupledKernel::Tag::MI) {
        results.push_back(within("p_draws", name, x, y, p_draws.mean(), 2.0,
                                 config.n_se * p_draws.se()));
        results.push_back(within("evaluations", name, x, y, total_evals.mean(),
                                 6.0 - 2.0 * rx - 2.0 * ry, config.n_se * total_evals.se()));
        const double tv = bounds.tv;
        results.push_back(within("loop_mean", name, x, y, loops.mean(), 1.0,
                                 config.loop_moment_rel_tol));
        const double var = 2.0 * (1.0 - tv) / tv;
        results.push_back(within("loop_var", name, x, y, loops.variance(), var,
                                 config.loop_moment_rel_tol * var));
      } else if (ck.tag == CoupledKernel::Tag::MR) {
        results.push_back(within("p_draws", name, x, y, p_draws.mean(), 2.0,
                                 config.n_se * p_draws.se()));
        results.push_back(within("evaluations", name, x, y, density_evals.mean(),
                                 7.0 - 4.0 * rx - 2.0 * ry - 3.0 * bounds.p_c,
                                 config.n_se * density_evals.se()));
      }
    }
  }
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
}

}  // namespace coupledmh
