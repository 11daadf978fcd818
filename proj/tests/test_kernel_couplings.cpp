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


#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "coupledmh/diagnostics.hpp"
#include "coupledmh/errors.hpp"
#include "coupledmh/kernel_couplings.hpp"

using namespace coupledmh;

namespace {

Point pt(double v) { return Point::Constant(1, v); }

std::vector<CoupledKernel> all_kernels(const MhKernel& k) {
  return {make_bpsq(k, bqmi_coupling(k.proposal)), make_bpsq(k, bqmr_coupling(k.proposal)),
          make_bpmi(k), make_bpmr(k), make_bpc(k, bqmi_coupling(k.proposal)),
          make_bpc(k, bqmr_coupling(k.proposal))};
}

}  // namespace

TEST_CASE("bernoulli couplings") {
  RngStream rng(1, 0);
  const int n = 100000;
  int both_max = 0, both_ind = 0, x_max = 0, y_max = 0;
  for (int i = 0; i < n; ++i) {
    const BernoulliPair m = maximal_bernoulli_pair(0.3, 0.7, rng);
    both_max += m.bx && m.by;
    x_max += m.bx;
    y_max += m.by;
    CHECK_FALSE((m.bx && !m.by));
    const BernoulliPair ind = independent_bernoulli_pair(0.3, 0.7, rng);
    both_ind += ind.bx && ind.by;
  }
  const double se = 3.0 * binomial_se(0.3, n);
  CHECK(std::abs(both_max / double(n) - 0.3) < se);
  CHECK(std::abs(x_max / double(n) - 0.3) < se);
  CHECK(std::abs(y_max / double(n) - 0.7) < se);
  CHECK(std::abs(both_ind / double(n) - 0.21) < 3.0 * binomial_se(0.21, n));
  CHECK_THROWS_AS(maximal_bernoulli_pair(-0.1, 0.5, rng), Error);
  CHECK_THROWS_AS(independent_bernoulli_pair(0.5, 1.1, rng), Error);
}

TEST_CASE("couplings are faithful once the chains meet") {
  const MhKernel k = gaussian_rwm_kernel(2, 1.0);
  RngStream rng(4, 0);
  for (const CoupledKernel& c : all_kernels(k)) {
    Point x = Point::Constant(2, 0.3);
    for (int i = 0; i < 20000; ++i) {
      const CoupledDraw d = c.sample(x, x, rng);
      REQUIRE(same_point(d.X, d.Y));
      REQUIRE(d.met);
      x = d.X;
    }
  }
}

TEST_CASE("marginal atoms match the single kernel") {
  const MhKernel k = gaussian_rwm_kernel(1, 10.0);
  const double rx = atom_mass(k, 0.25).value;
  const double ry = atom_mass(k, 4.0).value;
  const int n = 40000;
  for (const CoupledKernel& c : all_kernels(k)) {
    RngStream rng(12, 0);
    int sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
      const CoupledDraw d = c.sample(pt(0.25), pt(4.0), rng);
      sx += same_point(d.X, pt(0.25));
      sy += same_point(d.Y, pt(4.0));
    }
    INFO(c.name);
    CHECK(std::abs(sx / double(n) - rx) < 3.0 * binomial_se(rx, n));
    CHECK(std::abs(sy / double(n) - ry) < 3.0 * binomial_se(ry, n));
  }
}

TEST_CASE("one-step meeting rates against quadrature") {
  for (const MhKernel& k : {gaussian_rwm_kernel(1, 10.0), drifted_exponential_kernel(3.0, 3.0)}) {
    const double x = 0.4, y = 1.7;
    const CouplingBounds b = kernel_tv_1d(k, x, y);
    const int n = 40000;
    for (const CoupledKernel& c : all_kernels(k)) {
      RngStream rng(30, 0);
      int met = 0;
      for (int i = 0; i < n; ++i) met += c.sample(pt(x), pt(y), rng).met;
      const double target = c.tag == CoupledKernel::Tag::SQ ? b.meet_sq : b.meet_max;
      INFO(k.target.name, " ", c.name);
      CHECK(std::abs(met / double(n) - target) < 3.0 * binomial_se(target, n) + b.abs_error);
    }
  }
}

TEST_CASE("reflection residual identities") {
  const MhKernel k = gaussian_rwm_kernel(1, 4.0);
  for (double z = -6.0; z <= 6.0; z += 0.35) {
    const BpmrResiduals r = bpmr_residuals(k, pt(-0.8), pt(1.3), pt(z));
    const double fx = transition_subdensity(k, pt(-0.8), pt(z));
    const double fy = transition_subdensity(k, pt(1.3), pt(z));
    CHECK(r.f_m == doctest::Approx(std::min(fx, fy)));
    CHECK(r.f_m + r.fr_xy == doctest::Approx(fx));
    CHECK(r.f_m + r.fr_yx == doctest::Approx(fy));
    CHECK(r.ft_yx >= 0.0);
    CHECK(r.ft_yx <= r.fr_yx);
    CHECK((r.fr_xy == 0.0 || r.fr_yx == 0.0));
  }
  // Mirror-image states of a symmetric target leave nothing for the loop.
  for (double z = -6.0; z <= 6.0; z += 0.35) {
    const BpmrResiduals r = bpmr_residuals(k, pt(-1.1), pt(1.1), pt(z));
    CHECK(r.ft_yx == doctest::Approx(0.0));
  }
  CHECK_THROWS_AS(bpmr_residuals(k, pt(0.0), pt(1.0), pt(0.0)), Error);
  CHECK_THROWS_AS(bpmr_residuals(k, pt(1.0), pt(1.0), pt(0.0)), Error);
}

TEST_CASE("conditional coupling probabilities on worked examples") {
  const MhKernel k = gaussian_rwm_kernel(1, 10.0);
  const ProposalCoupling q = bqmi_coupling(k.proposal);

  const BpcProbabilities diag = bpc_probabilities(k, q, pt(0.0), pt(4.0), pt(2.0), pt(2.0));
  CHECK(diag.kind == ProposalKind::Diagonal);
  CHECK(diag.px == doctest::Approx(0.1353352832366127).epsilon(1e-12));
  CHECK(diag.py == doctest::Approx(1.0));

  const BpcProbabilities off = bpc_probabilities(k, q, pt(0.0), pt(4.0), pt(-1.0), pt(5.0));
  CHECK(off.kind == ProposalKind::OffDiagonal);
  CHECK(off.px == doctest::Approx(0.43694035310719104).epsilon(1e-12));
  CHECK(off.py == 0.0);
}

TEST_CASE("conditional coupling reproduces f on and off the diagonal") {
  const MhKernel k = gaussian_rwm_kernel(1, 3.0);
  const ProposalCoupling q = bqmi_coupling(k.proposal);
  const Point x = pt(-0.5), y = pt(1.2);
  for (double z = -5.0; z <= 5.0; z += 0.27) {
    const Point zz = pt(z);
    const double qm = diagonal_density(q, x, y, zz);
    const BpcProbabilities diag = bpc_probabilities(k, q, x, y, zz, zz);
    const double fx = transition_subdensity(k, x, zz);
    const double fy = transition_subdensity(k, y, zz);
    // Meeting density is f(x,z) ^ f(y,z).
    CHECK(qm * std::min(diag.px, diag.py) == doctest::Approx(std::min(fx, fy)).epsilon(1e-10));
    // Diagonal plus residual parts of each marginal add back to f.
    const Point other = pt(z + 100.0);
    const BpcProbabilities off = bpc_probabilities(k, q, x, y, zz, other);
    const double qx = std::exp(k.log_q(x, zz));
    CHECK(qm * diag.px + (qx - qm) * off.px == doctest::Approx(fx).epsilon(1e-10));
    const BpcProbabilities off_y = bpc_probabilities(k, q, x, y, other, zz);
    const double qy = std::exp(k.log_q(y, zz));
    CHECK(qm * diag.py + (qy - qm) * off_y.py == doctest::Approx(fy).epsilon(1e-10));
  }
}

TEST_CASE("conditional coupling rejects couplings without a usable diagonal") {
  const MhKernel k = gaussian_rwm_kernel(1, 1.0);
  ProposalCoupling bare = bqmi_coupling(k.proposal);
  bare.log_diagonal_density = nullptr;
  RngStream rng(1, 0);
  try {
    sample_bpc(k, bare, pt(0.0), pt(1.0), rng);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingDiagonalDensity);
  }
  CHECK_THROWS_AS(make_bpc(k, bare), Error);

  ProposalCoupling inflated = bqmi_coupling(k.proposal);
  inflated.log_diagonal_density = [q = k.proposal](const Point& a, const Point&, const Point& z) {
    return q.log_density(a, z) + 1.0;
  };
  try {
    bpc_probabilities(k, inflated, pt(0.0), pt(1.0), pt(0.3), pt(0.9));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInconsistentKernel);
  }
}

TEST_CASE("conditional coupling with independent off-diagonal draws stays valid") {
  const MhKernel k = gaussian_rwm_kernel(1, 10.0);
  const CoupledKernel c = make_bpc(k, bqmi_coupling(k.proposal), independent_bernoulli_pair);
  const CouplingBounds b = kernel_tv_1d(k, 0.0, 1.0);
  RngStream rng(5, 0);
  const int n = 40000;
  int met = 0, sx = 0;
  for (int i = 0; i < n; ++i) {
    const CoupledDraw d = c.sample(pt(0.0), pt(1.0), rng);
    met += d.met;
    sx += same_point(d.X, pt(0.0));
  }
  const double r0 = atom_mass(k, 0.0).value;
  CHECK(std::abs(sx / double(n) - r0) < 3.0 * binomial_se(r0, n));
  CHECK(met / double(n) <= b.meet_max + 3.0 * binomial_se(b.meet_max, n));
}

TEST_CASE("rejection loops respect the cap") {
  MhKernel k = gaussian_rwm_kernel(1, 1.0);
  k.acceptance = AcceptanceRule::constant(0.0);
  RngStream rng(1, 0);
  CHECK_THROWS_AS(sample_bpmi(k, pt(0.0), pt(5.0), rng, 0), LoopCapExceeded);
  CHECK_THROWS_AS(sample_bpmr(k, pt(0.0), pt(5.0), rng, 0), LoopCapExceeded);
  CHECK_NOTHROW(sample_bpmi(k, pt(0.0), pt(5.0), rng, 1));
}

TEST_CASE("cost counters follow the coupling structure") {
  const MhKernel k = gaussian_rwm_kernel(1, 10.0);
  RngStream rng(3, 0);
  for (int i = 0; i < 2000; ++i) {
    const CoupledDraw mi = sample_bpmi(k, pt(0.25), pt(4.0), rng);
    CHECK(mi.cost.p_draws == 1 + mi.cost.loop_iters);
    const CoupledDraw c = sample_bpc(k, bqmi_coupling(k.proposal), pt(0.25), pt(4.0), rng);
    CHECK(c.cost.p_draws == 0);
  }
  const CoupledDraw same = sample_bpmr(k, pt(1.0), pt(1.0), rng);
  CHECK(same.cost == CostCounters{1, 1, 0, 0});
}

TEST_CASE("kernel names") {
  const MhKernel k = gaussian_rwm_kernel(1, 1.0);
  const auto ks = all_kernels(k);
  std::vector<std::string> names;
  for (const auto& c : ks) names.push_back(c.name);
  CHECK(names == std::vector<std::string>{"SQ+MI", "SQ+MR", "MI", "MR", "C+MI", "C+MR"});
  CHECK(to_string(CoupledKernel::Tag::C) == "C");
}
