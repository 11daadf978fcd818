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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "coupledmh/diagnostics.hpp"
#include "coupledmh/experiments.hpp"
#include "coupledmh/proposal_couplings.hpp"
#include "coupledmh/validation.hpp"

using namespace coupledmh;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string csv_of(const std::vector<MeetingSummary>& rows, bool gaussian) {
  std::ostringstream out;
  gaussian ? write_gaussian_csv(out, rows) : write_expo_csv(out, rows);
  return out.str();
}

std::string csv_of(const std::vector<DistanceTrace>& traces) {
  std::ostringstream out;
  write_trace_csv(out, traces);
  return out.str();
}

// Runs shared by several criteria.
struct Runs {
  std::vector<MeetingSummary> expo;
  std::vector<MeetingSummary> gaussian;
  std::vector<DistanceTrace> trace;
  std::vector<CheckResult> validation;
  double expo_seconds = 0, gaussian_seconds = 0, trace_seconds = 0;
};

Outcome criterion_expo_table(const Runs& runs) {
  const std::map<std::string, std::pair<double, double>> reference{
      {"SQ+MI", {74.0, 0.94}}, {"SQ+MR", {75.6, 0.99}}, {"MI", {60.5, 0.84}},
      {"MR", {60.9, 0.87}},    {"C+MI", {61.3, 0.87}},  {"C+MR", {62.2, 0.89}}};
  Outcome o;
  for (const MeetingSummary& r : runs.expo) {
    const auto [mean, se] = reference.at(r.coupling);
    const bool ok = std::abs(r.mean_tau - mean) <= 3.0 * se && r.capped == 0 && r.failed == 0;
    o.notes.push_back(r.coupling + fmt(" %.2f vs %.1f +- %.2f", r.mean_tau, mean, 3.0 * se));
    o.require(ok, r.coupling);
  }
  o.require(runs.expo.size() == 6, "six couplings");
  o.notes.push_back(fmt("%.1f s", runs.expo_seconds));
  return o;
}

Outcome criterion_atom_masses() {
  const MhKernel k = gaussian_rwm_kernel(1, 10.0);
  Outcome o;
  for (auto [x, expected] : {std::pair{0.25, 0.69}, std::pair{4.0, 0.47}}) {
    const double r = atom_mass(k, x).value;
    o.notes.push_back(fmt("r(%.2f) = %.6f", x, r));
    o.require(std::abs(r - expected) <= 0.01, fmt("r(%.2f)", x));
  }
  return o;
}

Outcome validation_rows(const Runs& runs, const std::function<bool(const CheckResult&)>& select) {
  Outcome o;
  int n = 0;
  for (const CheckResult& r : runs.validation) {
    if (!select(r)) continue;
    ++n;
    o.require(r.pass, r.check + " " + r.coupling + fmt(" (%g,%g)", r.x, r.y) +
                          fmt(" observed %.6f expected %.6f tol %.6f", r.observed, r.expected,
                              r.tolerance));
  }
  o.notes.insert(o.notes.begin(), std::to_string(n) + " checks");
  o.require(n > 0, "no rows selected");
  return o;
}

Outcome criterion_gaussian_scaling(const Runs& runs) {
  Outcome o;
  std::map<std::pair<std::string, int>, double> tau;
  for (const MeetingSummary& r : runs.gaussian) {
    tau[{r.coupling, r.dim}] = r.mean_tau;
    o.require(r.capped == 0 && r.failed == 0, r.coupling + " d=" + std::to_string(r.dim) + " met");
  }

  double worst_mr = 0, best_mi = 1e300;
  for (CouplingChoice c : all_coupling_choices()) {
    const double t = tau.at({label(c), 10});
    if (uses_reflection_residuals(c))
      worst_mr = std::max(worst_mr, t);
    else
      best_mi = std::min(best_mi, t);
  }
  o.notes.push_back(fmt("d=10 slowest MR-family %.1f, fastest MI-family %.1f", worst_mr, best_mi));
  o.require(worst_mr < best_mi, "MR family faster at d=10");

  for (int d = 1; d <= 10; ++d)
    o.require(tau.at({"C+MI", d}) < tau.at({"SQ+MI", d}), "C+MI < SQ+MI at d=" + std::to_string(d));

  for (const DistanceTrace& tr : runs.trace) {
    const double start = tr.mean_distance.front();
    const auto [lo, hi] = std::minmax_element(tr.mean_distance.begin(), tr.mean_distance.end());
    if (uses_reflection_residuals(parse_coupling_choice(tr.coupling))) {
      const double end = tr.mean_distance.back();
      o.notes.push_back(tr.coupling + fmt(" %.2f -> %.2f", start, end));
      o.require(end < 0.25 * start, tr.coupling + " contracts below 25%");
    } else {
      o.notes.push_back(tr.coupling + fmt(" stays in [%.2f, %.2f] of %.2f", *lo, *hi, start));
      o.require(*lo >= 0.95 * start && *hi <= 1.05 * start, tr.coupling + " within 5%");
    }
  }
  o.notes.push_back(fmt("%.1f s + %.1f s", runs.gaussian_seconds, runs.trace_seconds));
  return o;
}

Outcome criterion_proposal_bound() {
  Outcome o;
  const double sigma = 1.0;
  const int n = 100000;
  std::uint64_t stream = 0;
  for (int dim : {1, 10}) {
    const ProposalKernel q = ProposalKernel::gaussian(dim, sigma * sigma);
    for (double mult : {1.0, 2.0, 4.0}) {
      const Point x = Point::Zero(dim);
      const Point y = Point::Constant(dim, mult * sigma / std::sqrt(double(dim)));
      const double p = gaussian_overlap((y - x).norm(), sigma, dim);
      for (const ProposalCoupling& c : {bqmi_coupling(q), bqmr_coupling(q)}) {
        RngStream rng(2024, stream++);
        int met = 0;
        for (int i = 0; i < n; ++i) {
          const ProposalPair pair = c.sample(x, y, rng);
          met += same_point(pair.xp, pair.yp);
        }
        const double freq = double(met) / n;
        const bool ok = std::abs(freq - p) <= 3.0 * binomial_se(p, n);
        o.require(ok, c.name + fmt(" d=%.0f delta=%.0f sigma: %.5f vs %.5f", dim, mult, freq, p));
      }
    }
  }
  o.notes.push_back("12 checks");
  return o;
}

Outcome criterion_determinism(const Runs& runs) {
  Outcome o;
  ExpoConfig expo;
  expo.run.threads = 2;
  o.require(csv_of(expo_experiment(expo), false) == csv_of(runs.expo, false), "expo csv");
  GaussianConfig gauss;
  gauss.run.threads = 2;
  o.require(csv_of(gaussian_experiment(gauss), true) == csv_of(runs.gaussian, true),
            "gaussian csv");
  TraceConfig trace;
  trace.run.threads = 2;
  o.require(csv_of(distance_trace_experiment(trace)) == csv_of(runs.trace), "trace csv");
  o.notes.push_back("reruns with 2 threads compared byte for byte");
  return o;
}

void report(int id, const std::string& title, const Outcome& o, int& failures) {
  std::printf("criterion %d %s  %s\n", id, o.pass ? "PASS" : "FAIL", title.c_str());
  for (const std::string& note : o.notes) std::printf("    %s\n", note.c_str());
  std::fflush(stdout);
  failures += o.pass ? 0 : 1;
}

}  // namespace

int main() {
  Runs runs;
  auto t0 = std::chrono::steady_clock::now();
  runs.expo = expo_experiment(ExpoConfig{});
  runs.expo_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  runs.gaussian = gaussian_experiment(GaussianConfig{});
  runs.gaussian_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  runs.trace = distance_trace_experiment(TraceConfig{});
  runs.trace_seconds = seconds_since(t0);

  runs.validation = run_validation(ValidationConfig{});

  auto is_meeting = [](const CheckResult& r) {
    return r.check == "meet" || r.check == "sq_below_max";
  };
  auto is_marginal = [](const CheckResult& r) {
    return r.check == "atom_x" || r.check == "atom_y" || r.check == "ks_x" || r.check == "ks_y";
  };
  auto is_cost = [](const CheckResult& r) {
    const bool cost = r.check == "p_draws" || r.check == "evaluations" ||
                      r.check == "loop_mean" || r.check == "loop_var";
    return cost && r.x == 0.25 && r.y == 4.0;
  };

  int failures = 0;
  report(1, "exponential target meeting times", criterion_expo_table(runs), failures);
  report(2, "atom masses", criterion_atom_masses(), failures);
  report(3, "one-step meeting frequencies", validation_rows(runs, is_meeting), failures);
  report(4, "marginal correctness", validation_rows(runs, is_marginal), failures);
  report(5, "cost formulas", validation_rows(runs, is_cost), failures);
  report(6, "gaussian scaling", criterion_gaussian_scaling(runs), failures);
  report(7, "proposal coupling bound", criterion_proposal_bound(), failures);
  report(8, "determinism", criterion_determinism(runs), failures);
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
