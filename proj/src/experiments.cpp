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

#include "coupledmh/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "coupledmh/errors.hpp"
#include "coupledmh/proposal_couplings.hpp"

namespace coupledmh {

MeetingRecord run_coupled_chain(const CoupledKernel& coupled, const Point& x0, const Point& y0,
                                std::int64_t max_iterations, RngStream& rng,
                                std::vector<double>* distances) {
  check_point(x0, "run_coupled_chain");
  check_point(y0, "run_coupled_chain");
  MeetingRecord rec;
  rec.seed = rng.seed();
  rec.replication = static_cast<std::int64_t>(rng.stream_id());

  Point x = x0;
  Point y = y0;
  if (distances) distances->push_back((x - y).norm());
  if (same_point(x, y)) return rec;

  for (std::int64_t t = 1; t <= max_iterations; ++t) {
    CoupledDraw draw;
    try {
      draw = coupled.sample(x, y, rng);
    } catch (const Error& e) {
      rec.tau = t;
      rec.failed = true;
      rec.error = e.what();
      return rec;
    }
    rec.total_cost += draw.cost;
    x = std::move(draw.X);
    y = std::move(draw.Y);
    if (distances) distances->push_back(draw.met ? 0.0 : (x - y).norm());
    if (draw.met) {
      rec.tau = t;
      return rec;
    }
  }
  rec.tau = max_iterations;
  rec.capped = true;
  return rec;
}

const std::vector<CouplingChoice>& all_coupling_choices() {
  static const std::vector<CouplingChoice> all{CouplingChoice::SQ_MI, CouplingChoice::SQ_MR,
                                               CouplingChoice::MI,    CouplingChoice::MR,
                                               CouplingChoice::C_MI,  CouplingChoice::C_MR};
  return all;
}

std::string label(CouplingChoice c) {
  switch (c) {
    case CouplingChoice::SQ_MI: return "SQ+MI";
    case CouplingChoice::SQ_MR: return "SQ+MR";
    case CouplingChoice::MI: return "MI";
    case CouplingChoice::MR: return "MR";
    case CouplingChoice::C_MI: return "C+MI";
    case CouplingChoice::C_MR: return "C+MR";
  }
  return "?";
}

CouplingChoice parse_coupling_choice(const std::string& s) {
  for (CouplingChoice c : all_coupling_choices())
    if (label(c) == s) return c;
  throw Error(ErrorCode::kInvalidArgument, "unknown coupling '" + s + "'");
}

bool uses_reflection_residuals(CouplingChoice c) {
  return c == CouplingChoice::SQ_MR || c == CouplingChoice::MR || c == CouplingChoice::C_MR;
}

CoupledKernel build_coupled_kernel(CouplingChoice choice, const MhKernel& kernel,
                                   std::int64_t loop_cap) {
  CoupledKernel out;
  switch (choice) {
    case CouplingChoice::SQ_MI: out = make_bpsq(kernel, bqmi_coupling(kernel.proposal, loop_cap)); break;
    case CouplingChoice::SQ_MR: out = make_bpsq(kernel, bqmr_coupling(kernel.proposal)); break;
    case CouplingChoice::MI: out = make_bpmi(kernel, loop_cap); break;
    case CouplingChoice::MR: out = make_bpmr(kernel, loop_cap); break;
    case CouplingChoice::C_MI: out = make_bpc(kernel, bqmi_coupling(kernel.proposal, loop_cap)); break;
    case CouplingChoice::C_MR: out = make_bpc(kernel, bqmr_coupling(kernel.proposal)); break;
  }
  out.name = label(choice);
  return out;
}

namespace {

template <typename Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || n < 2) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::jthread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::int64_t i = next++; i < n; i = next++) fn(i);
    });
}

struct InitialPair {
  Point x0;
  Point y0;
};

InitialPair initial_pair(const CoupledKernel& coupled, const ReplicationOptions& opts,
                         RngStream& rng) {
  Point x0 = opts.x0 ? *opts.x0 : coupled.kernel.target.sample(rng);
  Point y0 = opts.y0 ? *opts.y0 : coupled.kernel.target.sample(rng);
  return {std::move(x0), std::move(y0)};
}

void check_options(const ReplicationOptions& opts) {
  if (opts.replications < 1 || opts.max_iterations < 1)
    throw Error(ErrorCode::kInvalidArgument, "replications and max_iterations must be >= 1");
}

}  // namespace

std::vector<MeetingRecord> run_replications(const CoupledKernel& coupled,
                                            const ReplicationOptions& opts) {
  check_options(opts);
  std::vector<MeetingRecord> records(static_cast<std::size_t>(opts.replications));
  parallel_for(opts.replications, opts.threads, [&](std::int64_t i) {
    RngStream rng(opts.base_seed, static_cast<std::uint64_t>(i));
    const InitialPair init = initial_pair(coupled, opts, rng);
    records[static_cast<std::size_t>(i)] =
        run_coupled_chain(coupled, init.x0, init.y0, opts.max_iterations, rng);
  });
  return records;
}

MeetingSummary summarize(const std::vector<MeetingRecord>& records) {
  MeetingSummary s;
  double mean = 0.0, m2 = 0.0;
  for (const MeetingRecord& r : records) {
    s.cost += r.total_cost;
    if (r.failed) {
      ++s.failed;
      continue;
    }
    if (r.capped) {
      ++s.capped;
      continue;
    }
    ++s.n;
    const double delta = static_cast<double>(r.tau) - mean;
    mean += delta / static_cast<double>(s.n);
    m2 += delta * (static_cast<double>(r.tau) - mean);
  }
  s.mean_tau = mean;
  if (s.n > 1) s.se_tau = std::sqrt(m2 / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
  return s;
}

std::vector<MeetingSummary> expo_experiment(const ExpoConfig& config) {
  const MhKernel kernel = drifted_exponential_kernel(config.kappa, config.sigma2);
  std::vector<MeetingSummary> rows;
  for (CouplingChoice c : config.couplings) {
    const CoupledKernel coupled = build_coupled_kernel(c, kernel);
    MeetingSummary s = summarize(run_replications(coupled, config.run));
    s.coupling = label(c);
    rows.push_back(std::move(s));
  }
  return rows;
}

std::vector<MeetingSummary> gaussian_experiment(const GaussianConfig& config) {
  std::vector<MeetingSummary> rows;
  for (CouplingChoice c : config.couplings) {
    for (int d : config.dims) {
      const MhKernel kernel = gaussian_rwm_kernel(d, config.ell * config.ell / d);
      const CoupledKernel coupled = build_coupled_kernel(c, kernel);
      MeetingSummary s = summarize(run_replications(coupled, config.run));
      s.coupling = label(c);
      s.dim = d;
      rows.push_back(std::move(s));
    }
  }
  return rows;
}

std::vector<DistanceTrace> distance_trace_experiment(const TraceConfig& config) {
  check_options(config.run);
  if (config.horizon < 1) throw Error(ErrorCode::kInvalidArgument, "trace horizon must be >= 1");
  const auto horizon = static_cast<std::size_t>(config.horizon);
  const MhKernel kernel =
      gaussian_rwm_kernel(config.dim, config.ell * config.ell / config.dim);

  std::vector<DistanceTrace> traces;
  for (CouplingChoice c : config.couplings) {
    const CoupledKernel coupled = build_coupled_kernel(c, kernel);
    const auto reps = static_cast<std::size_t>(config.run.replications);
    std::vector<std::vector<double>> per_rep(reps);
    std::vector<char> ok(reps, 0);
    parallel_for(config.run.replications, config.run.threads, [&](std::int64_t i) {
      RngStream rng(config.run.base_seed, static_cast<std::uint64_t>(i));
      const InitialPair init = initial_pair(coupled, config.run, rng);
      std::vector<double>& dist = per_rep[static_cast<std::size_t>(i)];
      dist.reserve(horizon + 1);
      const MeetingRecord rec =
          run_coupled_chain(coupled, init.x0, init.y0, config.horizon, rng, &dist);
      dist.resize(horizon + 1, 0.0);
      ok[static_cast<std::size_t>(i)] = rec.failed ? 0 : 1;
    });

    DistanceTrace trace;
    trace.coupling = label(c);
    trace.dim = config.dim;
    trace.mean_distance.assign(horizon + 1, 0.0);
    for (std::size_t i = 0; i < reps; ++i) {
      if (!ok[i]) continue;
      ++trace.n;
      for (std::size_t t = 0; t <= horizon; ++t) trace.mean_distance[t] += per_rep[i][t];
    }
    if (trace.n > 0)
      for (double& v : trace.mean_distance) v /= static_cast<double>(trace.n);
    traces.push_back(std::move(trace));
  }
  return traces;
}

namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void write_expo_csv(std::ostream& out, const std::vector<MeetingSummary>& rows) {
  out << "coupling,mean_tau,se_tau,n,capped\n";
  for (const MeetingSummary& r : rows)
    out << r.coupling << ',' << fixed(r.mean_tau) << ',' << fixed(r.se_tau) << ',' << r.n << ','
        << r.capped << '\n';
}

void write_gaussian_csv(std::ostream& out, const std::vector<MeetingSummary>& rows) {
  out << "coupling,d,mean_tau,se_tau,n,capped\n";
  for (const MeetingSummary& r : rows)
    out << r.coupling << ',' << r.dim << ',' << fixed(r.mean_tau) << ',' << fixed(r.se_tau) << ','
        << r.n << ',' << r.capped << '\n';
}

void write_trace_csv(std::ostream& out, const std::vector<DistanceTrace>& traces) {
  out << "coupling,t,mean_dist,n\n";
  for (const DistanceTrace& tr : traces)
    for (std::size_t t = 0; t < tr.mean_distance.size(); ++t)
      out << tr.coupling << ',' << t << ',' << fixed(tr.mean_distance[t]) << ',' << tr.n << '\n';
}

}  // namespace coupledmh
