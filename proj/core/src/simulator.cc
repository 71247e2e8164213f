#include "wncs/simulator.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "wncs/error.h"
#include "wncs/parallel.h"
#include "wncs/random.h"

namespace wncs {

namespace {

constexpr int64_t kTrialChunk = 256;

struct ChunkStats {
  std::vector<double> v_sum;
  std::vector<double> v_sq;
  int64_t finite_trials{0};
  double v0_sum{0.0};
  std::vector<int64_t> hist;
  double transmit{0.0};
  double sensing{0.0};
  int64_t successes{0};
  int64_t attempts{0};
  int64_t sensed{0};
  int64_t diverged{0};
  std::vector<int64_t> hitting;
  std::vector<DeliveryEvent> log;
  std::vector<std::vector<double>> traces;
};

std::vector<int64_t> RecordTimes(int64_t horizon, int64_t stride) {
  std::vector<int64_t> times;
  for (int64_t t = 0; t < horizon; t += stride) times.push_back(t);
  times.push_back(horizon);
  return times;
}

void InitialState(const ClosedLoopSystem& sys, const SimConfig& cfg,
                  Rng* rng, VectorXd* chi, StepWorkspace* ws) {
  if (const auto* fixed = std::get_if<VectorXd>(&cfg.initial_state)) {
    *chi = *fixed;
    return;
  }
  const double radius = std::get<SphereInit>(cfg.initial_state).radius;
  const ChiLayout& lay = sys.layout();
  chi->setZero(lay.total());
  double norm = 0.0;
  while (!(norm > 0.0)) {
    for (int i = 0; i < lay.plant; ++i) (*chi)[i] = rng->Normal();
    norm = chi->head(lay.plant).norm();
  }
  chi->head(lay.plant) *= radius / norm;
  sys.plant().output(chi->head(lay.plant), ws->y);
  chi->segment(lay.nominal(), lay.output) = ws->y;
}

}  // namespace

SimResult Simulate(const ClosedLoopSystem& sys,
                   const LyapunovCertificate* cert, const ChannelModel& ch,
                   const ThresholdPolicy& policy, const SimConfig& cfg) {
  if (cfg.horizon < 1 || cfg.trials < 1 || cfg.record_v_every < 1) {
    throw InputError("Simulate: horizon, trials and stride must be positive");
  }
  if (static_cast<double>(cfg.horizon) * static_cast<double>(cfg.trials) >
      cfg.budget) {
    throw ResourceError("Simulate: horizon x trials exceeds the budget of " +
                        std::to_string(cfg.budget) + " steps");
  }
  if (const auto* fixed = std::get_if<VectorXd>(&cfg.initial_state)) {
    if (fixed->size() != sys.chi_dim()) {
      throw InputError("Simulate: initial state has the wrong dimension");
    }
  } else if (!(std::get<SphereInit>(cfg.initial_state).radius > 0.0)) {
    throw InputError("Simulate: sphere radius must be positive");
  }
  if (policy.n < 0) throw InputError("Simulate: n must be nonnegative");
  if (policy.rule == PowerRule::kConstant && policy.power > ch.P_max()) {
    throw InputError("Simulate: constant power exceeds P_max");
  }
  if (cfg.target && !cfg.allow_unstable) {
    const PolicyVerification v = VerifyPolicy(ch, *cfg.target, policy);
    if (!v.pass) {
      throw InputError("Simulate: policy gives beta = " +
                       std::to_string(v.beta) +
                       " above mu; set allow_unstable to run it anyway");
    }
  }

  const int n = policy.n;
  const std::vector<int64_t> times = RecordTimes(cfg.horizon,
                                                 cfg.record_v_every);
  const size_t R = times.size();
  std::vector<double> cdf(ch.size());
  double acc = 0.0;
  for (int i = 0; i < ch.size(); ++i) cdf[i] = (acc += ch.pmf()[i]);

  const int64_t chunks = (cfg.trials + kTrialChunk - 1) / kTrialChunk;
  std::vector<ChunkStats> parts(chunks);
  ParallelForChunks(chunks, [&](int64_t c) {
    ChunkStats& s = parts[c];
    if (cert) {
      s.v_sum.assign(R, 0.0);
      s.v_sq.assign(R, 0.0);
    }
    s.hist.assign(n + 1, 0);
    StepWorkspace ws = sys.MakeWorkspace();
    VectorXd chi(sys.chi_dim()), next(sys.chi_dim());
    std::vector<double> v_rec(R);
    const int sp = sys.layout().plant;
    const int64_t end = std::min(cfg.trials, (c + 1) * kTrialChunk);
    for (int64_t trial = c * kTrialChunk; trial < end; ++trial) {
      Rng rng(cfg.seed, static_cast<uint64_t>(trial));
      InitialState(sys, cfg, &rng, &chi, &ws);
      const bool logged = trial < cfg.log_trials;
      std::vector<double> trace;
      bool finite = true;
      int64_t hit = -1;
      int64_t tau = 1;
      size_t next_rec = 0;
      for (int64_t t = 0;; ++t) {
        const bool at_record = next_rec < R && times[next_rec] == t;
        if (finite) {
          if (cert && (at_record || logged)) {
            const double v = (*cert)(chi);
            if (!std::isfinite(v)) {
              finite = false;
            } else {
              if (at_record) v_rec[next_rec] = v;
              if (logged) trace.push_back(v);
            }
          }
          if (cfg.hitting_radius && hit < 0 &&
              chi.head(sp).squaredNorm() <= *cfg.hitting_radius) {
            hit = t;
          }
          if (!chi.allFinite()) finite = false;
        }
        if (at_record) ++next_rec;
        if (t == cfg.horizon) break;

        ++s.hist[std::min<int64_t>(tau, n + 1) - 1];
        bool success = false;
        if (tau >= n + 1) {
          const double u_h = rng.Uniform();
          const int idx = std::min<int>(
              static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u_h) -
                               cdf.begin()),
              ch.size() - 1);
          const double h = ch.alphabet()[idx];
          if (policy.requires_csi) {
            s.sensing += ch.P_S();
            ++s.sensed;
          }
          if (AtLeast(h, policy.hbar)) {
            const double power = policy.rule == PowerRule::kConstant
                                     ? policy.power
                                     : InversionPower(ch, h, policy.power);
            s.transmit += power;
            ++s.attempts;
            success = rng.Uniform() < ch.psi()(h * power);
            if (success) ++s.successes;
            if (logged) {
              s.log.push_back(DeliveryEvent{trial, t, tau, h, power, success});
            }
          }
        }
        if (finite) {
          if (success) {
            sys.StepSuccessInto(chi, next, &ws);
          } else {
            sys.StepFailureInto(chi, next, &ws);
          }
          chi.swap(next);
        }
        tau = success ? 1 : tau + 1;
      }
      if (cfg.hitting_radius) s.hitting.push_back(hit);
      if (logged) s.traces.push_back(std::move(trace));
      if (!finite) {
        ++s.diverged;
        continue;
      }
      if (cert) {
        ++s.finite_trials;
        s.v0_sum += v_rec[0];
        for (size_t k = 0; k < R; ++k) {
          s.v_sum[k] += v_rec[k];
          s.v_sq[k] += v_rec[k] * v_rec[k];
        }
      }
    }
  });

  SimResult r;
  r.horizon = cfg.horizon;
  r.trials = cfg.trials;
  r.n = n;
  r.record_times = times;
  r.tau_histogram.assign(n + 1, 0);
  std::vector<double> v_sum(R, 0.0), v_sq(R, 0.0);
  int64_t finite_trials = 0;
  double v0_sum = 0.0, transmit = 0.0, sensing = 0.0;
  for (auto& s : parts) {
    for (int j = 0; j <= n; ++j) r.tau_histogram[j] += s.hist[j];
    transmit += s.transmit;
    sensing += s.sensing;
    r.success_count += s.successes;
    r.attempt_count += s.attempts;
    r.sensing_count += s.sensed;
    r.diverged_count += s.diverged;
    if (cert) {
      finite_trials += s.finite_trials;
      v0_sum += s.v0_sum;
      for (size_t k = 0; k < R; ++k) {
        v_sum[k] += s.v_sum[k];
        v_sq[k] += s.v_sq[k];
      }
    }
    r.hitting_times.insert(r.hitting_times.end(), s.hitting.begin(),
                           s.hitting.end());
    r.delivery_log.insert(r.delivery_log.end(), s.log.begin(), s.log.end());
    for (auto& tr : s.traces) r.v_traces.push_back(std::move(tr));
  }
  const double steps =
      static_cast<double>(cfg.horizon) * static_cast<double>(cfg.trials);
  r.empirical_transmit = transmit / steps;
  r.empirical_sensing = sensing / steps;
  r.empirical_cost = r.empirical_transmit + r.empirical_sensing;
  if (cert && finite_trials > 0) {
    const double m = static_cast<double>(finite_trials);
    const double v0 = v0_sum / m;
    r.v_mean.resize(R);
    r.v_sem.resize(R);
    for (size_t k = 0; k < R; ++k) {
      const double mean = v_sum[k] / m;
      const double var =
          m > 1 ? std::max(0.0, (v_sq[k] - m * mean * mean) / (m - 1)) : 0.0;
      r.v_mean[k] = mean;
      r.v_sem[k] = std::sqrt(var / m);
    }
    if (cfg.target) {
      r.v_bound.resize(R);
      for (size_t k = 0; k < R; ++k) {
        r.v_bound[k] =
            std::pow(cfg.target->mu(), static_cast<double>(times[k])) * v0;
      }
    }
  }
  return r;
}

CheckReport TauHistogramCheck(const SimResult& result, int n, double eta) {
  CheckReport rep;
  const double total = static_cast<double>(result.horizon) *
                       static_cast<double>(result.trials);
  rep.tolerance = 4.0 / std::sqrt(total);
  if (n < 0 || static_cast<int>(result.tau_histogram.size()) != n + 1) {
    rep.deviation = 1.0;
    return rep;
  }
  const double denom = n * eta + 1.0;
  for (int j = 0; j <= n; ++j) {
    const double expected = j < n ? eta / denom : 1.0 / denom;
    const double freq = static_cast<double>(result.tau_histogram[j]) / total;
    rep.deviation = std::max(rep.deviation, std::abs(freq - expected));
  }
  rep.pass = rep.deviation <= rep.tolerance;
  return rep;
}

CostCheckReport EmpiricalCostCheck(const SimResult& result,
                                   const CostBreakdown& predicted) {
  CostCheckReport rep;
  rep.empirical = result.empirical_cost;
  rep.predicted = predicted.total;
  rep.abs_diff = std::abs(rep.empirical - rep.predicted);
  rep.rel_tolerance =
      3.0 / std::sqrt(static_cast<double>(result.trials)) + 0.01;
  rep.sensing_diff = std::abs(result.empirical_sensing - predicted.sensing_part);
  rep.transmit_diff =
      std::abs(result.empirical_transmit - predicted.transmit_part);
  rep.pass = rep.abs_diff <= rep.rel_tolerance * std::abs(rep.predicted);
  return rep;
}

DecayCheckReport DecayCheck(const SimResult& result) {
  DecayCheckReport rep;
  if (result.v_bound.empty() || result.v_mean.size() != result.v_bound.size()) {
    return rep;
  }
  rep.pass = true;
  for (size_t k = 0; k < result.v_mean.size(); ++k) {
    const double limit = result.v_bound[k] + 3.0 * result.v_sem[k];
    const double ratio = limit > 0.0 ? result.v_mean[k] / limit
                                     : (result.v_mean[k] > 0.0 ? INFINITY : 0.0);
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_t = result.record_times[k];
    }
    if (result.v_mean[k] > limit) rep.pass = false;
  }
  return rep;
}

std::vector<HittingRow> HittingTimeExperiment(
    const ClosedLoopSystem& sys, const ChannelModel& ch,
    const std::vector<ThresholdPolicy>& policies, double radius,
    const SimConfig& cfg, bool include_baseline) {
  if (!(radius > 0.0)) throw InputError("HittingTimeExperiment: radius <= 0");
  std::vector<std::pair<ThresholdPolicy, bool>> runs;
  for (const auto& p : policies) runs.emplace_back(p, false);
  if (include_baseline) {
    runs.emplace_back(ThresholdPolicy::Constant(ch, 0, 0.0, ch.P_max()), true);
    runs.back().first.requires_csi = false;
  }
  std::vector<HittingRow> rows;
  for (const auto& [policy, baseline] : runs) {
    SimConfig c = cfg;
    c.hitting_radius = radius;
    c.allow_unstable = true;
    c.target.reset();
    c.log_trials = 0;
    const SimResult r = Simulate(sys, nullptr, ch, policy, c);
    HittingRow row;
    row.policy = policy;
    row.baseline = baseline;
    row.mean_cost = r.empirical_cost;
    double sum = 0.0;
    for (int64_t t : r.hitting_times) {
      if (t < 0) {
        ++row.censored;
      } else {
        ++row.hits;
        sum += static_cast<double>(t);
      }
    }
    row.mean_hitting_time = row.hits > 0 ? sum / row.hits : INFINITY;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace wncs
