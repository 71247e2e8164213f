#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wncs/channel.h"
#include "wncs/cost.h"
#include "wncs/dynamics.h"
#include "wncs/lyapunov.h"
#include "wncs/optimizer.h"
#include "wncs/reference.h"
#include "wncs/simulator.h"
#include "wncs/stability.h"

namespace wncs {
namespace {

struct Outcome {
  bool pass{false};
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

/// Collects named property results into one outcome.
class Ledger {
 public:
  void Expect(bool ok, const std::string& name) {
    ++count_;
    if (!ok) failed_.push_back(name);
  }
  Outcome Result() const {
    if (failed_.empty()) return {true, Format("%d properties hold", count_)};
    std::string d = "failed:";
    for (const auto& f : failed_) d += " " + f;
    return {false, d};
  }

 private:
  int count_{0};
  std::vector<std::string> failed_;
};

// Feasibility table.
Outcome Criterion1() {
  constexpr double kExpected[11] = {0.092, 0.097, 0.11, 0.12, 0.14, 0.16,
                                 0.19,  0.24,  0.32, 0.47, 0.9};
  const RateTarget rt = RobotArmRates(0.999);
  double worst = 0.0;
  int worst_n = 0;
  bool all_defined = true;
  for (int n = 0; n <= 10; ++n) {
    const auto eta = RequiredEta(n, rt);
    if (!eta) {
      all_defined = false;
      continue;
    }
    const double dev = std::abs(*eta - kExpected[n]);
    if (dev > worst) {
      worst = dev;
      worst_n = n;
    }
  }
  const int N = MaxHorizon(rt);
  const bool pass = all_defined && worst <= 0.005 && N == 10;
  return {pass, Format("max |eta* - expected| = %.4f at n = %d (eta* = %.4f vs "
                       "%.2f, tol 0.005); max_horizon = %d",
                       worst, worst_n, *RequiredEta(worst_n, rt),
                       kExpected[worst_n], N)};
}

// Pure time thresholds.
Outcome Criterion2() {
  const ChannelModel ch = ExpErrorChannel(10.0);
  const auto p10 = MinPower(ch, RobotArmRates(0.999), 10, 0.0);
  bool pass = p10 && *p10 >= 9.4 && *p10 <= 10.0;
  std::string detail = Format("p_10 = %.4f;", p10 ? *p10 : NAN);
  const double mus[3] = {0.995, 0.999, 0.9999};
  const int expected[3] = {1, 8, 18};
  for (int i = 0; i < 3; ++i) {
    const auto o = SolvePureTime(ch, RobotArmRates(mus[i]));
    const int n = o ? o->policy.n : -1;
    pass = pass && n == expected[i];
    detail += Format(" mu = %g: n* = %d (J = %.4f)", mus[i], n,
                     o ? o->cost.total : NAN);
  }
  return {pass, detail};
}

// Pure channel thresholds.
Outcome Criterion3() {
  const ChannelModel ch = RayleighQpskChannel(0.0, 10.0);
  const RateTarget rt = RobotArmRates(0.999);
  const auto c = SolvePureChannel(ch, rt, PowerRule::kConstant);
  const auto i = SolvePureChannel(ch, rt, PowerRule::kInversion);
  if (!c || !i) return {false, "pure-channel problem infeasible"};
  const double crossover = c->cost.total - i->cost.total;
  const bool pass = std::abs(c->cost.total - 0.16) <= 0.02 &&
                    std::abs(i->cost.total - 0.12) <= 0.02 &&
                    std::abs(c->policy.hbar - 2.2) <= 0.1 + 1e-9 &&
                    std::abs(i->policy.hbar - 2.2) <= 0.1 + 1e-9 &&
                    std::abs(crossover - 0.04) <= 0.01;
  return {pass,
          Format("constant %.4f at hbar = %.2f (expected 0.16 at 2.2); inversion "
                 "%.4f at hbar = %.2f (expected 0.12 at 2.2); crossover P_S = "
                 "%.4f (expected 0.04)",
                 c->cost.total, c->policy.hbar, i->cost.total, i->policy.hbar,
                 crossover)};
}

// Unsaturated inversion at n = 9.
Outcome Criterion4() {
  const ChannelModel ch = RayleighQpskChannel(0.0, 10.0);
  const RateTarget rt = RobotArmRates(0.999);
  const SearchSpace space{9, std::nullopt};
  const auto inv = SolveUnsaturatedInversion(ch, rt, nullptr, space);
  const auto eps = SolveEpsLoss(ch, rt, 0.01, nullptr, space);
  if (!inv || !eps) return {false, "n = 9 problem infeasible"};
  const bool pass = std::abs(inv->cost.total - 0.29) <= 0.03 &&
                    std::abs(inv->policy.hbar - 0.65) <= 0.1 + 1e-9 &&
                    std::abs(eps->cost.total - 0.57) <= 0.05;
  return {pass,
          Format("unsaturated %.4f at hbar = %.2f (expected 0.29 at 0.65); "
                 "eps-loss (eps = 0.01) %.4f at hbar = %.2f (expected 0.57)",
                 inv->cost.total, inv->policy.hbar, eps->cost.total,
                 eps->policy.hbar)};
}

// Stationary clock distribution.
Outcome Criterion5() {
  const ChannelModel ch =
      SinglePointChannel(1.0, SuccessFunction::ExpError(), 0.0, 10.0);
  const ClosedLoopSystem sys = RobotArm();
  SimConfig cfg;
  cfg.horizon = 10000;
  cfg.trials = 100;
  cfg.seed = 5;
  cfg.record_v_every = cfg.horizon;
  cfg.allow_unstable = true;
  const std::pair<int, double> settings[3] = {{0, 0.3}, {2, 0.5}, {5, 0.8}};
  bool pass = true;
  std::string detail;
  for (const auto& [n, eta] : settings) {
    const double p = -1.0 / std::log(eta);
    const ThresholdPolicy policy = ThresholdPolicy::Constant(ch, n, 0.0, p);
    const SimResult r = Simulate(sys, nullptr, ch, policy, cfg);
    const CheckReport c = TauHistogramCheck(r, n, eta);
    pass = pass && c.pass;
    detail += Format("(n = %d, eta = %.1f): dev %.2e / tol %.2e; ", n, eta,
                     c.deviation, c.tolerance);
  }
  return {pass, detail};
}

// Stochastic decay under the optimal pure-time policy.
Outcome Criterion6() {
  const ChannelModel ch = ExpErrorChannel(10.0);
  const RateTarget rt = RobotArmRates(0.999);
  const auto o = SolvePureTime(ch, rt);
  if (!o) return {false, "pure-time problem infeasible"};
  const LyapunovCertificate cert = RobotArmCertificate();
  SimConfig cfg;
  cfg.horizon = 5000;
  cfg.trials = 10000;
  cfg.seed = 6;
  cfg.record_v_every = 10;
  cfg.target = rt;
  const SimResult r = Simulate(RobotArm(), &cert, ch, o->policy, cfg);
  const DecayCheckReport d = DecayCheck(r);
  return {d.pass && r.diverged_count == 0,
          Format("n = %d, p = %.5f; worst v_mean / (mu^t V0 + 3 SEM) = %.4f "
                 "at t = %lld over %zu records; diverged %lld",
                 o->policy.n, o->policy.power, d.worst_ratio,
                 static_cast<long long>(d.worst_t), r.record_times.size(),
                 static_cast<long long>(r.diverged_count))};
}

// Cost-formula agreement.
Outcome Criterion7() {
  const RateTarget rt = RobotArmRates(0.999);
  const ChannelModel rayleigh = RayleighQpskChannel(0.05, 10.0);
  const ChannelModel exp_error = ExpErrorChannel(10.0);
  const double p = 1.5 * *MinPower(rayleigh, rt, 3, 1.0);
  const double kappa = 1.2 * *MinGain(rayleigh, rt, 2, 0.8);
  struct Case {
    const char* name;
    const ChannelModel* ch;
    ThresholdPolicy policy;
  };
  const Case cases[3] = {
      {"constant", &rayleigh, ThresholdPolicy::Constant(rayleigh, 3, 1.0, p)},
      {"inversion", &rayleigh, ThresholdPolicy::Inversion(2, 0.8, kappa)},
      {"pure-time", &exp_error, SolvePureTime(exp_error, rt)->policy}};
  SimConfig cfg;
  cfg.horizon = 2000;
  cfg.trials = 10000;
  cfg.seed = 7;
  cfg.record_v_every = cfg.horizon;
  cfg.target = rt;
  bool pass = true;
  std::string detail;
  for (const Case& c : cases) {
    const SimResult r = Simulate(RobotArm(), nullptr, *c.ch, c.policy, cfg);
    const CostCheckReport rep =
        EmpiricalCostCheck(r, CostOfPolicy(*c.ch, c.policy));
    pass = pass && rep.pass;
    detail += Format("%s: %.5f vs %.5f (rel %.2e / %.2e); ", c.name,
                     rep.empirical, rep.predicted,
                     rep.abs_diff / rep.predicted, rep.rel_tolerance);
  }
  return {pass, detail};
}

// Certificate check on the robot arm.
Outcome Criterion8() {
  const LinearBlocks lin = RobotArmLinearization();
  const CertificationReport r =
      CertifyLinear(lin.A_S, lin.A_U, RobotArmP(), 0.98, 1.0009);
  const SamplingReport s = EstimateRatesSampling(
      RobotArm(), RobotArmCertificate(),
      BoxSampler{VectorXd::Constant(4, -1.0), VectorXd::Constant(4, 1.0),
                 100000, 8});
  return {r.pass() && !s.falsified(),
          Format("min eig success %.3e, failure %.3e (tol -%.3e); sampled "
                 "max ratio f_S %.5f (a_S 0.98), f_U %.5f (a_U 1.0009)",
                 r.min_eig_success, r.min_eig_failure, r.tol_psd,
                 s.max_ratio_success, s.max_ratio_failure)};
}

void BetaProperties(Ledger* l) {
  for (double mu : {0.99, 0.995, 0.999, 0.9999}) {
    const RateTarget rt = RobotArmRates(mu);
    bool strict = true, exact = true, trip = true;
    for (int n : {0, 1, 5, 10, 30}) {
      double prev = Beta(n, 0.0, rt);
      for (int i = 1; i <= 1000; ++i) {
        const double b = Beta(n, i / 1000.0, rt);
        strict = strict && b < prev;
        prev = b;
      }
      exact = exact && Beta(n, 0.0, rt) == rt.a_U();
    }
    exact = exact && Beta(0, 1.0, rt) == rt.a_S();
    for (int n = 0; n <= MaxHorizon(rt); ++n) {
      const auto eta = RequiredEta(n, rt);
      trip = trip && eta && std::abs(Beta(n, *eta, rt) - mu) <= 1e-12;
    }
    l->Expect(strict, Format("beta-strict(mu=%g)", mu));
    l->Expect(exact, Format("beta-exact(mu=%g)", mu));
    l->Expect(trip, Format("round-trip(mu=%g)", mu));
  }
}

void ChannelProperties(Ledger* l) {
  const ChannelModel ch = RayleighQpskChannel();
  bool mono = true, sandwich = true, threshold = true;
  for (int i = 0; i < ch.size(); i += 5) {
    const double hbar = ch.alphabet()[i];
    const double tail = TailProb(ch, hbar);
    double prev_c = -1.0, prev_i = -1.0;
    for (int k = 0; k <= 200; ++k) {
      const double p = ch.P_max() * k / 200.0;
      const double eta_c = EtaConstant(ch, hbar, p);
      mono = mono && eta_c >= prev_c;
      sandwich = sandwich && eta_c >= tail * ch.psi()(hbar * p) - 1e-15 &&
                 eta_c <= tail + 1e-15;
      prev_c = eta_c;
      const double eta_i = EtaInversion(ch, hbar, 0.25 * k);
      mono = mono && eta_i >= prev_i - 1e-15;
      prev_i = eta_i;
    }
    if (i + 5 < ch.size()) {
      const double next = ch.alphabet()[i + 5];
      threshold = threshold && EtaConstant(ch, next, 3.0) <=
                                   EtaConstant(ch, hbar, 3.0) + 1e-15;
    }
  }
  bool continuity = true;
  const ChannelModel capped = RayleighQpskChannel(0.0, 2.0);
  for (int i = 1; i < capped.size(); i += 7) {
    const double hbar = capped.alphabet()[i];
    const double kappa = hbar * capped.P_max();
    const double below = EtaInversion(capped, hbar, kappa * (1 - 1e-12));
    const double at = EtaInversion(capped, hbar, kappa);
    const double above = EtaInversion(capped, hbar, kappa * (1 + 1e-12));
    continuity = continuity && std::abs(at - below) <= 1e-10 &&
                 std::abs(above - at) <= 1e-10 &&
                 std::abs(at - TailProb(capped, hbar) * capped.psi()(kappa)) <=
                     1e-14;
  }
  l->Expect(mono, "eta-monotone");
  l->Expect(sandwich, "eta-sandwich");
  l->Expect(threshold, "eta-threshold");
  l->Expect(continuity, "inversion-branch-continuity");
}

void CostProperties(Ledger* l) {
  const ChannelModel ch = RayleighQpskChannel(0.05);
  bool identities = true;
  for (int n = 0; n <= 20; n += 4) {
    for (int i = 0; i < ch.size(); i += 11) {
      const double hbar = ch.alphabet()[i];
      for (double p : {0.3, 2.0, 7.0}) {
        const CostBreakdown c = CostConstant(ch, n, hbar, p);
        const double sensing =
            RequiresCsi(ch, PowerRule::kConstant, hbar) ? ch.P_S() : 0.0;
        identities = identities &&
                     std::abs(c.total * (1.0 + n * c.eta) -
                              (sensing + p * TailProb(ch, hbar))) <= 1e-12 &&
                     c.total == c.sensing_part + c.transmit_part;
        const CostBreakdown v = CostInversion(ch, n, hbar, 4.0 * p);
        identities =
            identities &&
            std::abs(v.total * (1.0 + n * v.eta) -
                     (ch.P_S() + InversionTransmitNumerator(ch, hbar, 4.0 * p))) <=
                1e-12;
      }
    }
  }
  l->Expect(identities, "cost-identities");
  bool tau = true;
  for (int n = 0; n <= 30; n += 3) {
    for (double eta : {0.05, 0.4, 0.95}) {
      const TauDistribution d = TauStationary(n, eta);
      tau = tau && std::abs(n * d.pr_each_low + d.pr_active - 1.0) <= 1e-12;
    }
  }
  l->Expect(tau, "tau-stationary-sums-to-one");
}

void BracketProperties(Ledger* l) {
  const ChannelModel ch = RayleighQpskChannel();
  const RateTarget rt = RobotArmRates(0.999);
  bool power = true, gain = true;
  for (int n = 0; n <= 10; ++n) {
    const double eta = *RequiredEta(n, rt);
    for (int i = 0; i < ch.size(); i += 3) {
      const double hbar = ch.alphabet()[i];
      if (const auto p = MinPower(ch, rt, n, hbar)) {
        const double step = 1e-6 * ch.P_max();
        power = power && EtaConstant(ch, hbar, *p) >= eta &&
                (*p < step || EtaConstant(ch, hbar, *p - step) < eta);
      } else {
        power = power && EtaConstant(ch, hbar, ch.P_max()) < eta;
      }
      if (const auto k = MinGain(ch, rt, n, hbar)) {
        const double step = 1e-6 * std::max(1.0, *k);
        gain = gain && EtaInversion(ch, hbar, *k) >= eta &&
               (*k <= step || EtaInversion(ch, hbar, *k - step) < eta);
      }
    }
  }
  l->Expect(power, "p-lower-bracket");
  l->Expect(gain, "kappa-lower-bracket");
}

void DominanceProperties(Ledger* l) {
  const ChannelModel ch = RayleighQpskChannel();
  const RateTarget rt = RobotArmRates(0.999);
  auto dominates = [](const std::optional<OptimizationOutcome>& g,
                      const std::optional<OptimizationOutcome>& s) {
    if (!s) return true;
    return g && g->cost.total <= s->cost.total * (1.0 + 1e-4);
  };
  const auto gc = SolveGeneral(ch, rt, PowerRule::kConstant);
  const auto gi = SolveGeneral(ch, rt, PowerRule::kInversion);
  l->Expect(dominates(gc, SolvePureChannel(ch, rt, PowerRule::kConstant)),
            "general>=pure-channel-constant");
  l->Expect(dominates(gc, SolvePureTime(ch, rt)), "general>=pure-time");
  l->Expect(dominates(gc, SolveEpsLoss(ch, rt, 0.01)), "general>=eps-loss");
  l->Expect(dominates(gi, SolvePureChannel(ch, rt, PowerRule::kInversion)),
            "general>=pure-channel-inversion");
  l->Expect(dominates(gi, SolveUnsaturatedInversion(ch, rt)),
            "general>=unsaturated");
  l->Expect(gc && gc->verification.pass && gi && gi->verification.pass,
            "general-verified");
}

void DeterminismProperty(Ledger* l) {
  const ChannelModel ch = RayleighQpskChannel(0.02);
  const RateTarget rt = RobotArmRates(0.999);
  const ThresholdPolicy policy =
      ThresholdPolicy::Inversion(2, 0.8, 1.2 * *MinGain(ch, rt, 2, 0.8));
  const LyapunovCertificate cert = RobotArmCertificate();
  SimConfig cfg;
  cfg.horizon = 500;
  cfg.trials = 1000;
  cfg.seed = 99;
  cfg.record_v_every = 7;
  cfg.target = rt;
  const char* saved = std::getenv("WNCS_THREADS");
  const std::string restore = saved ? saved : "";
  std::vector<SimResult> runs;
  for (const char* threads : {"1", "3", "1"}) {
    setenv("WNCS_THREADS", threads, 1);
    runs.push_back(Simulate(RobotArm(), &cert, ch, policy, cfg));
  }
  if (saved) setenv("WNCS_THREADS", restore.c_str(), 1);
  else unsetenv("WNCS_THREADS");
  bool same = true;
  for (size_t k = 1; k < runs.size(); ++k) {
    same = same && runs[k].v_mean == runs[0].v_mean &&
           runs[k].v_sem == runs[0].v_sem &&
           runs[k].tau_histogram == runs[0].tau_histogram &&
           runs[k].empirical_cost == runs[0].empirical_cost &&
           runs[k].success_count == runs[0].success_count;
  }
  l->Expect(same, "simulator-bit-identical");
}

void HittingProperty(Ledger* l, std::string* detail) {
  const ChannelModel ch = RayleighQpskChannel();
  std::vector<ThresholdPolicy> policies;
  const double mus[3] = {0.99, 0.995, 0.999};
  for (double mu : mus) {
    policies.push_back(SolveUnsaturatedInversion(ch, RobotArmRates(mu))->policy);
  }
  SimConfig cfg;
  cfg.horizon = 4000;
  cfg.trials = 1000;
  cfg.seed = 0;
  cfg.record_v_every = cfg.horizon;
  const auto rows =
      HittingTimeExperiment(RobotArm(), ch, policies, 1e-6, cfg, true);
  bool ordered = true, complete = true, cheaper = true;
  for (size_t i = 0; i < rows.size(); ++i) {
    complete = complete && rows[i].censored == 0;
    if (i + 1 < policies.size()) {
      ordered = ordered &&
                rows[i].mean_hitting_time <= rows[i + 1].mean_hitting_time;
      cheaper = cheaper && rows[i + 1].mean_cost < rows[i].mean_cost;
    }
  }
  const HittingRow& base = rows.back();
  ordered = ordered && base.mean_hitting_time <= rows[0].mean_hitting_time;
  l->Expect(ordered, "hitting-time-ordered-in-mu");
  l->Expect(cheaper, "hitting-cost-ordered-in-mu");
  l->Expect(complete, "hitting-no-censoring");
  *detail = Format(" (hitting: baseline %.1f; mu 0.99 %.1f, 0.995 %.1f, "
                   "0.999 %.1f)",
                   base.mean_hitting_time, rows[0].mean_hitting_time,
                   rows[1].mean_hitting_time, rows[2].mean_hitting_time);
}

// Property suites.
Outcome Criterion9() {
  Ledger l;
  BetaProperties(&l);
  ChannelProperties(&l);
  CostProperties(&l);
  BracketProperties(&l);
  DominanceProperties(&l);
  DeterminismProperty(&l);
  std::string hitting;
  HittingProperty(&l, &hitting);
  Outcome o = l.Result();
  o.detail += hitting;
  return o;
}

struct Entry {
  int id;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace wncs

int main(int argc, char** argv) {
  using namespace wncs;
  const std::vector<Entry> entries = {
      {1, 1.0, Criterion1},   {2, 5.0, Criterion2},   {3, 10.0, Criterion3},
      {4, 10.0, Criterion4},  {5, 30.0, Criterion5},  {6, 120.0, Criterion6},
      {7, 120.0, Criterion7}, {8, 30.0, Criterion8},  {9, 120.0, Criterion9}};

  CLI::App app{"Acceptance criteria; prints one PASS/FAIL line each",
               "wncs_acceptance"};
  std::vector<int> selected;
  app.add_option("criteria", selected, "Criterion ids 1..9 (default all)")
      ->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (const Entry& e : entries) selected.push_back(e.id);
  }

  bool all = true;
  for (int id : selected) {
    const Entry& e = entries[id - 1];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    const bool in_time = secs < e.limit_seconds;
    const bool pass = o.pass && in_time;
    all = all && pass;
    std::printf("criterion %d: %s [%.2f s / %.0f s] %s%s\n", id,
                pass ? "PASS" : "FAIL", secs, e.limit_seconds,
                o.detail.c_str(), in_time ? "" : " (time limit exceeded)");
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
