#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "wncs/channel.h"
#include "wncs/cost.h"
#include "wncs/dynamics.h"
#include "wncs/lyapunov.h"
#include "wncs/stability.h"

namespace wncs {

/// Plant state uniform on the sphere |x_p| = radius, controller state zero
/// and ŷ = g_p(x_p) (t = 0 counts as a delivery).
struct SphereInit {
  double radius{1.0};
};

struct SimConfig {
  int64_t horizon{5000};
  int64_t trials{10000};
  uint64_t seed{0};
  std::variant<VectorXd, SphereInit> initial_state{SphereInit{}};
  int64_t record_v_every{1};
  /// Upper bound on horizon × trials.
  double budget{2e10};
  /// Skip the stability precondition on the policy.
  bool allow_unstable{false};
  /// Enables the policy check and the μ^t reference curve.
  std::optional<RateTarget> target;
  /// Records the first t with |x_p(t)|² ≤ radius.
  std::optional<double> hitting_radius;
  /// Leading trials whose attempts and V trajectory are logged.
  int64_t log_trials{0};
};

struct DeliveryEvent {
  int64_t trial{0};
  int64_t t{0};
  int64_t tau{0};
  double h{0.0};
  double power{0.0};
  bool success{false};
};

struct SimResult {
  int64_t horizon{0};
  int64_t trials{0};
  int n{0};
  std::vector<int64_t> record_times;
  std::vector<double> v_mean;
  std::vector<double> v_sem;
  std::vector<double> v_bound;
  /// Counts for τ = 1..n followed by the bucket τ ≥ n + 1.
  std::vector<int64_t> tau_histogram;
  double empirical_cost{0.0};
  double empirical_transmit{0.0};
  double empirical_sensing{0.0};
  int64_t success_count{0};
  int64_t attempt_count{0};
  int64_t sensing_count{0};
  int64_t diverged_count{0};
  /// -1 marks a trajectory that did not hit within the horizon.
  std::vector<int64_t> hitting_times;
  std::vector<DeliveryEvent> delivery_log;
  /// V(χ(t)) for t = 0..T of each logged trial.
  std::vector<std::vector<double>> v_traces;
};

/// Monte-Carlo run of the closed loop under a threshold policy. Identical
/// seeds give identical results for any WNCS_THREADS.
SimResult Simulate(const ClosedLoopSystem& sys,
                   const LyapunovCertificate* cert, const ChannelModel& ch,
                   const ThresholdPolicy& policy, const SimConfig& cfg);

struct CheckReport {
  bool pass{false};
  double deviation{0.0};
  double tolerance{0.0};
};

/// Histogram against η/(nη+1) per low state and 1/(nη+1) for the active
/// bucket at tolerance 4/√(T·trials).
CheckReport TauHistogramCheck(const SimResult& result, int n, double eta);

struct CostCheckReport {
  bool pass{false};
  double empirical{0.0};
  double predicted{0.0};
  double abs_diff{0.0};
  /// Relative tolerance 3/√trials + 0.01.
  double rel_tolerance{0.0};
  double sensing_diff{0.0};
  double transmit_diff{0.0};
};

CostCheckReport EmpiricalCostCheck(const SimResult& result,
                                   const CostBreakdown& predicted);

struct DecayCheckReport {
  bool pass{false};
  /// max over t of v_mean / (v_bound + 3 v_sem).
  double worst_ratio{0.0};
  int64_t worst_t{0};
};

/// v_mean(t) ≤ μ^t mean V(χ(0)) + 3 SEM(t) at every recorded t.
DecayCheckReport DecayCheck(const SimResult& result);

struct HittingRow {
  ThresholdPolicy policy;
  bool baseline{false};
  double mean_hitting_time{0.0};
  int64_t hits{0};
  int64_t censored{0};
  double mean_cost{0.0};
};

/// Mean steps until |x_p|² ≤ radius from the unit sphere, per policy. The
/// baseline transmits at P_max on every step without sensing.
std::vector<HittingRow> HittingTimeExperiment(
    const ClosedLoopSystem& sys, const ChannelModel& ch,
    const std::vector<ThresholdPolicy>& policies, double radius,
    const SimConfig& cfg, bool include_baseline);

}  // namespace wncs
