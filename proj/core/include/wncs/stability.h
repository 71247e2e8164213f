#pragma once

#include <optional>
#include <vector>

#include "wncs/channel.h"
#include "wncs/cost.h"

namespace wncs {

/// Target decay rate μ together with the certificate rates a_S < μ <
/// min{1, a_U}.
class RateTarget {
 public:
  RateTarget(double mu, double a_S, double a_U);

  double mu() const { return mu_; }
  double a_S() const { return a_S_; }
  double a_U() const { return a_U_; }

 private:
  double mu_;
  double a_S_;
  double a_U_;
};

/// β(n, η) = exp((η ln(a_S a_U^n) + (1 - η) ln a_U) / (1 + n η)).
double Beta(int n, double eta, const RateTarget& rt);

/// Smallest η with β(n, η) ≤ μ, or nullopt when it is not in (0, 1].
std::optional<double> RequiredEta(int n, const RateTarget& rt);

/// Largest n with (a_S a_U^n)^{1/(n+1)} ≤ μ.
int MaxHorizon(const RateTarget& rt);

/// Smallest p in [0, P_max] with η_C(hbar, p) ≥ eta.
std::optional<double> MinPowerForEta(const ChannelModel& ch, double hbar,
                                     double eta);
/// Smallest κ ≥ 0 with η_I(hbar, κ) ≥ eta.
std::optional<double> MinGainForEta(const ChannelModel& ch, double hbar,
                                    double eta);

/// p̲(μ, n, hbar).
std::optional<double> MinPower(const ChannelModel& ch, const RateTarget& rt,
                               int n, double hbar);
/// κ̲(μ, n, hbar).
std::optional<double> MinGain(const ChannelModel& ch, const RateTarget& rt,
                              int n, double hbar);

struct PolicyVerification {
  bool pass{false};
  double beta{0.0};
  double eta{0.0};
};

/// β ≤ μ + 1e-9 check for a threshold policy.
PolicyVerification VerifyPolicy(const ChannelModel& ch, const RateTarget& rt,
                                const ThresholdPolicy& policy);

struct FeasibilityRow {
  int n{0};
  double hbar{0.0};
  std::optional<double> eta_star;
  std::optional<double> p_lower;
  std::optional<double> kappa_lower;
  bool feasible() const { return p_lower.has_value() || kappa_lower.has_value(); }
};

struct FeasibilityWindow {
  int N{0};
  std::vector<FeasibilityRow> rows;
};

/// One row per n in 0..N and per requested threshold.
FeasibilityWindow ComputeFeasibility(const ChannelModel& ch,
                                     const RateTarget& rt,
                                     const std::vector<double>& hbars);

}  // namespace wncs
