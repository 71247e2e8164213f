#pragma once

#include "wncs/channel.h"

namespace wncs {

enum class PowerRule { kConstant, kInversion };

/// Transmit when τ ≥ n + 1 and h ≥ hbar, with constant power p or inversion
/// power min{P_max, κ/h}.
struct ThresholdPolicy {
  int n{0};
  double hbar{0.0};
  PowerRule rule{PowerRule::kConstant};
  /// p for the constant rule, κ for inversion.
  double power{0.0};
  bool requires_csi{true};

  /// Validates p ≤ P_max and derives requires_csi from the alphabet.
  static ThresholdPolicy Constant(const ChannelModel& ch, int n, double hbar,
                                  double p);
  static ThresholdPolicy Inversion(int n, double hbar, double kappa);
};

/// Only a constant rule whose threshold admits every gain can skip sensing.
bool RequiresCsi(const ChannelModel& ch, PowerRule rule, double hbar);

struct CostBreakdown {
  double total{0.0};
  double transmit_part{0.0};
  double sensing_part{0.0};
  double eta{0.0};
  double pr_active{1.0};
};

struct TauDistribution {
  /// Pr(τ = j) for each j in 1..n.
  double pr_each_low{0.0};
  /// Pr(τ ≥ n + 1).
  double pr_active{1.0};
};

TauDistribution TauStationary(int n, double eta);

/// Average power of a constant-power threshold policy.
CostBreakdown CostConstant(const ChannelModel& ch, int n, double hbar,
                           double p);

/// Average power of a channel-inversion threshold policy.
CostBreakdown CostInversion(const ChannelModel& ch, int n, double hbar,
                            double kappa);

/// Expected inversion power Σ_{h ≥ hbar} min{P_max, κ/h} ρ(h).
double InversionTransmitNumerator(const ChannelModel& ch, double hbar,
                                  double kappa);

/// Σ_{h ≥ hbar} ρ(h)/h over positive gains.
double InverseGainMoment(const ChannelModel& ch, double hbar);

/// J_PT(p, n) = p / ((1 - e(p)) n + 1) with e(p) = 1 - η_C(0, p).
double CostPureTime(const ChannelModel& ch, int n, double p);

/// dJ_PT / dp.
double CostPureTimeDerivative(const ChannelModel& ch, int n, double p);

CostBreakdown CostOfPolicy(const ChannelModel& ch,
                           const ThresholdPolicy& policy);

/// Success probability η of a policy's power rule.
double PolicyEta(const ChannelModel& ch, const ThresholdPolicy& policy);

}  // namespace wncs
