#include "wncs/cost.h"

#include <string>

#include "wncs/error.h"

namespace wncs {

bool RequiresCsi(const ChannelModel& ch, PowerRule rule, double hbar) {
  if (rule == PowerRule::kInversion) return true;
  return !AtMost(hbar, ch.alphabet().front());
}

ThresholdPolicy ThresholdPolicy::Constant(const ChannelModel& ch, int n,
                                          double hbar, double p) {
  if (n < 0) throw InputError("ThresholdPolicy: n must be nonnegative");
  if (!(p >= 0.0) || p > ch.P_max()) {
    throw InputError("ThresholdPolicy: constant power must lie in [0, P_max]");
  }
  return ThresholdPolicy{n, hbar, PowerRule::kConstant, p,
                         RequiresCsi(ch, PowerRule::kConstant, hbar)};
}

ThresholdPolicy ThresholdPolicy::Inversion(int n, double hbar, double kappa) {
  if (n < 0) throw InputError("ThresholdPolicy: n must be nonnegative");
  if (!(kappa >= 0.0)) throw InputError("ThresholdPolicy: kappa < 0");
  return ThresholdPolicy{n, hbar, PowerRule::kInversion, kappa, true};
}

TauDistribution TauStationary(int n, double eta) {
  if (n < 0) throw InputError("TauStationary: n must be nonnegative");
  if (!(eta > 0.0 && eta < 1.0)) {
    throw InputError("TauStationary: eta must lie in (0, 1)");
  }
  const double denom = n * eta + 1.0;
  return TauDistribution{eta / denom, 1.0 / denom};
}

namespace {

CostBreakdown Assemble(double sensing_numerator, double transmit_numerator,
                       int n, double eta) {
  CostBreakdown c;
  c.eta = eta;
  const double denom = 1.0 + n * eta;
  c.pr_active = 1.0 / denom;
  c.sensing_part = sensing_numerator / denom;
  c.transmit_part = transmit_numerator / denom;
  c.total = c.sensing_part + c.transmit_part;
  return c;
}

}  // namespace

CostBreakdown CostConstant(const ChannelModel& ch, int n, double hbar,
                           double p) {
  if (n < 0) throw InputError("CostConstant: n must be nonnegative");
  const double eta = EtaConstant(ch, hbar, p);
  const double sensing =
      RequiresCsi(ch, PowerRule::kConstant, hbar) ? ch.P_S() : 0.0;
  return Assemble(sensing, p * TailProb(ch, hbar), n, eta);
}

double InversionTransmitNumerator(const ChannelModel& ch, double hbar,
                                  double kappa) {
  double sum = 0.0;
  for (int i = 0; i < ch.size(); ++i) {
    const double h = ch.alphabet()[i];
    if (AtLeast(h, hbar)) sum += InversionPower(ch, h, kappa) * ch.pmf()[i];
  }
  return sum;
}

double InverseGainMoment(const ChannelModel& ch, double hbar) {
  double sum = 0.0;
  for (int i = 0; i < ch.size(); ++i) {
    const double h = ch.alphabet()[i];
    if (h > 0.0 && AtLeast(h, hbar)) sum += ch.pmf()[i] / h;
  }
  return sum;
}

CostBreakdown CostInversion(const ChannelModel& ch, int n, double hbar,
                            double kappa) {
  if (n < 0) throw InputError("CostInversion: n must be nonnegative");
  if (!(kappa >= 0.0)) throw InputError("CostInversion: kappa < 0");
  const double eta = EtaInversion(ch, hbar, kappa);
  return Assemble(ch.P_S(), InversionTransmitNumerator(ch, hbar, kappa), n,
                  eta);
}

double CostPureTime(const ChannelModel& ch, int n, double p) {
  if (n < 0) throw InputError("CostPureTime: n must be nonnegative");
  return p / (EtaConstant(ch, 0.0, p) * n + 1.0);
}

double CostPureTimeDerivative(const ChannelModel& ch, int n, double p) {
  const double d = EtaConstant(ch, 0.0, p) * n + 1.0;
  return (d - p * n * EtaConstantDerivative(ch, 0.0, p)) / (d * d);
}

CostBreakdown CostOfPolicy(const ChannelModel& ch,
                           const ThresholdPolicy& policy) {
  if (policy.rule == PowerRule::kConstant) {
    return CostConstant(ch, policy.n, policy.hbar, policy.power);
  }
  return CostInversion(ch, policy.n, policy.hbar, policy.power);
}

double PolicyEta(const ChannelModel& ch, const ThresholdPolicy& policy) {
  if (policy.rule == PowerRule::kConstant) {
    return EtaConstant(ch, policy.hbar, policy.power);
  }
  return EtaInversion(ch, policy.hbar, policy.power);
}

}  // namespace wncs
