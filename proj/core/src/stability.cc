#include "wncs/stability.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wncs/error.h"
#include "wncs/search.h"

namespace wncs {

RateTarget::RateTarget(double mu, double a_S, double a_U)
    : mu_(mu), a_S_(a_S), a_U_(a_U) {
  if (!(a_S >= 0.0 && a_S < 1.0)) {
    throw InputError("RateTarget: a_S must lie in [0, 1)");
  }
  if (!(a_U > a_S) || !std::isfinite(a_U)) {
    throw InputError("RateTarget: a_U must exceed a_S");
  }
  if (!(mu > a_S && mu < std::min(1.0, a_U))) {
    throw InputError("RateTarget: mu must lie in (a_S, min{1, a_U}), got " +
                     std::to_string(mu));
  }
}

double Beta(int n, double eta, const RateTarget& rt) {
  if (n < 0) throw InputError("Beta: n must be nonnegative");
  if (!(eta >= 0.0 && eta <= 1.0)) throw InputError("Beta: eta not in [0, 1]");
  if (eta == 0.0) return rt.a_U();
  if (n == 0 && eta == 1.0) return rt.a_S();
  const double log_s = std::log(rt.a_S());
  const double log_u = std::log(rt.a_U());
  const double num = eta * (log_s + n * log_u) + log_u * (1.0 - eta);
  return std::exp(num / (1.0 + n * eta));
}

std::optional<double> RequiredEta(int n, const RateTarget& rt) {
  if (n < 0) throw InputError("RequiredEta: n must be nonnegative");
  if (rt.a_S() == 0.0) {
    return std::numeric_limits<double>::denorm_min();
  }
  const double mu = rt.mu();
  const double num = std::log1p((mu - rt.a_U()) / rt.a_U());
  const double den = std::log1p((rt.a_S() - mu) / mu) +
                     (n - 1) * std::log1p((rt.a_U() - mu) / mu);
  if (!(den < 0.0)) return std::nullopt;
  const double eta = num / den;
  if (!(eta > 0.0 && eta <= 1.0)) return std::nullopt;
  return eta;
}

int MaxHorizon(const RateTarget& rt) {
  const double log_mu = std::log(rt.mu());
  const double log_s = std::log(rt.a_S());
  const double log_u = std::log(rt.a_U());
  constexpr int kLimit = 100000000;
  int n = 0;
  while (n < kLimit && log_s + (n + 1) * log_u <= (n + 2) * log_mu) ++n;
  if (n == kLimit) throw ResourceError("MaxHorizon: horizon exceeds 1e8");
  return n;
}

std::optional<double> MinPowerForEta(const ChannelModel& ch, double hbar,
                                     double eta) {
  if (eta <= 0.0) return 0.0;
  const double p_max = ch.P_max();
  if (EtaConstant(ch, hbar, p_max) < eta) return std::nullopt;
  return BisectFirstTrue(
      [&](double p) { return EtaConstant(ch, hbar, p) >= eta; }, 0.0, p_max,
      1e-9 * p_max);
}

std::optional<double> MinGainForEta(const ChannelModel& ch, double hbar,
                                    double eta) {
  if (eta <= 0.0) return 0.0;
  const double kappa_sup = ch.P_max() * ch.alphabet().back();
  if (!(kappa_sup > 0.0) || EtaInversion(ch, hbar, kappa_sup) < eta) {
    return std::nullopt;
  }
  double lo = 0.0, hi = std::min(1.0, kappa_sup);
  while (EtaInversion(ch, hbar, hi) < eta) {
    lo = hi;
    hi = std::min(2.0 * hi, kappa_sup);
  }
  return BisectFirstTrue(
      [&](double k) { return EtaInversion(ch, hbar, k) >= eta; }, lo, hi,
      1e-9 * std::max(1.0, hi));
}

std::optional<double> MinPower(const ChannelModel& ch, const RateTarget& rt,
                               int n, double hbar) {
  const auto eta = RequiredEta(n, rt);
  if (!eta) return std::nullopt;
  return MinPowerForEta(ch, hbar, *eta);
}

std::optional<double> MinGain(const ChannelModel& ch, const RateTarget& rt,
                              int n, double hbar) {
  const auto eta = RequiredEta(n, rt);
  if (!eta) return std::nullopt;
  return MinGainForEta(ch, hbar, *eta);
}

PolicyVerification VerifyPolicy(const ChannelModel& ch, const RateTarget& rt,
                                const ThresholdPolicy& policy) {
  PolicyVerification v;
  v.eta = PolicyEta(ch, policy);
  v.beta = Beta(policy.n, v.eta, rt);
  v.pass = v.beta <= rt.mu() + 1e-9;
  return v;
}

FeasibilityWindow ComputeFeasibility(const ChannelModel& ch,
                                     const RateTarget& rt,
                                     const std::vector<double>& hbars) {
  FeasibilityWindow w;
  w.N = MaxHorizon(rt);
  for (int n = 0; n <= w.N; ++n) {
    const auto eta = RequiredEta(n, rt);
    for (double hbar : hbars) {
      FeasibilityRow row;
      row.n = n;
      row.hbar = hbar;
      row.eta_star = eta;
      if (eta) {
        row.p_lower = MinPowerForEta(ch, hbar, *eta);
        row.kappa_lower = MinGainForEta(ch, hbar, *eta);
      }
      w.rows.push_back(row);
    }
  }
  return w;
}

}  // namespace wncs
