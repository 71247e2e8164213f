#include "wncs/channel.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wncs/error.h"

namespace wncs {

namespace {

constexpr double kAlphabetSlack = 1e-9;

double Slack(double threshold) {
  return kAlphabetSlack * std::max(1.0, std::abs(threshold));
}

}  // namespace

SuccessFunction SuccessFunction::QpskAwgn(int bits) {
  if (bits < 1) throw InputError("QpskAwgn: bits must be at least 1");
  SuccessFunction f;
  f.kind_ = Kind::kQpskAwgn;
  f.bits_ = bits;
  return f;
}

SuccessFunction SuccessFunction::ExpError() {
  SuccessFunction f;
  f.kind_ = Kind::kExpError;
  return f;
}

SuccessFunction SuccessFunction::Custom(
    std::function<double(double)> eval,
    std::function<double(double)> derivative) {
  if (!eval) throw InputError("Custom success function needs an evaluator");
  SuccessFunction f;
  f.kind_ = Kind::kCustom;
  f.eval_ = std::move(eval);
  f.derivative_ = std::move(derivative);
  return f;
}

double SuccessFunction::operator()(double gamma) const {
  switch (kind_) {
    case Kind::kQpskAwgn: {
      const double g = std::max(gamma, 0.0);
      return std::pow(0.5 + 0.5 * std::erf(std::sqrt(g)), bits_);
    }
    case Kind::kExpError:
      return gamma > 0.0 ? std::exp(-1.0 / gamma) : 0.0;
    case Kind::kCustom:
      return eval_(gamma);
  }
  return 0.0;
}

double SuccessFunction::Derivative(double gamma) const {
  switch (kind_) {
    case Kind::kQpskAwgn: {
      if (gamma <= 0.0) return std::numeric_limits<double>::infinity();
      const double s = std::sqrt(gamma);
      const double base = 0.5 + 0.5 * std::erf(s);
      const double dbase =
          std::exp(-gamma) / (2.0 * std::sqrt(std::numbers::pi) * s);
      return bits_ * std::pow(base, bits_ - 1) * dbase;
    }
    case Kind::kExpError:
      return gamma > 0.0 ? std::exp(-1.0 / gamma) / (gamma * gamma) : 0.0;
    case Kind::kCustom: {
      if (derivative_) return derivative_(gamma);
      const double h = 1e-6 * std::max(1.0, std::abs(gamma));
      return (eval_(gamma + h) - eval_(gamma - h)) / (2.0 * h);
    }
  }
  return 0.0;
}

ChannelModel::ChannelModel(std::vector<double> alphabet,
                           std::vector<double> pmf, SuccessFunction psi,
                           double P_S, double P_max)
    : alphabet_(std::move(alphabet)),
      pmf_(std::move(pmf)),
      psi_(std::move(psi)),
      P_S_(P_S),
      P_max_(P_max) {
  if (alphabet_.empty() || alphabet_.size() != pmf_.size()) {
    throw InputError("ChannelModel: alphabet and pmf must be nonempty and "
                     "of equal length");
  }
  double total = 0.0;
  for (size_t i = 0; i < alphabet_.size(); ++i) {
    if (!(alphabet_[i] >= 0.0) || !std::isfinite(alphabet_[i])) {
      throw InputError("ChannelModel: gains must be finite and nonnegative");
    }
    if (i > 0 && !(alphabet_[i] > alphabet_[i - 1])) {
      throw InputError("ChannelModel: alphabet must be strictly ascending");
    }
    if (!(pmf_[i] >= 0.0) || pmf_[i] > 1.0) {
      throw InputError("ChannelModel: pmf entries must lie in [0, 1]");
    }
    total += pmf_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InputError("ChannelModel: pmf sums to " + std::to_string(total));
  }
  if (!(P_S_ >= 0.0) || !std::isfinite(P_S_)) {
    throw InputError("ChannelModel: P_S must be nonnegative");
  }
  if (!(P_max_ > 0.0) || !std::isfinite(P_max_)) {
    throw InputError("ChannelModel: P_max must be positive");
  }
}

ChannelModel ChannelModel::WithSensingPower(double P_S) const {
  return ChannelModel(alphabet_, pmf_, psi_, P_S, P_max_);
}

ChannelModel ChannelModel::WithMaxPower(double P_max) const {
  return ChannelModel(alphabet_, pmf_, psi_, P_S_, P_max);
}

ChannelModel QuantizedRayleigh(double sigma2, const RayleighGrid& grid,
                               SuccessFunction psi, double P_S,
                               double P_max) {
  if (!(sigma2 > 0.0)) throw InputError("QuantizedRayleigh: sigma2 <= 0");
  if (!(grid.step > 0.0) || !(grid.min >= 0.0) || !(grid.max > grid.min)) {
    throw InputError("QuantizedRayleigh: need step > 0, min >= 0, max > min");
  }
  const double span = (grid.max - grid.min) / grid.step;
  const long intervals = std::lround(span);
  if (std::abs(span - intervals) > 1e-6) {
    throw InputError("QuantizedRayleigh: (max - min) is not a multiple of "
                     "step");
  }
  const double rate = 1.0 / (2.0 * sigma2);
  std::vector<double> h(intervals + 1), rho(intervals + 1);
  for (long i = 0; i <= intervals; ++i) {
    h[i] = grid.min + static_cast<double>(i) * grid.step;
  }
  h.back() = grid.max;
  for (long i = 0; i < intervals; ++i) {
    rho[i] = std::exp(-h[i] * rate) - std::exp(-(h[i] + grid.step) * rate);
  }
  rho.back() = std::exp(-h.back() * rate);
  rho.front() += -std::expm1(-grid.min * rate);
  return ChannelModel(std::move(h), std::move(rho), std::move(psi), P_S,
                      P_max);
}

ChannelModel SinglePointChannel(double h, SuccessFunction psi, double P_S,
                                double P_max) {
  return ChannelModel({h}, {1.0}, std::move(psi), P_S, P_max);
}

bool AtLeast(double h, double threshold) {
  return h >= threshold - Slack(threshold);
}

bool AtMost(double h, double threshold) {
  return h <= threshold + Slack(threshold);
}

double TailProb(const ChannelModel& ch, double hbar) {
  double sum = 0.0;
  for (int i = 0; i < ch.size(); ++i) {
    if (AtLeast(ch.alphabet()[i], hbar)) sum += ch.pmf()[i];
  }
  return sum;
}

double EtaConstant(const ChannelModel& ch, double hbar, double p) {
  if (!(p >= 0.0)) throw InputError("EtaConstant: power must be >= 0");
  if (p > ch.P_max() * (1.0 + 1e-12)) {
    throw InputError("EtaConstant: power " + std::to_string(p) +
                     " exceeds P_max");
  }
  double sum = 0.0;
  for (int i = 0; i < ch.size(); ++i) {
    const double h = ch.alphabet()[i];
    if (AtLeast(h, hbar)) sum += ch.psi()(p * h) * ch.pmf()[i];
  }
  return sum;
}

double EtaConstantDerivative(const ChannelModel& ch, double hbar, double p) {
  double sum = 0.0;
  for (int i = 0; i < ch.size(); ++i) {
    const double h = ch.alphabet()[i];
    if (h > 0.0 && AtLeast(h, hbar)) {
      sum += h * ch.psi().Derivative(p * h) * ch.pmf()[i];
    }
  }
  return sum;
}

double EtaInversion(const ChannelModel& ch, double hbar, double kappa) {
  if (!(kappa >= 0.0)) throw InputError("EtaInversion: kappa must be >= 0");
  const double threshold = kappa / ch.P_max();
  const double psi_kappa = ch.psi()(kappa);
  if (hbar >= threshold) return TailProb(ch, hbar) * psi_kappa;
  double above = 0.0, saturated = 0.0;
  for (int i = 0; i < ch.size(); ++i) {
    const double h = ch.alphabet()[i];
    if (!AtMost(h, threshold)) {
      above += ch.pmf()[i];
    } else if (AtLeast(h, hbar)) {
      saturated += ch.psi()(h * ch.P_max()) * ch.pmf()[i];
    }
  }
  return above * psi_kappa + saturated;
}

double InversionPower(const ChannelModel& ch, double h, double kappa) {
  if (kappa <= 0.0) return 0.0;
  if (h <= 0.0) return ch.P_max();
  return std::min(ch.P_max(), kappa / h);
}

}  // namespace wncs
