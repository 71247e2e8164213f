#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace wncs {

/// Packet success probability ψ(γ) as a function of power × gain.
class SuccessFunction {
 public:
  enum class Kind { kQpskAwgn, kExpError, kCustom };

  /// ψ(γ) = (0.5 + 0.5 erf(√γ))^bits.
  static SuccessFunction QpskAwgn(int bits);
  /// ψ(γ) = exp(-1/γ), ψ(0) = 0.
  static SuccessFunction ExpError();
  /// Any nondecreasing map into [0, 1]. Without `derivative` a central
  /// difference with step 1e-6 max(1, γ) is used.
  static SuccessFunction Custom(std::function<double(double)> eval,
                                std::function<double(double)> derivative = {});

  Kind kind() const { return kind_; }
  int bits() const { return bits_; }

  double operator()(double gamma) const;
  double Derivative(double gamma) const;

 private:
  SuccessFunction() = default;
  Kind kind_{Kind::kCustom};
  int bits_{0};
  std::function<double(double)> eval_;
  std::function<double(double)> derivative_;
};

struct RayleighGrid {
  double min{0.0};
  double step{0.05};
  double max{5.0};
};

/// Finite channel-measurement alphabet with pmf, success function, sensing
/// cost P_S and power cap P_max.
class ChannelModel {
 public:
  ChannelModel(std::vector<double> alphabet, std::vector<double> pmf,
               SuccessFunction psi, double P_S, double P_max);

  const std::vector<double>& alphabet() const { return alphabet_; }
  const std::vector<double>& pmf() const { return pmf_; }
  const SuccessFunction& psi() const { return psi_; }
  double P_S() const { return P_S_; }
  double P_max() const { return P_max_; }
  int size() const { return static_cast<int>(alphabet_.size()); }

  ChannelModel WithSensingPower(double P_S) const;
  ChannelModel WithMaxPower(double P_max) const;

 private:
  std::vector<double> alphabet_;
  std::vector<double> pmf_;
  SuccessFunction psi_;
  double P_S_;
  double P_max_;
};

/// Rayleigh fading gains quantized onto min, min + step, ..., max. The top
/// point absorbs the upper tail and the first point the mass below min.
ChannelModel QuantizedRayleigh(double sigma2, const RayleighGrid& grid,
                               SuccessFunction psi, double P_S, double P_max);

/// Single gain h with probability one.
ChannelModel SinglePointChannel(double h, SuccessFunction psi, double P_S,
                                double P_max);

/// h ≥ threshold and h ≤ threshold up to a relative slack of 1e-9.
bool AtLeast(double h, double threshold);
bool AtMost(double h, double threshold);

/// Pr(h ≥ hbar).
double TailProb(const ChannelModel& ch, double hbar);

/// η_C(hbar, p) = Σ_{h ≥ hbar} ψ(p h) ρ(h).
double EtaConstant(const ChannelModel& ch, double hbar, double p);

/// d η_C / d p.
double EtaConstantDerivative(const ChannelModel& ch, double hbar, double p);

/// Success probability under channel inversion with gain kappa.
double EtaInversion(const ChannelModel& ch, double hbar, double kappa);

/// Transmit power of the inversion rule at gain h: min{P_max, κ/h}.
double InversionPower(const ChannelModel& ch, double h, double kappa);

}  // namespace wncs
