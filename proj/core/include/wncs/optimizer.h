#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wncs/channel.h"
#include "wncs/cost.h"
#include "wncs/stability.h"

namespace wncs {

enum class OptimizationMode {
  kPureChannel,
  kPureTime,
  kEpsLoss,
  kUnsaturatedInversion,
  kGeneralGrid
};

std::string ModeName(OptimizationMode mode);

struct OptimizationOutcome {
  ThresholdPolicy policy;
  CostBreakdown cost;
  OptimizationMode mode{OptimizationMode::kGeneralGrid};
  int candidates_examined{0};
  PolicyVerification verification;
};

/// Best candidate of one (n, hbar) cell, kept for plotting.
struct SweepPoint {
  int n{0};
  double hbar{0.0};
  bool feasible{false};
  /// p̲ or κ̲ of the cell.
  double lower{0.0};
  /// Best power or gain found in the cell.
  double power{0.0};
  double cost{0.0};
};

/// Optional restriction of the outer search.
struct SearchSpace {
  std::optional<int> n;
  std::optional<double> hbar;
};

/// n = 0, power at the feasibility boundary, best threshold over the
/// alphabet.
std::optional<OptimizationOutcome> SolvePureChannel(
    const ChannelModel& ch, const RateTarget& rt, PowerRule rule,
    std::vector<SweepPoint>* sweep = nullptr);

/// hbar = 0 and no sensing; power among {p̲_n, local minimum, P_max}.
std::optional<OptimizationOutcome> SolvePureTime(
    const ChannelModel& ch, const RateTarget& rt,
    std::vector<SweepPoint>* sweep = nullptr, const SearchSpace& space = {});

/// Constant power p_ε(hbar) with ψ(hbar p_ε) = 1 - ε for ε in (0, 0.5).
std::optional<OptimizationOutcome> SolveEpsLoss(
    const ChannelModel& ch, const RateTarget& rt, double epsilon,
    std::vector<SweepPoint>* sweep = nullptr, const SearchSpace& space = {});

/// Channel inversion restricted to gains with κ ≤ P_max hbar.
std::optional<OptimizationOutcome> SolveUnsaturatedInversion(
    const ChannelModel& ch, const RateTarget& rt,
    std::vector<SweepPoint>* sweep = nullptr, const SearchSpace& space = {});

/// Exhaustive over (n, hbar) with a geometric power grid and golden-section
/// refinement around the best grid point.
std::optional<OptimizationOutcome> SolveGeneral(
    const ChannelModel& ch, const RateTarget& rt, PowerRule rule,
    int resolution = 64, std::vector<SweepPoint>* sweep = nullptr,
    const SearchSpace& space = {});

/// Lexicographic (cost, n, hbar, power) order.
bool BetterCandidate(double cost_a, const ThresholdPolicy& a, double cost_b,
                     const ThresholdPolicy& b);

}  // namespace wncs
