#include "wncs/optimizer.h"

#include <algorithm>
#include <cmath>

#include "wncs/error.h"
#include "wncs/search.h"

namespace wncs {

std::string ModeName(OptimizationMode mode) {
  switch (mode) {
    case OptimizationMode::kPureChannel:
      return "pure-channel";
    case OptimizationMode::kPureTime:
      return "pure-time";
    case OptimizationMode::kEpsLoss:
      return "eps-loss";
    case OptimizationMode::kUnsaturatedInversion:
      return "unsaturated";
    case OptimizationMode::kGeneralGrid:
      return "general";
  }
  return "unknown";
}

bool BetterCandidate(double cost_a, const ThresholdPolicy& a, double cost_b,
                     const ThresholdPolicy& b) {
  if (cost_a != cost_b) return cost_a < cost_b;
  if (a.n != b.n) return a.n < b.n;
  if (a.hbar != b.hbar) return a.hbar < b.hbar;
  return a.power < b.power;
}

namespace {

constexpr double kVerifySlack = 1e-9;

class Incumbent {
 public:
  Incumbent(const RateTarget& rt, OptimizationMode mode)
      : rt_(rt), mode_(mode) {}

  /// Returns false when the candidate fails the stability check.
  bool Offer(const ThresholdPolicy& policy, const CostBreakdown& cost,
             double true_eta) {
    ++examined_;
    PolicyVerification v;
    v.eta = true_eta;
    v.beta = Beta(policy.n, true_eta, rt_);
    v.pass = v.beta <= rt_.mu() + kVerifySlack;
    if (!v.pass) return false;
    if (!found_ ||
        BetterCandidate(cost.total, policy, best_.cost.total, best_.policy)) {
      best_ = OptimizationOutcome{policy, cost, mode_, 0, v};
      found_ = true;
    }
    return true;
  }

  std::optional<OptimizationOutcome> Result() const {
    if (!found_) return std::nullopt;
    OptimizationOutcome out = best_;
    out.candidates_examined = examined_;
    return out;
  }

 private:
  const RateTarget& rt_;
  OptimizationMode mode_;
  OptimizationOutcome best_;
  bool found_{false};
  int examined_{0};
};

std::vector<int> HorizonValues(const RateTarget& rt, const SearchSpace& space) {
  const int N = MaxHorizon(rt);
  std::vector<int> ns;
  if (space.n) {
    if (*space.n < 0) throw InputError("SearchSpace: n must be nonnegative");
    if (*space.n <= N) ns.push_back(*space.n);
    return ns;
  }
  for (int n = 0; n <= N; ++n) ns.push_back(n);
  return ns;
}

std::vector<double> ThresholdValues(const ChannelModel& ch,
                                    const SearchSpace& space) {
  if (space.hbar) return {*space.hbar};
  return ch.alphabet();
}

void Record(std::vector<SweepPoint>* sweep, const SweepPoint& point) {
  if (sweep) sweep->push_back(point);
}

}  // namespace

std::optional<OptimizationOutcome> SolvePureChannel(
    const ChannelModel& ch, const RateTarget& rt, PowerRule rule,
    std::vector<SweepPoint>* sweep) {
  Incumbent best(rt, OptimizationMode::kPureChannel);
  for (double hbar : ch.alphabet()) {
    SweepPoint point{0, hbar};
    if (rule == PowerRule::kConstant) {
      const auto p = MinPower(ch, rt, 0, hbar);
      if (p) {
        const CostBreakdown c = CostConstant(ch, 0, hbar, *p);
        point.feasible = best.Offer(ThresholdPolicy::Constant(ch, 0, hbar, *p),
                                    c, c.eta);
        point.lower = point.power = *p;
        point.cost = c.total;
      }
    } else {
      const auto k = MinGain(ch, rt, 0, hbar);
      if (k) {
        const CostBreakdown c = CostInversion(ch, 0, hbar, *k);
        point.feasible =
            best.Offer(ThresholdPolicy::Inversion(0, hbar, *k), c, c.eta);
        point.lower = point.power = *k;
        point.cost = c.total;
      }
    }
    Record(sweep, point);
  }
  return best.Result();
}

std::optional<OptimizationOutcome> SolvePureTime(
    const ChannelModel& ch, const RateTarget& rt,
    std::vector<SweepPoint>* sweep, const SearchSpace& space) {
  Incumbent best(rt, OptimizationMode::kPureTime);
  const double p_max = ch.P_max();
  const double eta_cap = EtaConstant(ch, 0.0, p_max);
  for (int n : HorizonValues(rt, space)) {
    SweepPoint point{n, 0.0};
    const auto eta = RequiredEta(n, rt);
    if (!eta || eta_cap < *eta) {
      Record(sweep, point);
      continue;
    }
    const double lower = *MinPowerForEta(ch, 0.0, *eta);
    std::vector<double> candidates{lower, p_max};
    if (n > 0) {
      const auto local = LocalMinimumFromRight(
          [&](double p) { return CostPureTimeDerivative(ch, n, p); }, lower,
          p_max, 1e-8 * p_max);
      if (local) candidates.push_back(*local);
    }
    point.lower = lower;
    point.cost = std::numeric_limits<double>::infinity();
    for (double p : candidates) {
      const CostBreakdown c = CostConstant(ch, n, 0.0, p);
      if (best.Offer(ThresholdPolicy::Constant(ch, n, 0.0, p), c, c.eta)) {
        point.feasible = true;
        if (c.total < point.cost) {
          point.cost = c.total;
          point.power = p;
        }
      }
    }
    Record(sweep, point);
  }
  return best.Result();
}

std::optional<OptimizationOutcome> SolveEpsLoss(
    const ChannelModel& ch, const RateTarget& rt, double epsilon,
    std::vector<SweepPoint>* sweep, const SearchSpace& space) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw InputError("SolveEpsLoss: epsilon must lie in (0, 0.5)");
  }
  Incumbent best(rt, OptimizationMode::kEpsLoss);
  const double target = 1.0 - epsilon;
  const double p_max = ch.P_max();
  for (int n : HorizonValues(rt, space)) {
    for (double hbar : ThresholdValues(ch, space)) {
      SweepPoint point{n, hbar};
      const double tail = TailProb(ch, hbar);
      const double eta_assumed = tail * target;
      if (!(hbar > 0.0) || Beta(n, eta_assumed, rt) > rt.mu() ||
          ch.psi()(hbar * p_max) < target) {
        Record(sweep, point);
        continue;
      }
      const double p = BisectFirstTrue(
          [&](double x) { return ch.psi()(hbar * x) >= target; }, 0.0, p_max,
          1e-12 * p_max);
      const ThresholdPolicy policy = ThresholdPolicy::Constant(ch, n, hbar, p);
      CostBreakdown c;
      c.eta = eta_assumed;
      c.pr_active = 1.0 / (1.0 + n * eta_assumed);
      c.sensing_part = (policy.requires_csi ? ch.P_S() : 0.0) * c.pr_active;
      c.transmit_part = p * tail * c.pr_active;
      c.total = c.sensing_part + c.transmit_part;
      point.feasible = best.Offer(policy, c, EtaConstant(ch, hbar, p));
      point.lower = point.power = p;
      point.cost = c.total;
      Record(sweep, point);
    }
  }
  return best.Result();
}

std::optional<OptimizationOutcome> SolveUnsaturatedInversion(
    const ChannelModel& ch, const RateTarget& rt,
    std::vector<SweepPoint>* sweep, const SearchSpace& space) {
  Incumbent best(rt, OptimizationMode::kUnsaturatedInversion);
  for (int n : HorizonValues(rt, space)) {
    for (double hbar : ThresholdValues(ch, space)) {
      SweepPoint point{n, hbar};
      const auto lower = hbar > 0.0 ? MinGain(ch, rt, n, hbar) : std::nullopt;
      const double upper = ch.P_max() * hbar;
      if (!lower || *lower > upper) {
        Record(sweep, point);
        continue;
      }
      const double tail = TailProb(ch, hbar);
      const double moment = InverseGainMoment(ch, hbar);
      auto derivative = [&](double k) {
        const double d = 1.0 + n * tail * ch.psi()(k);
        return (moment * d -
                (ch.P_S() + k * moment) * n * tail * ch.psi().Derivative(k)) /
               (d * d);
      };
      std::vector<double> candidates{*lower, upper};
      if (n > 0) {
        const auto local = LocalMinimumFromRight(derivative, *lower, upper,
                                                 1e-8 * std::max(1.0, upper));
        if (local) candidates.push_back(*local);
      }
      point.lower = *lower;
      point.cost = std::numeric_limits<double>::infinity();
      for (double k : candidates) {
        const CostBreakdown c = CostInversion(ch, n, hbar, k);
        if (best.Offer(ThresholdPolicy::Inversion(n, hbar, k), c, c.eta)) {
          point.feasible = true;
          if (c.total < point.cost) {
            point.cost = c.total;
            point.power = k;
          }
        }
      }
      Record(sweep, point);
    }
  }
  return best.Result();
}

std::optional<OptimizationOutcome> SolveGeneral(
    const ChannelModel& ch, const RateTarget& rt, PowerRule rule,
    int resolution, std::vector<SweepPoint>* sweep, const SearchSpace& space) {
  if (resolution < 16) {
    throw InputError("SolveGeneral: resolution must be at least 16");
  }
  Incumbent best(rt, OptimizationMode::kGeneralGrid);
  const bool constant = rule == PowerRule::kConstant;
  const double upper =
      constant ? ch.P_max() : ch.P_max() * ch.alphabet().back();
  for (int n : HorizonValues(rt, space)) {
    for (double hbar : ThresholdValues(ch, space)) {
      SweepPoint point{n, hbar};
      const auto lower =
          constant ? MinPower(ch, rt, n, hbar) : MinGain(ch, rt, n, hbar);
      if (!lower) {
        Record(sweep, point);
        continue;
      }
      auto policy_at = [&](double x) {
        return constant ? ThresholdPolicy::Constant(ch, n, hbar, x)
                        : ThresholdPolicy::Inversion(n, hbar, x);
      };
      auto cost_at = [&](double x) {
        return constant ? CostConstant(ch, n, hbar, x)
                        : CostInversion(ch, n, hbar, x);
      };
      point.lower = *lower;
      point.cost = std::numeric_limits<double>::infinity();
      auto offer = [&](double x) {
        const CostBreakdown c = cost_at(x);
        if (best.Offer(policy_at(x), c, c.eta)) {
          point.feasible = true;
          if (c.total < point.cost) {
            point.cost = c.total;
            point.power = x;
          }
        }
        return c.total;
      };

      const double lo = *lower;
      if (!(upper > lo)) {
        offer(lo);
        Record(sweep, point);
        continue;
      }
      std::vector<double> grid(resolution);
      const double ratio = lo > 0.0 ? upper / lo : 0.0;
      for (int i = 0; i < resolution; ++i) {
        const double t = static_cast<double>(i) / (resolution - 1);
        grid[i] = lo > 0.0 ? lo * std::pow(ratio, t) : upper * t;
      }
      grid.front() = lo;
      grid.back() = upper;
      int arg = 0;
      double fbest = std::numeric_limits<double>::infinity();
      for (int i = 0; i < resolution; ++i) {
        const double f = offer(grid[i]);
        if (f < fbest) {
          fbest = f;
          arg = i;
        }
      }
      const double a = grid[std::max(arg - 1, 0)];
      const double b = grid[std::min(arg + 1, resolution - 1)];
      const ScalarMinimum refined = GoldenSection(
          [&](double x) { return cost_at(x).total; }, a, b,
          1e-10 * std::max(1.0, b));
      offer(refined.x);
      Record(sweep, point);
    }
  }
  return best.Result();
}

}  // namespace wncs
