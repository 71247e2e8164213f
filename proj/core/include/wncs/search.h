#pragma once

#include <functional>
#include <optional>

namespace wncs {

/// Smallest x in [lo, hi] with pred(x) true, for pred monotone false → true
/// and pred(hi) true. Stops once the bracket is narrower than tol and
/// returns its upper end.
double BisectFirstTrue(const std::function<bool(double)>& pred, double lo,
                       double hi, double tol);

struct ScalarMinimum {
  double x{0.0};
  double f{0.0};
};

/// Golden-section minimization on [lo, hi] down to a bracket width of tol.
ScalarMinimum GoldenSection(const std::function<double(double)>& f, double lo,
                            double hi, double tol);

/// Local minimum reached by descending from hi towards lo: probes leftwards
/// until the derivative turns nonpositive, then bisects on its sign. Returns
/// nullopt when the derivative at hi is nonpositive or no sign change exists
/// inside (lo, hi).
std::optional<double> LocalMinimumFromRight(
    const std::function<double(double)>& derivative, double lo, double hi,
    double tol, int probes = 512);

}  // namespace wncs
