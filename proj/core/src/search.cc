#include "wncs/search.h"

#include <cmath>

#include "wncs/error.h"

namespace wncs {

double BisectFirstTrue(const std::function<bool(double)>& pred, double lo,
                       double hi, double tol) {
  if (!(hi >= lo)) throw InputError("BisectFirstTrue: empty bracket");
  if (pred(lo)) return lo;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

ScalarMinimum GoldenSection(const std::function<double(double)>& f, double lo,
                            double hi, double tol) {
  if (!(hi >= lo)) throw InputError("GoldenSection: empty bracket");
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
    if (!(c > a && d < b)) break;
  }
  return fc <= fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
}

std::optional<double> LocalMinimumFromRight(
    const std::function<double(double)>& derivative, double lo, double hi,
    double tol, int probes) {
  if (!(hi > lo)) return std::nullopt;
  if (derivative(hi) <= 0.0) return std::nullopt;
  const double h = (hi - lo) / probes;
  double right = hi;
  for (int k = 1; k < probes; ++k) {
    const double left = hi - k * h;
    if (derivative(left) <= 0.0) {
      const double x = BisectFirstTrue(
          [&](double t) { return derivative(t) > 0.0; }, left, right, tol);
      return x;
    }
    right = left;
  }
  return std::nullopt;
}

}  // namespace wncs
