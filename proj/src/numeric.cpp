#include "splitring/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace splitring {

ScalarOptimum golden_section_max(const std::function<double(double)>& f, double lo,
                                 double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    // Stop once the bracket cannot shrink further in floating point.
    if (c >= d) break;
  }
  // Compare against the bracket ends too: the optimum may sit on a bound.
  ScalarOptimum best{c, fc};
  if (fd > best.value) best = {d, fd};
  for (double x : {a, b}) {
    const double fx = f(x);
    if (fx > best.value) best = {x, fx};
  }
  return best;
}

namespace {

double reflect_into(double x, double lo, double hi) {
  if (x < lo) x = lo + (lo - x);
  if (x > hi) x = hi - (x - hi);
  return std::clamp(x, lo, hi);
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start, const std::vector<double>& lower,
                          const std::vector<double>& upper, const SimplexOptions& options) {
  const std::size_t n = start.size();
  auto bound = [&](std::vector<double> x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = reflect_into(x[i], lower[i], upper[i]);
    return x;
  };

  std::vector<std::vector<double>> pts(n + 1, bound(start));
  for (std::size_t i = 0; i < n; ++i) {
    const double width = upper[i] - lower[i];
    double step = options.initial_step * width;
    if (pts[0][i] + step > upper[i]) step = -step;
    pts[i + 1][i] += step;
    pts[i + 1] = bound(pts[i + 1]);
  }
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  std::vector<std::size_t> order(n + 1);
  SimplexResult result;
  std::size_t stalled = 0;
  double prev_best = std::numeric_limits<double>::infinity();

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    result.iterations = iter;

    const double change = prev_best - vals[best];
    const double scale = std::abs(vals[best]);
    if (std::isfinite(prev_best) &&
        change <= options.relative_tol * scale + options.absolute_tol &&
        vals[worst] - vals[best] <= options.relative_tol * scale + options.absolute_tol) {
      if (++stalled >= options.stall_window) {
        result.converged = true;
        break;
      }
    } else {
      stalled = 0;
    }
    prev_best = vals[best];

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const auto& p = pts[order[k]];
      for (std::size_t i = 0; i < n; ++i) centroid[i] += p[i] / static_cast<double>(n);
    }
    auto along = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = centroid[i] + coef * (pts[worst][i] - centroid[i]);
      }
      return bound(std::move(x));
    };

    const auto xr = along(-1.0);
    const double fr = f(xr);
    if (fr < vals[best]) {
      const auto xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const auto xc = along(outside ? -0.5 : 0.5);
    const double fc = f(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == best) continue;
      for (std::size_t i = 0; i < n; ++i) {
        pts[k][i] = pts[best][i] + 0.5 * (pts[k][i] - pts[best][i]);
      }
      vals[k] = f(pts[k]);
    }
  }

  const auto it = std::min_element(vals.begin(), vals.end());
  result.x = pts[static_cast<std::size_t>(it - vals.begin())];
  result.value = *it;
  return result;
}

}  // namespace splitring
