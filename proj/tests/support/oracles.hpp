#pragma once

// Reference computations used only by the tests. Each one is written
// independently of the library code it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace essk::testing {

namespace detail {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature on [a, b], started from `panels` equal
// subintervals so a narrow peak cannot slip between the first samples.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int panels = 32, int max_depth = 50) {
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h, hi = k + 1 == panels ? b : lo + h;
    const double flo = f(lo), fhi = f(hi), fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += detail::simpson_step(f, lo, hi, flo, fm, fhi, whole, tol / panels, max_depth);
  }
  return total;
}

// Posterior mean of a scalar parameter on (a, b) by quadrature of
// exp(log_prior + log_lik - shift). `shift` keeps the integrand in range.
inline double quadrature_posterior_mean(const std::function<double(double)>& log_unnormalized,
                                        double a, double b, int panels = 64) {
  // Locate the mode on a coarse grid so the exponent is centred.
  double shift = -INFINITY;
  for (int i = 1; i < 2000; ++i) {
    shift = std::max(shift, log_unnormalized(a + (b - a) * i / 2000.0));
  }
  auto density = [&](double t) {
    const double v = log_unnormalized(t);
    return std::isfinite(v) ? std::exp(v - shift) : 0.0;
  };
  double num = 0.0, den = 0.0;
  const double h = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h, hi = lo + h;
    den += integrate(density, lo, hi, 1e-13, 1);
    num += integrate([&](double t) { return t * density(t); }, lo, hi, 1e-13, 1);
  }
  return num / den;
}

// Recursive Cox-de Boor definition of the i-th B-spline of order k
// (degree k - 1), right-continuous, with the last basis closed at the right
// end of the knot vector.
inline double cox_de_boor(const std::vector<double>& t, int i, int k, double x) {
  if (k == 1) {
    const bool last = t[i + 1] == t.back() && t[i] < t[i + 1];
    if (last) return (x >= t[i] && x <= t[i + 1]) ? 1.0 : 0.0;
    return (x >= t[i] && x < t[i + 1]) ? 1.0 : 0.0;
  }
  double out = 0.0;
  if (t[i + k - 1] > t[i]) out += (x - t[i]) / (t[i + k - 1] - t[i]) * cox_de_boor(t, i, k - 1, x);
  if (t[i + k] > t[i + 1]) {
    out += (t[i + k] - x) / (t[i + k] - t[i + 1]) * cox_de_boor(t, i + 1, k - 1, x);
  }
  return out;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

inline double mean(const Eigen::VectorXd& v) { return v.mean(); }

inline double variance(const Eigen::VectorXd& v) {
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

// Ordinary least-squares straight-line fit, evaluated at x.
inline Eigen::VectorXd ols_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double mx = x.mean(), my = y.mean();
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  const double sxx = (x.array() - mx).square().sum();
  const double slope = sxy / sxx;
  return (my + slope * (x.array() - mx)).matrix();
}

}  // namespace essk::testing
