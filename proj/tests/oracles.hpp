#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 200) {
  double flo = f(lo);
  if (flo * f(hi) > 0.0) throw std::runtime_error("oracle bisect: no sign change");
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// All sign-change roots of f on a uniform grid of `points` over [lo, hi].
inline std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi,
                                      std::size_t points = 20000) {
  std::vector<double> roots;
  double x0 = lo;
  double f0 = f(x0);
  for (std::size_t i = 1; i <= points; ++i) {
    const double x1 = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points);
    const double f1 = f(x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if (f0 * f1 < 0.0) {
      roots.push_back(bisect(f, x0, x1));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

/// Principal branch root of w e^w = z by bisection.
inline double w0(double z) {
  return bisect([z](double w) { return w * std::exp(w) - z; }, -1.0, std::max(1.0, std::log1p(z) + 1.0));
}

/// Minus-one branch root of w e^w = z by bisection on (-800, -1).
inline double wm1(double z) {
  return bisect([z](double w) { return w * std::exp(w) - z; }, -800.0, -1.0);
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double m = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
      b[r] -= m * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Transition matrix of the HOL phase chain with phases 0..K. A phase-i HOL
/// transmits with probability q^i; success (prob. p) returns the chain to
/// phase 0 (next HOL), a collision moves it to min(i+1, K).
inline std::vector<std::vector<double>> phase_chain(double p, double q, int k) {
  const std::size_t size = static_cast<std::size_t>(k) + 1;
  std::vector<std::vector<double>> t(size, std::vector<double>(size, 0.0));
  for (int i = 0; i <= k; ++i) {
    const double tx = std::pow(q, i);
    const int next = std::min(i + 1, k);
    t[i][0] += tx * p;
    t[i][next] += tx * (1.0 - p);
    t[i][i] += 1.0 - tx;
  }
  return t;
}

/// Stationary distribution of a row-stochastic matrix by GTH state
/// reduction, which needs no subtractions and keeps full relative accuracy
/// even for states with tiny exit rates.
inline std::vector<double> gth(std::vector<std::vector<double>> t) {
  const std::size_t size = t.size();
  std::vector<double> exit(size, 0.0);
  for (std::size_t n = size - 1; n > 0; --n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += t[n][j];
    exit[n] = s;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = t[i][n] / s;
      for (std::size_t j = 0; j < n; ++j) t[i][j] += w * t[n][j];
    }
  }
  std::vector<double> pi(size, 0.0);
  pi[0] = 1.0;
  double total = 1.0;
  for (std::size_t j = 1; j < size; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < j; ++i) s += pi[i] * t[i][j];
    pi[j] = s / exit[j];
    total += pi[j];
  }
  for (double& v : pi) v /= total;
  return pi;
}

/// Stationary distribution of phase_chain.
inline std::vector<double> stationary(double p, double q, int k) { return gth(phase_chain(p, q, k)); }

/// Largest root of p = (1 - lambda/p)^(n-1) on (lambda, 1].
inline double finite_n_root(double lambda, int n) {
  auto f = [&](double p) { return p - std::pow(1.0 - lambda / p, n - 1); };
  const auto roots = scan_roots(f, lambda * (1.0 + 1e-9), 1.0, 200000);
  if (roots.empty()) throw std::runtime_error("oracle: no finite-n root");
  return roots.back();
}

/// ln p_A for finite K: root in u = ln p of u + n f_0(p) / p = 0, with f_0
/// from the dense chain solve.
inline double log_undesired_point(int n, double q, int k, double u_lo = -2000.0) {
  auto f = [&](double u) {
    const double p = std::exp(u);
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    return u + n * stationary(p, q, k)[0] / p;
  };
  auto guarded = [&](double u) {
    const double v = f(u);
    return std::isfinite(v) ? v : -1e300;
  };
  const auto roots = scan_roots(guarded, u_lo, -1e-9, 20000);
  if (roots.size() != 1) throw std::runtime_error("oracle: expected one root, got " + std::to_string(roots.size()));
  return roots.front();
}

/// p_A for unbounded K: root of ln p + n (p + q - 1) / (p q) on (1 - q, 1).
inline double undesired_point_unbounded(int n, double q) {
  auto f = [&](double p) { return std::log(p) + n * (p + q - 1.0) / (p * q); };
  return bisect(f, (1.0 - q) * (1.0 + 1e-15), 1.0);
}

}  // namespace oracle
