#pragma once

// Bracketing helpers shared by the analytic modules. Every transcendental
// root is located by a sign scan over a grid followed by bisection.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace aloha::detail {

inline constexpr std::size_t kScanPoints = 1024;
inline constexpr double kRootTolerance = 1e-12;

struct Bracket {
  double lo;
  double hi;
  double f_lo;
  double f_hi;
};

struct ScanResult {
  std::vector<Bracket> brackets;
  std::string pattern;  // run-length sign pattern, e.g. "-x511 +x513"
};

inline char sign_char(double v) { return v > 0.0 ? '+' : (v < 0.0 ? '-' : '0'); }

/// Evaluates f on an increasing grid and records every sign change.
template <typename F>
ScanResult sign_scan(F&& f, std::span<const double> grid) {
  ScanResult out;
  if (grid.empty()) return out;
  double prev_x = grid[0];
  double prev_f = f(prev_x);
  char run = sign_char(prev_f);
  std::size_t run_len = 1;
  auto flush = [&] {
    if (!out.pattern.empty()) out.pattern += ' ';
    out.pattern += run;
    out.pattern += 'x';
    out.pattern += std::to_string(run_len);
  };
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double x = grid[i];
    const double fx = f(x);
    const char s = sign_char(fx);
    if (s == run) {
      ++run_len;
    } else {
      flush();
      run = s;
      run_len = 1;
    }
    const bool change = (prev_f < 0.0 && fx >= 0.0) || (prev_f > 0.0 && fx <= 0.0);
    if (change) out.brackets.push_back({prev_x, x, prev_f, fx});
    prev_x = x;
    prev_f = fx;
  }
  flush();
  return out;
}

/// Bisection on a sign-changing bracket until its width is below
/// tol * max(1, |x|).
template <typename F>
double bisect(F&& f, Bracket b, double tol = kRootTolerance) {
  if (b.f_lo == 0.0) return b.lo;
  if (b.f_hi == 0.0) return b.hi;
  double lo = b.lo;
  double hi = b.hi;
  double f_lo = b.f_lo;
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol * std::max(1.0, std::abs(mid)) || mid == lo || mid == hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline std::vector<double> linspace(double a, double b, std::size_t count) {
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = a;
    return v;
  }
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  v.back() = b;
  return v;
}

}  // namespace aloha::detail
