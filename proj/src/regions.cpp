#include "aloha/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aloha/errors.hpp"
#include "aloha/lambertw.hpp"
#include "roots.hpp"

namespace aloha {
namespace {

constexpr double kInvE = -kMinusInvE;
const double kBelowOne = std::nextafter(1.0, 0.0);

void require_n(int n) {
  if (n < 1) throw std::invalid_argument("node count n must be positive");
}

bool rate_has_equilibrium(double lambda_hat) {
  return lambda_hat >= 0.0 && lambda_hat <= kInvE + kBranchPointTolerance;
}

// Grid over q for region scans: logarithmic at small q, where finite-K
// regions live for large n, linear above.
std::vector<double> q_grid() {
  constexpr std::size_t kHalf = 256;
  std::vector<double> grid;
  grid.reserve(2 * kHalf);
  const double a = std::log(1e-6);
  const double b = std::log(1e-2);
  for (double u : detail::linspace(a, b, kHalf)) grid.push_back(std::exp(u));
  for (double q : detail::linspace(1e-2, 1.0 - 1e-6, kHalf + 1)) {
    if (q > 1e-2) grid.push_back(q);
  }
  return grid;
}

}  // namespace

Interval Interval::make(double lo, double hi) {
  if (!(lo <= hi)) return none();
  return {lo, hi, false};
}

bool Interval::contains(const Interval& other) const {
  if (other.empty) return true;
  if (empty) return false;
  return lo <= other.lo && other.hi <= hi;
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::kAbsoluteStable:
      return "ABSOLUTE_STABLE";
    case Classification::kQuasiStable:
      return "QUASI_STABLE";
    case Classification::kUnstable:
      return "UNSTABLE";
  }
  return "UNKNOWN";
}

std::string to_string(RegionKind k) {
  switch (k) {
    case RegionKind::kAbsolute:
      return "absolute";
    case RegionKind::kQuasi:
      return "quasi";
    case RegionKind::kComplete:
      return "complete";
  }
  return "unknown";
}

// --- bounds ----------------------------------------------------------------

Bound q_upper(int n, double lambda_hat) {
  require_n(n);
  if (lambda_hat == 0.0) return {kBelowOne, true, true};  // -ln p_S diverges
  if (!(lambda_hat > 0.0) || !rate_has_equilibrium(lambda_hat)) return {};
  const double raw = -lambert_wm1(-lambda_hat) / n;
  if (raw >= 1.0) return {kBelowOne, true, true};
  return {raw, true, false};
}

Bound q_lower(int n, double lambda_hat, Cutoff cutoff) {
  require_n(n);
  if (lambda_hat == 0.0) return {0.0, true, false};  // no load for any q
  const auto eq = equilibrium_points(lambda_hat);
  if (!eq.exists) return {};
  const double lambda = lambda_hat / n;
  if (lambda >= 1.0) return {};
  const double p_l = eq.p_large;

  double value = 0.0;
  if (cutoff.is_unbounded()) {
    value = (1.0 - p_l) / (1.0 - lambda);
  } else if (cutoff.value() == 1) {
    value = lambda * (1.0 - p_l) / (p_l * (1.0 - lambda));
  } else {
    // The load at p_L decreases monotonically in q; bracket rho(q) = 1.
    auto excess = [&](double q) { return offered_load(lambda, p_l, q, cutoff) - 1.0; };
    const double hi = 1.0 - 1e-12;
    if (excess(hi) > 0.0) return {};
    double lo = (1.0 - p_l) * 1e-6;
    while (excess(lo) <= 0.0) {
      lo *= 1e-3;
      if (lo < 1e-300) return {lo, true, false};
    }
    std::vector<double> grid;
    grid.reserve(detail::kScanPoints);
    for (double u : detail::linspace(std::log(lo), std::log(hi), detail::kScanPoints)) {
      grid.push_back(std::exp(u));
    }
    grid.front() = lo;
    grid.back() = hi;
    const auto scan = detail::sign_scan(excess, grid);
    if (scan.brackets.empty()) {
      throw BracketingFailure("q_lower: no sign change of rho(q) - 1, scanned " + scan.pattern);
    }
    value = detail::bisect(excess, scan.brackets.front());
  }
  if (!(value < 1.0)) return {};
  return {value, true, false};
}

double q_lower_approx(int n, double lambda_hat, Cutoff cutoff) {
  require_n(n);
  const auto eq = equilibrium_points(lambda_hat);
  if (!eq.exists || lambda_hat <= 0.0) throw DomainError("q_lower_approx: needs 0 < lambda_hat <= 1/e");
  const double p_l = eq.p_large;
  if (cutoff.is_unbounded()) return 1.0 - p_l;
  return (1.0 - p_l) / std::pow(n * p_l / lambda_hat, 1.0 / cutoff.value());
}

// --- regions ---------------------------------------------------------------

Interval absolute_stable_region(int n, double lambda_hat, Cutoff cutoff) {
  const Bound lo = q_lower(n, lambda_hat, cutoff);
  const Bound hi = q_upper(n, lambda_hat);
  if (!lo.defined || !hi.defined) return Interval::none();
  return Interval::make(lo.value, hi.value);
}

Interval quasi_stable_region(int n, double lambda_hat, Cutoff cutoff) {
  require_n(n);
  if (!rate_has_equilibrium(lambda_hat)) return Interval::none();
  if (!cutoff.is_unbounded() && cutoff.value() == 1) return Interval::none();
  if (cutoff.is_unbounded()) {
    const auto eq = equilibrium_points(lambda_hat);
    return Interval::make(1.0 - eq.p_large, std::min(1.0 - eq.p_small, kBelowOne));
  }
  return quasi_stable_region_exact(n, lambda_hat, cutoff);
}

Interval quasi_stable_region_exact(int n, double lambda_hat, Cutoff cutoff) {
  require_n(n);
  if (!rate_has_equilibrium(lambda_hat)) return Interval::none();
  const auto eq = equilibrium_points(lambda_hat);
  const double log_pl = std::log(eq.p_large);
  const double log_ps = eq.p_small > 0.0 ? std::log(eq.p_small)
                                         : -std::numeric_limits<double>::infinity();

  auto log_pa = [&](double q) { return undesired_point(n, q, cutoff).log_p; };
  // Inside the set iff above_large <= 0 and below_small >= 0.
  auto above_large = [&](double q) { return log_pa(q) - log_pl; };
  auto below_small = [&](double q) { return log_pa(q) - log_ps; };

  const auto grid = q_grid();
  std::vector<double> a(grid.size());
  std::vector<char> inside(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    a[i] = log_pa(grid[i]);
    inside[i] = a[i] - log_pl <= 0.0 && a[i] - log_ps >= 0.0;
  }
  const auto first = std::find(inside.begin(), inside.end(), 1);
  if (first == inside.end()) return Interval::none();
  const auto i0 = static_cast<std::size_t>(first - inside.begin());
  const auto i1 = static_cast<std::size_t>(
      grid.size() - 1 - static_cast<std::size_t>(std::find(inside.rbegin(), inside.rend(), 1) - inside.rbegin()));

  // Refine an edge between an outside grid point and an inside one by
  // bisecting whichever condition fails at the outside point.
  auto refine = [&](std::size_t out, std::size_t in) {
    const bool fails_large = a[out] - log_pl > 0.0;
    auto f = [&](double q) { return fails_large ? above_large(q) : below_small(q); };
    const double x0 = std::min(grid[out], grid[in]);
    const double x1 = std::max(grid[out], grid[in]);
    return detail::bisect(f, detail::Bracket{x0, x1, f(x0), f(x1)});
  };
  const double lo = i0 == 0 ? grid.front() : refine(i0 - 1, i0);
  const double hi = i1 + 1 == grid.size() ? grid.back() : refine(i1 + 1, i1);
  return Interval::make(lo, hi);
}

std::vector<Interval> complete_stable_region(int n, double lambda_hat, Cutoff cutoff) {
  std::vector<Interval> pieces;
  for (const Interval& piece :
       {absolute_stable_region(n, lambda_hat, cutoff), quasi_stable_region(n, lambda_hat, cutoff)}) {
    if (!piece.empty) pieces.push_back(piece);
  }
  std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const Interval& piece : pieces) {
    if (!merged.empty() && piece.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, piece.hi);
    } else {
      merged.push_back(piece);
    }
  }
  return merged;
}

MaxThroughput max_stable_throughput(int n, Cutoff cutoff, RegionKind kind) {
  require_n(n);
  auto region = [&](double lambda_hat) -> Interval {
    switch (kind) {
      case RegionKind::kAbsolute:
        return absolute_stable_region(n, lambda_hat, cutoff);
      case RegionKind::kQuasi:
        return quasi_stable_region(n, lambda_hat, cutoff);
      case RegionKind::kComplete: {
        const auto pieces = complete_stable_region(n, lambda_hat, cutoff);
        return pieces.empty() ? Interval::none() : pieces.back();
      }
    }
    return Interval::none();
  };

  const Interval at_top = region(kInvE);
  if (!at_top.empty) return {kInvE, at_top.hi, true};
  double lo = 1e-9;
  Interval lo_region = region(lo);
  if (lo_region.empty) return {};
  double hi = kInvE;
  // Regions shrink as the rate grows, so emptiness is a monotone predicate.
  for (int i = 0; i < 60 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    const Interval r = region(mid);
    if (r.empty) {
      hi = mid;
    } else {
      lo = mid;
      lo_region = r;
    }
  }
  return {lo, lo_region.hi, true};
}

// --- classification --------------------------------------------------------

StabilityReport classify(const BackoffConfig& config) {
  config.validate();
  const int n = config.n;
  const double lambda_hat = config.lambda_hat();
  StabilityReport report;
  report.absolute = absolute_stable_region(n, lambda_hat, config.cutoff);
  report.quasi = quasi_stable_region(n, lambda_hat, config.cutoff);
  report.complete = complete_stable_region(n, lambda_hat, config.cutoff);

  const auto eq = equilibrium_points(lambda_hat);
  const UndesiredPoint pa = undesired_point(n, config.q, config.cutoff);
  std::vector<std::string> notes;
  if (!eq.exists) notes.emplace_back("aggregate rate exceeds 1/e: no equilibrium points");
  if (q_upper(n, lambda_hat).clamped) notes.emplace_back("upper bound clamped below 1");

  if (report.absolute.contains(config.q)) {
    report.classification = Classification::kAbsoluteStable;
    report.operating_point = eq.p_large;
    report.log_operating_point = std::log(eq.p_large);
    report.predicted_throughput = lambda_hat;
    if (config.q == report.absolute.lo && lambda_hat > 0.0) {
      notes.emplace_back("q equals the lower bound: throughput-stable, mean delay unbounded");
    }
  } else if (eq.exists && report.quasi.contains(config.q)) {
    report.classification = Classification::kQuasiStable;
    report.operating_point = pa.p;
    report.log_operating_point = pa.log_p;
    report.predicted_throughput = lambda_hat;
    notes.emplace_back("operates at the undesired stable point: throughput-stable only");
  } else {
    report.classification = Classification::kUnstable;
    report.operating_point = pa.p;
    report.log_operating_point = pa.log_p;
    report.predicted_throughput = std::min(lambda_hat, saturated_throughput_from_log(pa.log_p));
  }

  for (const auto& note : notes) {
    if (!report.notes.empty()) report.notes += "; ";
    report.notes += note;
  }
  return report;
}

}  // namespace aloha
