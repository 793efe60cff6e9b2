#pragma once

#include <string>
#include <vector>

#include "aloha/equilibrium.hpp"

namespace aloha {

/// Closed interval of retransmission factors, or the empty set.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = true;

  static Interval make(double lo, double hi);
  static Interval none() { return {}; }
  [[nodiscard]] bool contains(double q) const { return !empty && lo <= q && q <= hi; }
  [[nodiscard]] bool contains(const Interval& other) const;
};

struct Bound {
  double value = 0.0;
  bool defined = false;
  bool clamped = false;  // raw value was >= 1 and has been pulled into (0,1)
};

/// Upper bound -ln p_S / n = -W_{-1}(-lambda_hat) / n. Undefined for
/// lambda_hat outside (0, 1/e].
Bound q_upper(int n, double lambda_hat);

/// Lower bound: the q at which the offered load at p_L equals one. Closed
/// forms for K = 1 and unbounded K, bisection otherwise. Undefined when
/// p_L does not exist or no q in (0,1) brings the load down to one.
Bound q_lower(int n, double lambda_hat, Cutoff cutoff);

/// Large-n approximation (1 - p_L) / (n p_L / lambda_hat)^(1/K) for finite K.
double q_lower_approx(int n, double lambda_hat, Cutoff cutoff);

Interval absolute_stable_region(int n, double lambda_hat, Cutoff cutoff);

/// {q : p_S <= p_A(q) <= p_L}. For unbounded K this is the large-n closed
/// form [1 - p_L, 1 - p_S]; for K = 1 it is empty; for 1 < K < inf it is
/// the numerically solved set.
Interval quasi_stable_region(int n, double lambda_hat, Cutoff cutoff);

/// The same set solved numerically from p_A(q) for any K, without the
/// large-n closed form.
Interval quasi_stable_region_exact(int n, double lambda_hat, Cutoff cutoff);

/// Union of the absolute and quasi-stable regions as disjoint sorted pieces.
std::vector<Interval> complete_stable_region(int n, double lambda_hat, Cutoff cutoff);

enum class RegionKind { kAbsolute, kQuasi, kComplete };

struct MaxThroughput {
  double lambda_hat = 0.0;
  double q_star = 0.0;
  bool found = false;
};

/// Largest lambda_hat in (0, 1/e] for which the chosen region is non-empty,
/// and the upper end of that region at the supremum.
MaxThroughput max_stable_throughput(int n, Cutoff cutoff, RegionKind kind);

enum class Classification { kAbsoluteStable, kQuasiStable, kUnstable };

std::string to_string(Classification c);
std::string to_string(RegionKind k);

struct StabilityReport {
  Classification classification = Classification::kUnstable;
  double operating_point = 0.0;  // p_L or p_A
  double log_operating_point = 0.0;
  double predicted_throughput = 0.0;
  Interval absolute;
  Interval quasi;
  std::vector<Interval> complete;
  std::string notes;
};

StabilityReport classify(const BackoffConfig& config);

}  // namespace aloha
