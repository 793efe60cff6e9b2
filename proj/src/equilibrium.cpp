#include "aloha/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "aloha/errors.hpp"
#include "aloha/lambertw.hpp"
#include "roots.hpp"

namespace aloha {
namespace {

void require_probability(double p, const char* what) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError(std::string(what) + ": success probability must lie in (0, 1]");
  }
}

void require_q(double q, const char* what) {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError(std::string(what) + ": retransmission factor must lie in (0, 1)");
  }
}

// Sum_{i=0}^{K-1} x^i, accurate near x = 1.
double geometric_sum(double x, int k) {
  if (x == 1.0) return k;
  if (x == 0.0) return 1.0;
  return std::expm1(k * std::log(x)) / (x - 1.0);
}

}  // namespace

// --- Cutoff / BackoffConfig ------------------------------------------------

Cutoff Cutoff::finite(int k) {
  if (k < 1) throw std::invalid_argument("cutoff phase K must be a positive integer");
  return Cutoff(k);
}

Cutoff Cutoff::parse(const std::string& text) {
  if (text == "inf" || text == "INF" || text == "Inf" || text == "unbounded") return unbounded();
  std::size_t used = 0;
  int k = 0;
  try {
    k = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse cutoff phase '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("cannot parse cutoff phase '" + text + "'");
  return finite(k);
}

std::string Cutoff::to_string() const { return is_unbounded() ? "inf" : std::to_string(*k_); }

BackoffConfig BackoffConfig::from_aggregate(int n, Cutoff cutoff, double q, double lambda_hat) {
  if (n < 1) throw std::invalid_argument("node count n must be positive");
  return BackoffConfig{n, cutoff, q, lambda_hat / n};
}

void BackoffConfig::validate() const {
  if (n < 1) throw std::invalid_argument("node count n must be positive");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("per-node rate must lie in [0, 1]");
  }
}

// --- PhaseDistribution -----------------------------------------------------

PhaseDistribution PhaseDistribution::finite(std::vector<double> probabilities) {
  PhaseDistribution d;
  d.probs_ = std::move(probabilities);
  d.ratio_ = d.probs_.size() > 2 && d.probs_[0] > 0.0 ? d.probs_[1] / d.probs_[0] : 0.0;
  return d;
}

PhaseDistribution PhaseDistribution::geometric(double f0, double ratio) {
  PhaseDistribution d;
  d.unbounded_ = true;
  d.ratio_ = ratio;
  d.probs_ = {f0};
  return d;
}

double PhaseDistribution::f0() const { return probs_.front(); }

double PhaseDistribution::probability(std::size_t phase) const {
  if (unbounded_) return probs_[0] * std::pow(ratio_, static_cast<double>(phase));
  return phase < probs_.size() ? probs_[phase] : 0.0;
}

std::vector<double> PhaseDistribution::buckets(std::size_t cap) const {
  if (!unbounded_) return probs_;
  std::vector<double> out(cap + 1);
  for (std::size_t i = 0; i < cap; ++i) out[i] = probability(i);
  out[cap] = std::pow(ratio_, static_cast<double>(cap));  // tail: sum_{i>=cap} f0 r^i
  return out;
}

// --- phase chain -----------------------------------------------------------

PhaseDistribution phase_distribution(double p, double q, Cutoff cutoff) {
  require_probability(p, "phase_distribution");
  require_q(q, "phase_distribution");
  const double x = (1.0 - p) / q;

  if (cutoff.is_unbounded()) {
    if (p + q <= 1.0) {
      throw NoStationaryDistribution("phase chain with unbounded K needs p + q > 1");
    }
    return PhaseDistribution::geometric(1.0 - x, x);
  }

  const int k = cutoff.value();
  std::vector<double> f(static_cast<std::size_t>(k) + 1);
  // Weights are scaled by x^-K when x > 1 so that nothing overflows.
  const bool scale = x > 1.0;
  for (int i = 0; i < k; ++i) f[i] = std::pow(x, scale ? i - k : i);
  f[k] = (scale ? 1.0 : std::pow(x, k)) / p;
  const double total = std::accumulate(f.begin(), f.end(), 0.0);
  for (double& v : f) v /= total;
  return PhaseDistribution::finite(std::move(f));
}

double offered_load(double lambda, double p, double q, Cutoff cutoff) {
  if (!(lambda >= 0.0)) throw DomainError("offered_load: rate must be nonnegative");
  require_probability(p, "offered_load");
  require_q(q, "offered_load");
  if (cutoff.is_unbounded()) {
    if (p + q <= 1.0) {
      throw NoStationaryDistribution("phase chain with unbounded K needs p + q > 1");
    }
    return lambda * q / (p + q - 1.0);
  }
  if (cutoff.value() == 1) return lambda * (1.0 - p + p * q) / (p * q);
  return lambda / phase_distribution(p, q, cutoff).f0();
}

// --- steady-state fixed points ---------------------------------------------

EquilibriumPoints equilibrium_points(double lambda_hat) {
  if (!(lambda_hat >= 0.0)) throw DomainError("equilibrium_points: aggregate rate must be >= 0");
  EquilibriumPoints out;
  if (lambda_hat == 0.0) {
    out.exists = true;
    out.p_large = 1.0;
    out.p_small = 0.0;
    out.degenerate = true;
    return out;
  }
  if (-lambda_hat < kMinusInvE - kBranchPointTolerance) return out;
  out.exists = true;
  out.p_large = std::exp(lambert_w0(-lambda_hat));
  out.p_small = std::exp(lambert_wm1(-lambda_hat));
  return out;
}

double success_probability_finite_n(double lambda, int n) {
  if (n < 1) throw std::invalid_argument("node count n must be positive");
  if (!(lambda >= 0.0)) throw DomainError("success_probability_finite_n: rate must be >= 0");
  if (lambda == 0.0 || n == 1) return 1.0;
  if (lambda >= 1.0) throw NoEquilibrium("no root on (lambda, 1] for lambda >= 1");

  const double exponent = n - 1.0;
  auto h = [&](double p) { return p - std::exp(exponent * std::log1p(-lambda / p)); };

  // Scan downward from p = 1 and stop at the first crossing: the largest root.
  const auto grid = detail::linspace(lambda, 1.0, detail::kScanPoints);
  double upper = grid.back();
  double f_upper = h(upper);
  for (std::size_t j = grid.size() - 1; j-- > 1;) {
    const double p = grid[j];
    const double fp = h(p);
    if (fp <= 0.0) {
      return detail::bisect(h, detail::Bracket{p, upper, fp, f_upper});
    }
    upper = p;
    f_upper = fp;
  }
  throw NoEquilibrium("p = (1 - lambda/p)^(n-1) has no root on (lambda, 1]");
}

double attempt_rate(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("attempt_rate: p must lie in (0, 1]");
  return p == 1.0 ? 0.0 : -std::log(p);
}

double throughput_of(double g) {
  if (!(g >= 0.0)) throw DomainError("throughput_of: attempt rate must be >= 0");
  return g * std::exp(-g);
}

// --- trajectory maps -------------------------------------------------------

double iterate_unsaturated(double p_t, const BackoffConfig& config, UnsaturatedMode mode) {
  require_probability(p_t, "iterate_unsaturated");
  if (mode == UnsaturatedMode::kAsymptotic) return std::exp(-config.lambda_hat() / p_t);
  if (p_t <= config.lambda) {
    throw SaturationOnset("p_t <= lambda: the unsaturated map no longer applies");
  }
  return std::exp((config.n - 1.0) * std::log1p(-config.lambda / p_t));
}

double saturated_g(double p, double q, Cutoff cutoff) {
  require_q(q, "saturated_g");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("saturated_g: p must lie in [0, 1]");
  const double x = (1.0 - p) / q;
  if (cutoff.is_unbounded()) {
    if (p + q <= 1.0) return std::numeric_limits<double>::infinity();
    return p * q / (p + q - 1.0);
  }
  const int k = cutoff.value();
  return p * geometric_sum(x, k) + std::pow(x, k);
}

SaturatedStep iterate_saturated(double p_t, int n, double q, Cutoff cutoff) {
  require_probability(p_t, "iterate_saturated");
  const double g = saturated_g(p_t, q, cutoff);
  if (!(g > 0.0)) throw DomainError("iterate_saturated: g(p) must be positive");
  const double next = std::exp(-n / g);
  if (next < std::numeric_limits<double>::min()) {
    return {std::numeric_limits<double>::min(), true};
  }
  return {next, false};
}

UndesiredPoint undesired_point(int n, double q, Cutoff cutoff) {
  if (n < 1) throw std::invalid_argument("node count n must be positive");
  require_q(q, "undesired_point");

  // phi(u) = u + n / g(e^u) is negative as u -> -inf and equals n at u = 0.
  // Since g >= 1 the root lies in [-n, 0).
  auto phi = [&](double u) { return u + n / saturated_g(std::exp(u), q, cutoff); };

  constexpr std::size_t kHalf = detail::kScanPoints / 2;
  const double u_split = std::log(1e-3);
  const double u_lo = std::min(-(n + 1.0), u_split - 1.0);
  std::vector<double> grid = detail::linspace(u_lo, u_split, kHalf);
  for (double p : detail::linspace(1e-3, 1.0 - 1e-12, kHalf + 1)) {
    if (p > 1e-3) grid.push_back(std::log(p));
  }

  const auto scan = detail::sign_scan(phi, grid);
  if (scan.brackets.size() != 1) {
    throw BracketingFailure("undesired_point: expected one sign change of ln p + n/g(p), scanned " +
                            scan.pattern);
  }
  UndesiredPoint out;
  out.sign_changes = 1;
  out.log_p = detail::bisect(phi, scan.brackets.front());
  out.p = std::exp(out.log_p);
  return out;
}

double saturated_throughput(double p_a) {
  if (!(p_a >= 0.0 && p_a <= 1.0)) throw DomainError("saturated_throughput: p must lie in [0, 1]");
  if (p_a == 0.0) return 0.0;
  return -p_a * std::log(p_a);
}

double saturated_throughput_from_log(double log_p_a) {
  if (!(log_p_a <= 0.0)) throw DomainError("saturated_throughput: ln p must be <= 0");
  return -std::exp(log_p_a) * log_p_a;
}

}  // namespace aloha
