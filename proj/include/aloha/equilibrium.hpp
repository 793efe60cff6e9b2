#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aloha {

/// Cutoff phase K: a positive integer, or unbounded (exponential backoff).
class Cutoff {
 public:
  static Cutoff finite(int k);
  static Cutoff unbounded() { return Cutoff(); }
  /// Accepts a positive integer or "inf".
  static Cutoff parse(const std::string& text);

  [[nodiscard]] bool is_unbounded() const { return !k_.has_value(); }
  /// Precondition: !is_unbounded().
  [[nodiscard]] int value() const { return *k_; }
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Cutoff&, const Cutoff&) = default;

 private:
  Cutoff() = default;
  explicit Cutoff(int k) : k_(k) {}
  std::optional<int> k_;
};

/// One network: n nodes, cutoff K, retransmission factor q, per-node rate.
struct BackoffConfig {
  int n = 1;
  Cutoff cutoff = Cutoff::finite(1);
  double q = 0.5;
  double lambda = 0.0;

  [[nodiscard]] double lambda_hat() const { return n * lambda; }
  /// Builds a config from the aggregate rate; lambda = lambda_hat / n.
  static BackoffConfig from_aggregate(int n, Cutoff cutoff, double q, double lambda_hat);
  /// Throws std::invalid_argument on n < 1, q outside (0,1) or lambda outside [0,1].
  void validate() const;
};

/// Limiting distribution of the HOL phase chain.
///
/// For finite K the probabilities are stored explicitly. For unbounded K the
/// distribution is geometric, f_i = f_0 r^i with r = (1-p)/q < 1.
class PhaseDistribution {
 public:
  static PhaseDistribution finite(std::vector<double> probabilities);
  static PhaseDistribution geometric(double f0, double ratio);

  [[nodiscard]] bool is_unbounded() const { return unbounded_; }
  [[nodiscard]] double f0() const;
  /// f_i; zero beyond K for finite K.
  [[nodiscard]] double probability(std::size_t phase) const;
  /// Decay ratio (1-p)/q; for finite K this is f_1/f_0 when K >= 2.
  [[nodiscard]] double ratio() const { return ratio_; }
  /// For finite K, all f_i. For unbounded K, f_0..f_{cap-1} plus the tail
  /// mass from phase cap onward in the last slot.
  [[nodiscard]] std::vector<double> buckets(std::size_t cap) const;
  [[nodiscard]] const std::vector<double>& probabilities() const { return probs_; }

 private:
  bool unbounded_ = false;
  double ratio_ = 0.0;
  std::vector<double> probs_;  // finite: f_0..f_K; unbounded: {f_0}
};

/// phase_distribution(p, q, K). Requires 0 < p <= 1, 0 < q < 1; unbounded K
/// requires p + q > 1 and throws NoStationaryDistribution otherwise.
PhaseDistribution phase_distribution(double p, double q, Cutoff cutoff);

/// Per-node offered load lambda / f_0. Values above 1 indicate overload.
double offered_load(double lambda, double p, double q, Cutoff cutoff);

/// The two roots of p = exp(-lambda_hat / p).
struct EquilibriumPoints {
  bool exists = false;
  double p_large = 0.0;  // desired stable point
  double p_small = 0.0;  // unstable equilibrium
  /// lambda_hat == 0: p_large = 1 and p_small is reported as 0.
  bool degenerate = false;
};

EquilibriumPoints equilibrium_points(double lambda_hat);

/// Largest root on (lambda, 1] of p = (1 - lambda/p)^(n-1). Throws
/// NoEquilibrium when no root exists there.
double success_probability_finite_n(double lambda, int n);

/// G = -ln p. Throws DomainError for p <= 0.
double attempt_rate(double p);
/// G e^{-G}.
double throughput_of(double attempt_rate);

enum class UnsaturatedMode { kFiniteN, kAsymptotic };

/// p_{t+1} from p_t while nodes are not saturated. kFiniteN throws
/// SaturationOnset when p_t <= lambda.
double iterate_unsaturated(double p_t, const BackoffConfig& config, UnsaturatedMode mode);

/// g(p) = p / f_0(p): the saturated-map denominator. Finite for finite K and
/// for unbounded K with p + q > 1; +inf for unbounded K with p + q <= 1.
double saturated_g(double p, double q, Cutoff cutoff);

struct SaturatedStep {
  double p = 0.0;
  bool underflow = false;  // clamped to the smallest positive normal
};

/// p_{t+1} = exp(-n / g(p_t)) for a saturated network.
SaturatedStep iterate_saturated(double p_t, int n, double q, Cutoff cutoff);

/// Root of ln p + n / g(p) = 0, found in log space so that roots below the
/// double range are still located.
struct UndesiredPoint {
  double log_p = 0.0;
  /// exp(log_p); zero when that underflows.
  double p = 0.0;
  int sign_changes = 0;
};

/// Undesired stable point p_A(n, q, K) of the saturated network. Throws
/// BracketingFailure if the dense scan finds no sign change or more than one.
UndesiredPoint undesired_point(int n, double q, Cutoff cutoff);

/// -p ln p.
double saturated_throughput(double p_a);
/// -p ln p given ln p, exact where p itself underflows.
double saturated_throughput_from_log(double log_p_a);

}  // namespace aloha
