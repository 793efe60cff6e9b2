#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "aloha/equilibrium.hpp"

namespace aloha {

struct SimConfig {
  BackoffConfig backoff;
  std::uint64_t total_slots = 1'000'000;
  std::uint64_t warmup_slots = 200'000;
  std::uint64_t seed = 1;
  /// Histogram buckets for unbounded K: phases 0..cap-1 plus one overflow
  /// bucket. Dynamics are never capped.
  int k_cap_for_unbounded = 32;
  std::uint64_t divergence_window = 100'000;
  std::uint64_t backlog_sample_every = 1000;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// Initial backlog: every node starts with `packets_per_node` packets whose
/// HOL sits in `phase`.
struct BacklogForcing {
  std::uint64_t packets_per_node = 0;
  std::uint64_t phase = 0;
};

struct NodeState {
  std::uint64_t queue_len = 0;  // HOL included
  std::uint64_t hol_phase = 0;  // meaningful only when queue_len >= 1
};

struct SimStats {
  // Measurement window (after warmup).
  std::uint64_t measured_slots = 0;
  std::uint64_t successes = 0;
  std::uint64_t attempts = 0;
  double measured_throughput = 0.0;  // successes / slot
  double measured_p = 0.0;           // successes / attempts
  double measured_rho = 0.0;         // busy fraction per node
  double measured_G = 0.0;           // attempts / slot
  std::vector<double> phase_histogram;

  // Whole run.
  std::vector<std::uint64_t> backlog_series;
  std::uint64_t backlog_sample_every = 0;
  std::uint64_t arrivals_total = 0;  // includes any forced initial backlog
  std::uint64_t departures_total = 0;
  std::uint64_t final_backlog = 0;

  /// max over slots of (n - n_b) lambda + sum_i n_i q^i, and the number of
  /// slots where it exceeded max(lambda_hat, n q) + 1e-12.
  double per_state_expected_G_max = 0.0;
  double state_bound = 0.0;
  std::uint64_t state_bound_violations = 0;

  bool diverged = false;
  double backlog_slope = 0.0;
  double divergence_threshold = 0.0;
  std::uint64_t seed = 0;
};

/// Slot-by-slot engine for the n-queue buffered Aloha system.
///
/// Each slot: busy nodes decide to transmit with probability q^phase; a lone
/// transmitter departs, colliding transmitters advance one phase (saturating
/// at finite K); then each node receives a Bernoulli(lambda) arrival that
/// first contends in the next slot.
class Simulator {
 public:
  explicit Simulator(const SimConfig& config, std::optional<BacklogForcing> forcing = std::nullopt);

  struct SlotOutcome {
    std::uint32_t transmitters = 0;
    bool success = false;
    std::uint32_t busy = 0;          // nodes with a HOL at slot start
    double state_attempt_rate = 0.0;  // (n - n_b) lambda + sum_i n_i q^i at slot start
  };

  SlotOutcome step();

  [[nodiscard]] const std::vector<NodeState>& nodes() const { return nodes_; }
  [[nodiscard]] std::uint64_t slot() const { return slot_; }
  [[nodiscard]] std::uint64_t backlog() const { return backlog_; }
  [[nodiscard]] std::uint64_t arrivals() const { return arrivals_; }
  [[nodiscard]] std::uint64_t departures() const { return departures_; }
  /// q^phase, computed in log space once the power underflows.
  [[nodiscard]] double transmit_probability(std::uint64_t phase) const;

 private:
  bool transmits(std::uint64_t phase, double u) const;

  SimConfig config_;
  double log_q_ = 0.0;
  std::vector<double> q_pow_;
  std::vector<NodeState> nodes_;
  std::vector<std::mt19937_64> streams_;
  std::vector<std::uint32_t> transmitting_;
  std::uint64_t slot_ = 0;
  std::uint64_t backlog_ = 0;
  std::uint64_t arrivals_ = 0;
  std::uint64_t departures_ = 0;
};

/// Runs config.total_slots slots from an empty (or forced) network.
SimStats run(const SimConfig& config, std::optional<BacklogForcing> forcing = std::nullopt);

/// Normalized phase occupancy among busy nodes. Throws DivergedRun when the
/// run was flagged as diverged.
std::vector<double> empirical_phase_distribution(const SimStats& stats);

struct TrajectoryPoint {
  std::uint64_t slot_end = 0;
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  std::optional<double> p;  // successes / attempts, absent without attempts
};

/// Windowed empirical success probability over the whole run.
std::vector<TrajectoryPoint> trajectory_probe(const SimConfig& config,
                                              std::optional<BacklogForcing> forcing,
                                              std::uint64_t window = 2000);

}  // namespace aloha
