#include "aloha/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aloha/errors.hpp"

namespace aloha {
namespace {

constexpr double kStateBoundSlack = 1e-12;

// 53-bit uniform on [0, 1), identical on every standard library.
double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

std::mt19937_64 node_stream(std::uint64_t seed, std::uint32_t node) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32), node};
  return std::mt19937_64(seq);
}

std::size_t histogram_size(const SimConfig& config) {
  const Cutoff k = config.backoff.cutoff;
  return k.is_unbounded() ? static_cast<std::size_t>(config.k_cap_for_unbounded) + 1
                          : static_cast<std::size_t>(k.value()) + 1;
}

std::size_t histogram_bucket(const SimConfig& config, std::uint64_t phase) {
  if (config.backoff.cutoff.is_unbounded()) {
    return static_cast<std::size_t>(std::min<std::uint64_t>(phase, config.k_cap_for_unbounded));
  }
  return static_cast<std::size_t>(phase);
}

// Least-squares slope of y against its index.
class SlopeAccumulator {
 public:
  void add(double y) {
    const double t = static_cast<double>(count_++);
    st_ += t;
    stt_ += t * t;
    sy_ += y;
    sty_ += t * y;
  }
  [[nodiscard]] double slope() const {
    const double m = static_cast<double>(count_);
    const long double denom = m * stt_ - st_ * st_;
    if (count_ < 2 || denom == 0.0L) return 0.0;
    return static_cast<double>((m * sty_ - st_ * sy_) / denom);
  }

 private:
  std::uint64_t count_ = 0;
  long double st_ = 0, stt_ = 0, sy_ = 0, sty_ = 0;
};

}  // namespace

void SimConfig::validate() const {
  backoff.validate();
  if (total_slots == 0) throw std::invalid_argument("total_slots must be positive");
  if (warmup_slots >= total_slots) throw std::invalid_argument("warmup_slots must be below total_slots");
  if (k_cap_for_unbounded < 1) throw std::invalid_argument("k_cap_for_unbounded must be positive");
  if (divergence_window == 0) throw std::invalid_argument("divergence_window must be positive");
  if (backlog_sample_every == 0) throw std::invalid_argument("backlog_sample_every must be positive");
}

// --- Simulator -------------------------------------------------------------

Simulator::Simulator(const SimConfig& config, std::optional<BacklogForcing> forcing) : config_(config) {
  config_.validate();
  const int n = config_.backoff.n;
  log_q_ = std::log(config_.backoff.q);
  for (double v = 1.0; v >= 1e-300 && q_pow_.size() < 100'000; v *= config_.backoff.q) q_pow_.push_back(v);

  nodes_.resize(static_cast<std::size_t>(n));
  streams_.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) streams_.push_back(node_stream(config_.seed, static_cast<std::uint32_t>(i)));
  transmitting_.reserve(static_cast<std::size_t>(n));

  if (forcing && forcing->packets_per_node > 0) {
    std::uint64_t phase = forcing->phase;
    if (!config_.backoff.cutoff.is_unbounded()) {
      phase = std::min<std::uint64_t>(phase, static_cast<std::uint64_t>(config_.backoff.cutoff.value()));
    }
    for (auto& node : nodes_) {
      node.queue_len = forcing->packets_per_node;
      node.hol_phase = phase;
    }
    backlog_ = forcing->packets_per_node * static_cast<std::uint64_t>(n);
    arrivals_ = backlog_;
  }
}

double Simulator::transmit_probability(std::uint64_t phase) const {
  if (phase < q_pow_.size()) return q_pow_[phase];
  return std::exp(static_cast<double>(phase) * log_q_);
}

bool Simulator::transmits(std::uint64_t phase, double u) const {
  if (phase < q_pow_.size()) return u < q_pow_[phase];
  return std::log(u) < static_cast<double>(phase) * log_q_;
}

Simulator::SlotOutcome Simulator::step() {
  SlotOutcome out;
  const double lambda = config_.backoff.lambda;
  const bool bounded = !config_.backoff.cutoff.is_unbounded();
  const std::uint64_t k_max = bounded ? static_cast<std::uint64_t>(config_.backoff.cutoff.value()) : 0;

  // (1) transmit decisions, ascending node id.
  transmitting_.clear();
  std::uint32_t backlogged = 0;
  double backlogged_rate = 0.0;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    const NodeState& node = nodes_[i];
    if (node.queue_len == 0) continue;
    ++out.busy;
    if (node.hol_phase >= 1) {
      ++backlogged;
      backlogged_rate += transmit_probability(node.hol_phase);
    }
    if (transmits(node.hol_phase, uniform01(streams_[i]))) transmitting_.push_back(i);
  }
  out.state_attempt_rate = static_cast<double>(nodes_.size() - backlogged) * lambda + backlogged_rate;
  out.transmitters = static_cast<std::uint32_t>(transmitting_.size());

  // (2) channel outcome.
  if (transmitting_.size() == 1) {
    NodeState& node = nodes_[transmitting_.front()];
    --node.queue_len;
    node.hol_phase = 0;
    --backlog_;
    ++departures_;
    out.success = true;
  } else if (transmitting_.size() > 1) {
    for (std::uint32_t i : transmitting_) {
      NodeState& node = nodes_[i];
      if (!bounded || node.hol_phase < k_max) ++node.hol_phase;
    }
  }

  // (3) arrivals, ascending node id; a packet reaching an empty queue
  // becomes a phase-0 HOL that contends next slot.
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    if (uniform01(streams_[i]) < lambda) {
      NodeState& node = nodes_[i];
      if (node.queue_len == 0) node.hol_phase = 0;
      ++node.queue_len;
      ++backlog_;
      ++arrivals_;
    }
  }
  ++slot_;
  return out;
}

// --- runs ------------------------------------------------------------------

SimStats run(const SimConfig& config, std::optional<BacklogForcing> forcing) {
  Simulator sim(config, forcing);
  const BackoffConfig& b = config.backoff;
  SimStats stats;
  stats.seed = config.seed;
  stats.backlog_sample_every = config.backlog_sample_every;
  stats.state_bound = std::max(b.lambda_hat(), b.n * b.q);
  stats.divergence_threshold = b.lambda_hat() / 10.0;

  std::vector<std::uint64_t> phase_counts(histogram_size(config), 0);
  std::uint64_t busy_node_slots = 0;
  const std::uint64_t window = std::min(config.divergence_window, config.total_slots);
  const std::uint64_t window_start = config.total_slots - window;
  SlopeAccumulator slope;

  for (std::uint64_t t = 0; t < config.total_slots; ++t) {
    const bool measuring = t >= config.warmup_slots;
    if (measuring) {
      for (const NodeState& node : sim.nodes()) {
        if (node.queue_len > 0) ++phase_counts[histogram_bucket(config, node.hol_phase)];
      }
    }
    const auto outcome = sim.step();

    stats.per_state_expected_G_max = std::max(stats.per_state_expected_G_max, outcome.state_attempt_rate);
    if (outcome.state_attempt_rate > stats.state_bound + kStateBoundSlack) ++stats.state_bound_violations;

    if (measuring) {
      ++stats.measured_slots;
      stats.attempts += outcome.transmitters;
      stats.successes += outcome.success ? 1 : 0;
      busy_node_slots += outcome.busy;
    }
    if (t % config.backlog_sample_every == 0) stats.backlog_series.push_back(sim.backlog());
    if (t >= window_start) slope.add(static_cast<double>(sim.backlog()));
  }

  const double slots = static_cast<double>(stats.measured_slots);
  stats.measured_throughput = static_cast<double>(stats.successes) / slots;
  stats.measured_G = static_cast<double>(stats.attempts) / slots;
  stats.measured_p = stats.attempts > 0 ? static_cast<double>(stats.successes) / static_cast<double>(stats.attempts) : 0.0;
  stats.measured_rho = static_cast<double>(busy_node_slots) / (slots * b.n);

  std::uint64_t busy_total = 0;
  for (auto c : phase_counts) busy_total += c;
  stats.phase_histogram.resize(phase_counts.size(), 0.0);
  if (busy_total > 0) {
    for (std::size_t i = 0; i < phase_counts.size(); ++i) {
      stats.phase_histogram[i] = static_cast<double>(phase_counts[i]) / static_cast<double>(busy_total);
    }
  }

  stats.arrivals_total = sim.arrivals();
  stats.departures_total = sim.departures();
  stats.final_backlog = sim.backlog();
  stats.backlog_slope = slope.slope();
  stats.diverged = stats.backlog_slope > stats.divergence_threshold;
  return stats;
}

std::vector<double> empirical_phase_distribution(const SimStats& stats) {
  if (stats.diverged) throw DivergedRun("phase distribution requested from a diverged run");
  return stats.phase_histogram;
}

std::vector<TrajectoryPoint> trajectory_probe(const SimConfig& config, std::optional<BacklogForcing> forcing,
                                              std::uint64_t window) {
  if (window == 0) throw std::invalid_argument("trajectory window must be positive");
  Simulator sim(config, forcing);
  std::vector<TrajectoryPoint> out;
  TrajectoryPoint current;
  for (std::uint64_t t = 0; t < config.total_slots; ++t) {
    const auto outcome = sim.step();
    current.attempts += outcome.transmitters;
    current.successes += outcome.success ? 1 : 0;
    if (sim.slot() % window == 0 || t + 1 == config.total_slots) {
      current.slot_end = sim.slot();
      if (current.attempts > 0) {
        current.p = static_cast<double>(current.successes) / static_cast<double>(current.attempts);
      }
      out.push_back(current);
      current = TrajectoryPoint{};
    }
  }
  return out;
}

}  // namespace aloha
