#include <doctest.h>

#include <cmath>
#include <numeric>

#include "aloha/equilibrium.hpp"
#include "aloha/errors.hpp"
#include "aloha/regions.hpp"
#include "aloha/simulator.hpp"
#include "oracles.hpp"

using namespace aloha;

namespace {

SimConfig make(int n, Cutoff k, double q, double lambda_hat, std::uint64_t slots, std::uint64_t seed = 1) {
  SimConfig c;
  c.backoff = BackoffConfig::from_aggregate(n, k, q, lambda_hat);
  c.total_slots = slots;
  c.warmup_slots = slots / 5;
  c.seed = seed;
  c.divergence_window = std::min<std::uint64_t>(100000, slots);
  return c;
}

double mean_tail_p(const std::vector<TrajectoryPoint>& points, std::size_t last) {
  double s = 0.0;
  std::size_t used = 0;
  for (std::size_t i = points.size() - last; i < points.size(); ++i) {
    if (points[i].p) {
      s += *points[i].p;
      ++used;
    }
  }
  return used ? s / used : std::nan("");
}

}  // namespace

TEST_CASE("configuration is validated") {
  auto c = make(10, Cutoff::finite(1), 0.1, 0.1, 1000);
  c.warmup_slots = 1000;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_THROWS_AS(Simulator{c}, std::invalid_argument);
  c = make(10, Cutoff::finite(1), 0.1, 0.1, 1000);
  c.total_slots = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = make(10, Cutoff::finite(1), 1.5, 0.1, 1000);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("packets are conserved") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (Cutoff k : {Cutoff::finite(1), Cutoff::finite(3), Cutoff::unbounded()}) {
      const auto s = run(make(20, k, 0.3, 0.25, 20000, seed));
      CHECK(s.arrivals_total == s.departures_total + s.final_backlog);
      const auto forced = run(make(20, k, 0.3, 0.25, 20000, seed), BacklogForcing{5, 2});
      CHECK(forced.arrivals_total == forced.departures_total + forced.final_backlog);
      CHECK(forced.arrivals_total >= 100);
    }
  }
}

TEST_CASE("slot-level invariants") {
  auto c = make(20, Cutoff::unbounded(), 0.5, 0.3, 30000, 9);
  Simulator sim(c);
  std::uint64_t departures = 0;
  for (int t = 0; t < 30000; ++t) {
    const auto before = sim.departures();
    const auto out = sim.step();
    departures = sim.departures();
    CHECK(departures - before <= 1);
    CHECK(out.success == (out.transmitters == 1));
    CHECK(out.transmitters <= out.busy);
    for (const auto& node : sim.nodes()) {
      if (node.queue_len == 0) continue;
      CHECK(node.hol_phase < 10000);
    }
  }
  CHECK(sim.slot() == 30000);
  CHECK(sim.arrivals() == sim.departures() + sim.backlog());
}

TEST_CASE("cutoff caps the phase") {
  Simulator sim(make(30, Cutoff::finite(3), 0.9, 0.36, 20000, 4), BacklogForcing{50, 0});
  std::uint64_t max_phase = 0;
  for (int t = 0; t < 20000; ++t) {
    sim.step();
    for (const auto& node : sim.nodes()) {
      if (node.queue_len > 0) max_phase = std::max(max_phase, node.hol_phase);
    }
  }
  CHECK(max_phase == 3);
}

TEST_CASE("no arrivals means an idle channel") {
  const auto s = run(make(10, Cutoff::finite(2), 0.5, 0.0, 10000));
  CHECK(s.measured_throughput == 0.0);
  CHECK(s.measured_rho == 0.0);
  CHECK(s.attempts == 0);
  CHECK(s.arrivals_total == 0);
}

TEST_CASE("runs are deterministic in the seed") {
  const auto c = make(15, Cutoff::unbounded(), 0.5, 0.2, 50000, 42);
  const auto a = run(c);
  const auto b = run(c);
  CHECK(a.successes == b.successes);
  CHECK(a.attempts == b.attempts);
  CHECK(a.measured_rho == b.measured_rho);
  CHECK(a.phase_histogram == b.phase_histogram);
  CHECK(a.backlog_series == b.backlog_series);
  CHECK(a.backlog_slope == b.backlog_slope);
  const auto other = run(make(15, Cutoff::unbounded(), 0.5, 0.2, 50000, 43));
  CHECK(other.attempts != a.attempts);
}

TEST_CASE("measured quantities are consistent") {
  for (double q : {0.1, 0.5, 0.9}) {
    const auto s = run(make(20, Cutoff::finite(4), q, 0.3, 50000, 5));
    CHECK(s.measured_p >= 0.0);
    CHECK(s.measured_p <= 1.0);
    CHECK(s.measured_throughput <= s.measured_G);
    CHECK(s.measured_throughput <= 1.0);
    CHECK(s.state_bound_violations == 0);
    CHECK(s.per_state_expected_G_max <= s.state_bound + 1e-12);
    CHECK(s.phase_histogram.size() == 5);
  }
}

TEST_CASE("transmit probability past the power table") {
  Simulator sim(make(2, Cutoff::unbounded(), 0.5, 0.1, 10));
  CHECK(sim.transmit_probability(0) == 1.0);
  CHECK(sim.transmit_probability(3) == 0.125);
  CHECK(sim.transmit_probability(1000) == doctest::Approx(std::pow(0.5, 1000)).epsilon(1e-12));
  CHECK(sim.transmit_probability(1020) == doctest::Approx(std::pow(0.5, 1020)).epsilon(1e-12));
}

TEST_CASE("stable runs agree with the desired operating point") {
  const double lh = 0.1;
  const int n = 10;
  const double p_l = equilibrium_points(lh).p_large;
  int points = 0;
  for (Cutoff k : {Cutoff::finite(1), Cutoff::unbounded()}) {
    const auto sl = absolute_stable_region(n, lh, k);
    REQUIRE_FALSE(sl.empty);
    for (int j = 1; j <= 5; ++j) {
      const double q = sl.lo + (sl.hi - sl.lo) * j / 6.0;
      for (std::uint64_t seed : {101u, 202u}) {
        const auto s = run(make(n, k, q, lh, 1000000, seed + j));
        CHECK(std::abs(s.measured_p - p_l) <= 0.02);
        CHECK(std::abs(s.measured_rho - offered_load(lh / n, p_l, q, k)) <= 0.03);
        CHECK(s.measured_throughput == doctest::Approx(lh).epsilon(0.05));
        CHECK_FALSE(s.diverged);
        CHECK(s.state_bound_violations == 0);
        ++points;
      }
    }
  }
  CHECK(points == 20);
}

TEST_CASE("empirical phase distribution") {
  SUBCASE("geometric retransmission") {
    const double q = 0.1;
    const auto s = run(make(10, Cutoff::finite(1), q, 0.1, 400000, 3));
    const auto hist = empirical_phase_distribution(s);
    const auto f = oracle::stationary(s.measured_p, q, 1);
    REQUIRE(hist.size() == 2);
    CHECK(std::abs(hist[0] - f[0]) <= 0.03);
    CHECK(std::abs(hist[1] - f[1]) <= 0.03);
  }
  SUBCASE("nearly empty network") {
    const auto s = run(make(10, Cutoff::finite(4), 0.5, 0.001, 200000, 3));
    CHECK(empirical_phase_distribution(s)[0] > 0.99);
  }
  SUBCASE("diverged runs are rejected") {
    const auto s = run(make(50, Cutoff::finite(1), 0.2, 0.3, 300000, 3));
    CHECK(s.diverged);
    CHECK_THROWS_AS(empirical_phase_distribution(s), DivergedRun);
  }
}

TEST_CASE("exponential backoff phase occupancy decays geometrically" * doctest::may_fail()) {
  const double q = 0.3;
  const auto s = run(make(10, Cutoff::unbounded(), q, 0.1, 1000000, 8));
  const auto hist = empirical_phase_distribution(s);
  const double ratio = (1.0 - s.measured_p) / q;
  for (int i = 1; i < 5; ++i) {
    MESSAGE("f" << i + 1 << "/f" << i << "=" << hist[i + 1] / hist[i] << " expected " << ratio);
    CHECK(hist[i + 1] / hist[i] == doctest::Approx(ratio).epsilon(0.15));
  }
}

TEST_CASE("instability shows up as backlog growth") {
  const auto s = run(make(50, Cutoff::finite(1), 0.2, 0.3, 300000, 3));
  CHECK(s.diverged);
  CHECK(s.backlog_slope > s.divergence_threshold);
  CHECK(s.divergence_threshold == doctest::Approx(0.03));
  CHECK(s.measured_throughput < 0.05);
  CHECK(s.final_backlog > 50000);
}

TEST_CASE("trajectories") {
  SUBCASE("empty start inside the absolute-stable region") {
    const auto sl = absolute_stable_region(10, 0.1, Cutoff::finite(1));
    const double q = 0.5 * (sl.lo + sl.hi);
    const auto points = trajectory_probe(make(10, Cutoff::finite(1), q, 0.1, 200000, 5), std::nullopt, 2000);
    CHECK(points.size() == 100);
    CHECK(mean_tail_p(points, 50) == doctest::Approx(equilibrium_points(0.1).p_large).epsilon(0.03));
  }
  SUBCASE("saturated geometric retransmission settles near exp(-nq)") {
    const double q = 0.1;
    const auto points =
        trajectory_probe(make(50, Cutoff::finite(1), q, 0.3, 100000, 5), BacklogForcing{100000, 1}, 2000);
    CHECK(mean_tail_p(points, 25) == doctest::Approx(std::exp(-50 * q)).epsilon(0.25));
  }
}

TEST_CASE("forced-saturated exponential backoff settles near 1 - q" * doctest::may_fail()) {
  for (std::uint64_t phase : {0u, 8u}) {
    const auto points =
        trajectory_probe(make(50, Cutoff::unbounded(), 0.6, 0.3, 100000, 5), BacklogForcing{100000, phase}, 2000);
    const double p = mean_tail_p(points, 25);
    MESSAGE("initial phase " << phase << ": windowed p over the last 50000 slots = " << p);
    CHECK(std::abs(p - 0.4) <= 0.03);
  }
}
