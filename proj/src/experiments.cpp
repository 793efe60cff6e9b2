#include "aloha/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <future>
#include <sstream>
#include <stdexcept>

#include "aloha/errors.hpp"
#include "aloha/regions.hpp"

namespace aloha {
namespace {

constexpr double kInvE = 0.36787944117144232159552377016146;
constexpr std::size_t kShownPhases = 8;

Value opt(bool present, double v) { return present ? Value(v) : Value(); }

std::string interval_text(const Interval& r) {
  if (r.empty) return "empty";
  return "[" + format_double(r.lo) + ", " + format_double(r.hi) + "]";
}

std::string union_text(const std::vector<Interval>& pieces) {
  if (pieces.empty()) return "empty";
  std::string s;
  for (const auto& piece : pieces) {
    if (!s.empty()) s += " U ";
    s += interval_text(piece);
  }
  return s;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const std::vector<std::string> kStampColumns = {"schema_version", "generated_at"};

std::vector<double> linear_grid(double a, double b, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return v;
}

std::vector<double> log_grid(double a, double b, std::size_t count) {
  auto v = linear_grid(std::log(a), std::log(b), count);
  for (double& x : v) x = std::exp(x);
  return v;
}

// Rounds grid arithmetic to 12 significant digits so "0.1:0.3:0.1" prints
// as 0.3 rather than 0.30000000000000004.
std::string grid_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

SimConfig RunParameters::sim_config() const {
  SimConfig c;
  c.backoff = backoff();
  c.total_slots = slots;
  c.warmup_slots = warmup;
  c.seed = seed;
  return c;
}

Row stamp(Row row, const RunParameters& params) {
  Row out;
  out.set("schema_version", std::string(kSchemaVersion));
  out.set("generated_at", params.reproducible ? std::string() : params.timestamp);
  out.merge(row);
  return out;
}

// --- analyze ---------------------------------------------------------------

std::vector<std::string> analyze_columns() {
  std::vector<std::string> cols = concat(kStampColumns, {"n", "lambda_hat", "lambda", "q", "K", "p_L", "p_S",
                                                         "p_S_degenerate", "p_A", "log_p_A", "rho_at_p_L", "G",
                                                         "throughput"});
  for (std::size_t i = 0; i <= kShownPhases; ++i) cols.push_back("f" + std::to_string(i));
  cols.emplace_back("note");
  return cols;
}

Row analyze_row(const RunParameters& params) {
  const BackoffConfig config = params.backoff();
  config.validate();
  const auto eq = equilibrium_points(config.lambda_hat());
  const auto pa = undesired_point(config.n, config.q, config.cutoff);

  Row row;
  row.set("n", static_cast<std::int64_t>(config.n))
      .set("lambda_hat", config.lambda_hat())
      .set("lambda", config.lambda)
      .set("q", config.q)
      .set("K", config.cutoff.to_string())
      .set("p_L", opt(eq.exists, eq.p_large))
      .set("p_S", opt(eq.exists, eq.p_small))
      .set("p_S_degenerate", eq.degenerate)
      .set("p_A", pa.p)
      .set("log_p_A", pa.log_p);

  std::vector<std::string> notes;
  if (!eq.exists) {
    notes.emplace_back("none, lambda_hat > 1/e");
  } else {
    const double g = attempt_rate(eq.p_large);
    row.set("G", g).set("throughput", throughput_of(g));
    try {
      row.set("rho_at_p_L", offered_load(config.lambda, eq.p_large, config.q, config.cutoff));
      const auto f = phase_distribution(eq.p_large, config.q, config.cutoff);
      const std::size_t shown =
          config.cutoff.is_unbounded() ? kShownPhases : std::min<std::size_t>(kShownPhases, config.cutoff.value());
      for (std::size_t i = 0; i <= shown; ++i) row.set("f" + std::to_string(i), f.probability(i));
    } catch (const NoStationaryDistribution&) {
      notes.emplace_back("no stationary phase distribution at p_L (p_L + q <= 1)");
    }
  }
  std::string note;
  for (const auto& s : notes) note += (note.empty() ? "" : "; ") + s;
  row.set("note", note);
  return stamp(row, params);
}

// --- region ----------------------------------------------------------------

std::vector<std::string> region_columns() {
  return concat(kStampColumns,
                {"n", "lambda_hat", "K", "q_l", "q_u", "q_u_clamped", "q_l_approx", "S_L_lo", "S_L_hi", "S_L",
                 "S_A_lo", "S_A_hi", "S_A", "S_A_exact_lo", "S_A_exact_hi", "S", "max_lambda_hat_absolute",
                 "q_star_absolute", "max_lambda_hat_quasi", "q_star_quasi", "max_lambda_hat_complete",
                 "q_star_complete"});
}

Row region_row(const RunParameters& params) {
  const int n = params.n;
  const double lh = params.lambda_hat;
  const Cutoff k = params.cutoff;
  if (n < 1) throw std::invalid_argument("node count n must be positive");
  if (!(lh >= 0.0)) throw std::invalid_argument("aggregate rate must be nonnegative");

  const Bound ql = q_lower(n, lh, k);
  const Bound qu = q_upper(n, lh);
  const Interval sl = absolute_stable_region(n, lh, k);
  const Interval sa = quasi_stable_region(n, lh, k);
  const Interval sa_exact = quasi_stable_region_exact(n, lh, k);

  Row row;
  row.set("n", static_cast<std::int64_t>(n))
      .set("lambda_hat", lh)
      .set("K", k.to_string())
      .set("q_l", opt(ql.defined, ql.value))
      .set("q_u", opt(qu.defined, qu.value))
      .set("q_u_clamped", qu.clamped);
  if (lh > 0.0 && lh <= kInvE && !k.is_unbounded()) row.set("q_l_approx", q_lower_approx(n, lh, k));
  row.set("S_L_lo", opt(!sl.empty, sl.lo))
      .set("S_L_hi", opt(!sl.empty, sl.hi))
      .set("S_L", interval_text(sl))
      .set("S_A_lo", opt(!sa.empty, sa.lo))
      .set("S_A_hi", opt(!sa.empty, sa.hi))
      .set("S_A", interval_text(sa))
      .set("S_A_exact_lo", opt(!sa_exact.empty, sa_exact.lo))
      .set("S_A_exact_hi", opt(!sa_exact.empty, sa_exact.hi))
      .set("S", union_text(complete_stable_region(n, lh, k)));
  for (RegionKind kind : {RegionKind::kAbsolute, RegionKind::kQuasi, RegionKind::kComplete}) {
    const auto m = max_stable_throughput(n, k, kind);
    row.set("max_lambda_hat_" + to_string(kind), opt(m.found, m.lambda_hat))
        .set("q_star_" + to_string(kind), opt(m.found, m.q_star));
  }
  return stamp(row, params);
}

// --- result rows -----------------------------------------------------------

std::vector<std::string> result_columns() {
  return {"n",      "K",      "q",      "lambda_hat", "lambda",         "p_L",           "p_S",
          "p_A",    "log_p_A", "q_l",   "q_u",        "S_L_lo",         "S_L_hi",        "S_A_lo",
          "S_A_hi", "S",      "classification", "operating_point", "analytic_throughput", "notes"};
}

Row result_row(const BackoffConfig& config) {
  const auto report = classify(config);
  const double lh = config.lambda_hat();
  const auto eq = equilibrium_points(lh);
  const auto pa = undesired_point(config.n, config.q, config.cutoff);
  const Bound ql = q_lower(config.n, lh, config.cutoff);
  const Bound qu = q_upper(config.n, lh);

  Row row;
  row.set("n", static_cast<std::int64_t>(config.n))
      .set("K", config.cutoff.to_string())
      .set("q", config.q)
      .set("lambda_hat", lh)
      .set("lambda", config.lambda)
      .set("p_L", opt(eq.exists, eq.p_large))
      .set("p_S", opt(eq.exists, eq.p_small))
      .set("p_A", pa.p)
      .set("log_p_A", pa.log_p)
      .set("q_l", opt(ql.defined, ql.value))
      .set("q_u", opt(qu.defined, qu.value))
      .set("S_L_lo", opt(!report.absolute.empty, report.absolute.lo))
      .set("S_L_hi", opt(!report.absolute.empty, report.absolute.hi))
      .set("S_A_lo", opt(!report.quasi.empty, report.quasi.lo))
      .set("S_A_hi", opt(!report.quasi.empty, report.quasi.hi))
      .set("S", union_text(report.complete))
      .set("classification", to_string(report.classification))
      .set("operating_point", report.operating_point)
      .set("analytic_throughput", report.predicted_throughput)
      .set("notes", report.notes);
  return row;
}

std::vector<std::string> simulation_columns() {
  return {"seed",          "slots",         "warmup",          "measured_p",          "measured_throughput",
          "measured_rho",  "measured_G",    "diverged",        "backlog_slope",       "divergence_threshold",
          "final_backlog", "arrivals_total", "departures_total", "max_state_attempt_rate", "state_bound",
          "state_bound_violations", "phase_histogram"};
}

Row simulation_row(const SimConfig& config, const SimStats& stats) {
  Row row;
  row.set("seed", stats.seed)
      .set("slots", config.total_slots)
      .set("warmup", config.warmup_slots)
      .set("measured_p", stats.measured_p)
      .set("measured_throughput", stats.measured_throughput)
      .set("measured_rho", stats.measured_rho)
      .set("measured_G", stats.measured_G)
      .set("diverged", stats.diverged)
      .set("backlog_slope", stats.backlog_slope)
      .set("divergence_threshold", stats.divergence_threshold)
      .set("final_backlog", stats.final_backlog)
      .set("arrivals_total", stats.arrivals_total)
      .set("departures_total", stats.departures_total)
      .set("max_state_attempt_rate", stats.per_state_expected_G_max)
      .set("state_bound", stats.state_bound)
      .set("state_bound_violations", stats.state_bound_violations)
      .set("phase_histogram", stats.phase_histogram);
  return row;
}

// --- sweeps ----------------------------------------------------------------

SweepAxis parse_axis(const std::string& text) {
  if (text == "q") return SweepAxis::kQ;
  if (text == "lambda_hat" || text == "rate") return SweepAxis::kLambdaHat;
  if (text == "n") return SweepAxis::kN;
  if (text == "K") return SweepAxis::kK;
  throw std::invalid_argument("unknown sweep axis '" + text + "'");
}

std::vector<std::string> parse_grid(const std::string& text) {
  std::vector<std::string> out;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    std::string part;
    std::vector<double> v;
    while (std::getline(ss, part, ':')) v.push_back(std::stod(part));
    if (v.size() != 3 || !(v[2] > 0.0) || v[1] < v[0]) {
      throw std::invalid_argument("grid range must be start:stop:step with step > 0");
    }
    const auto count = static_cast<std::size_t>(std::floor((v[1] - v[0]) / v[2] + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(grid_value(v[0] + static_cast<double>(i) * v[2]));
  } else {
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  if (out.empty()) throw std::invalid_argument("sweep grid is empty");
  return out;
}

std::vector<std::string> sweep_columns(bool simulate) {
  auto cols = concat(kStampColumns, {"status", "axis", "axis_value"});
  cols = concat(cols, result_columns());
  if (simulate) cols = concat(cols, simulation_columns());
  return cols;
}

void run_sweep(const ExperimentSpec& spec, RowWriter& writer) {
  if (spec.grid.empty()) throw std::invalid_argument("sweep grid is empty");
  static const char* kAxisNames[] = {"q", "lambda_hat", "n", "K"};
  const std::string axis_name = kAxisNames[static_cast<int>(spec.axis)];

  auto point = [&](std::size_t i) {
    RunParameters p = spec.base;
    const std::string& value = spec.grid[i];
    Row row;
    row.set("axis", axis_name).set("axis_value", value);
    try {
      switch (spec.axis) {
        case SweepAxis::kQ:
          p.q = std::stod(value);
          break;
        case SweepAxis::kLambdaHat:
          p.lambda_hat = std::stod(value);
          break;
        case SweepAxis::kN:
          p.n = std::stoi(value);
          break;
        case SweepAxis::kK:
          p.cutoff = Cutoff::parse(value);
          break;
      }
      p.seed = spec.base.seed + i;
      const BackoffConfig config = p.backoff();
      config.validate();
      Row result = result_row(config);
      if (spec.simulate) {
        const SimConfig sc = p.sim_config();
        result.merge(simulation_row(sc, run(sc)));
      }
      row.set("status", std::string("ok")).merge(result);
    } catch (const std::exception& e) {
      row.set("status", std::string("error: ") + e.what());
    }
    return stamp(row, spec.base);
  };
  ordered_parallel_for(spec.grid.size(), spec.base.jobs, point, [&](const Row& r) { writer.write(r); });
}

void ordered_parallel_for(std::size_t count, unsigned jobs, const std::function<Row(std::size_t)>& fn,
                          const std::function<void(const Row&)>& sink) {
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) sink(fn(i));
    return;
  }
  std::deque<std::future<Row>> pending;
  std::size_t next = 0;
  while (next < count || !pending.empty()) {
    while (next < count && pending.size() < jobs) {
      pending.push_back(std::async(std::launch::async, fn, next));
      ++next;
    }
    sink(pending.front().get());
    pending.pop_front();
  }
}

// --- figures ---------------------------------------------------------------

namespace {

struct FigureContext {
  const std::string& id;
  const RunParameters& params;
  RowWriter& writer;

  void emit(Row row) const {
    Row r;
    r.set("figure", id);
    r.merge(row);
    writer.write(stamp(r, params));
  }
};

const std::vector<Cutoff> kGeoExp = {Cutoff::finite(1), Cutoff::unbounded()};

void require_equilibrium(double lambda_hat) {
  if (!(lambda_hat > 0.0 && lambda_hat <= kInvE)) {
    throw std::invalid_argument("figure needs an aggregate rate in (0, 1/e]");
  }
}

// Offered load vs q at p_L for several cutoffs.
void figure_rho(const FigureContext& ctx, int n, double lambda_hat, const std::vector<Cutoff>& cutoffs,
                bool within_region, bool simulate) {
  require_equilibrium(lambda_hat);
  const double lambda = lambda_hat / n;
  const double p_l = equilibrium_points(lambda_hat).p_large;
  for (const Cutoff& k : cutoffs) {
    std::vector<double> qs = linear_grid(0.01, 0.99, 99);
    if (within_region) {
      const Interval sl = absolute_stable_region(n, lambda_hat, k);
      if (sl.empty) continue;
      qs = linear_grid(sl.lo, sl.hi, 41);
    }
    for (double q : qs) {
      try {
        const double rho = offered_load(lambda, p_l, q, k);
        ctx.emit(Row()
                     .set("series", std::string("analytic"))
                     .set("n", static_cast<std::int64_t>(n))
                     .set("lambda_hat", lambda_hat)
                     .set("K", k.to_string())
                     .set("q", q)
                     .set("rho", rho));
      } catch (const NoStationaryDistribution&) {
      }
    }
  }
  if (!simulate) return;
  std::vector<std::pair<Cutoff, double>> points;
  for (const Cutoff& k : cutoffs) {
    const Interval sl = absolute_stable_region(n, lambda_hat, k);
    if (sl.empty) continue;
    for (int j = 1; j <= 5; ++j) points.emplace_back(k, sl.lo + (sl.hi - sl.lo) * j / 6.0);
  }
  ordered_parallel_for(
      points.size(), ctx.params.jobs,
      [&](std::size_t i) {
        RunParameters p = ctx.params;
        p.n = n;
        p.lambda_hat = lambda_hat;
        p.cutoff = points[i].first;
        p.q = points[i].second;
        p.seed = ctx.params.seed + i;
        const SimConfig sc = p.sim_config();
        const SimStats s = run(sc);
        return Row()
            .set("series", std::string("simulated"))
            .set("n", static_cast<std::int64_t>(n))
            .set("lambda_hat", lambda_hat)
            .set("K", p.cutoff.to_string())
            .set("q", p.q)
            .set("rho", offered_load(lambda_hat / n, p_l, p.q, p.cutoff))
            .set("measured_rho", s.measured_rho)
            .set("seed", s.seed)
            .set("slots", sc.total_slots);
      },
      [&](const Row& r) { ctx.emit(r); });
}

// Success probability, attempt rate and throughput at p_L across S_L.
void figure_16(const FigureContext& ctx) {
  constexpr int n = 10;
  constexpr double lambda_hat = 0.1;
  const double p_l = equilibrium_points(lambda_hat).p_large;
  std::vector<std::pair<Cutoff, double>> points;
  for (const Cutoff& k : kGeoExp) {
    const Interval sl = absolute_stable_region(n, lambda_hat, k);
    if (sl.empty) continue;
    for (double q : linear_grid(sl.lo, sl.hi, 41)) {
      ctx.emit(Row()
                   .set("series", std::string("analytic"))
                   .set("n", static_cast<std::int64_t>(n))
                   .set("lambda_hat", lambda_hat)
                   .set("K", k.to_string())
                   .set("q", q)
                   .set("p", p_l)
                   .set("G", attempt_rate(p_l))
                   .set("throughput", lambda_hat));
    }
    for (int j = 1; j <= 5; ++j) points.emplace_back(k, sl.lo + (sl.hi - sl.lo) * j / 6.0);
  }
  ordered_parallel_for(
      points.size(), ctx.params.jobs,
      [&](std::size_t i) {
        RunParameters p = ctx.params;
        p.n = n;
        p.lambda_hat = lambda_hat;
        p.cutoff = points[i].first;
        p.q = points[i].second;
        p.seed = ctx.params.seed + i;
        const SimConfig sc = p.sim_config();
        const SimStats s = run(sc);
        return Row()
            .set("series", std::string("simulated"))
            .set("n", static_cast<std::int64_t>(n))
            .set("lambda_hat", lambda_hat)
            .set("K", p.cutoff.to_string())
            .set("q", p.q)
            .set("p", s.measured_p)
            .set("G", s.measured_G)
            .set("throughput", s.measured_throughput)
            .set("seed", s.seed)
            .set("slots", sc.total_slots);
      },
      [&](const Row& r) { ctx.emit(r); });
}

// Operating point and throughput vs q from the classification.
void figure_operating(const FigureContext& ctx, int n, double lambda_hat, const std::vector<Cutoff>& cutoffs,
                      const std::vector<double>& qs, bool simulate) {
  for (const Cutoff& k : cutoffs) {
    for (double q : qs) {
      const auto config = BackoffConfig::from_aggregate(n, k, q, lambda_hat);
      const auto report = classify(config);
      const auto eq = equilibrium_points(lambda_hat);
      ctx.emit(Row()
                   .set("series", std::string("analytic"))
                   .set("n", static_cast<std::int64_t>(n))
                   .set("lambda_hat", lambda_hat)
                   .set("K", k.to_string())
                   .set("q", q)
                   .set("p_L", opt(eq.exists, eq.p_large))
                   .set("p_S", opt(eq.exists, eq.p_small))
                   .set("p_A", undesired_point(n, q, k).p)
                   .set("p", report.operating_point)
                   .set("throughput", report.predicted_throughput)
                   .set("classification", to_string(report.classification)));
    }
  }
  if (!simulate) return;
  std::vector<std::pair<Cutoff, double>> points;
  for (const Cutoff& k : cutoffs) {
    for (double q : linear_grid(0.05, 0.95, 10)) points.emplace_back(k, q);
  }
  ordered_parallel_for(
      points.size(), ctx.params.jobs,
      [&](std::size_t i) {
        RunParameters p = ctx.params;
        p.n = n;
        p.lambda_hat = lambda_hat;
        p.cutoff = points[i].first;
        p.q = points[i].second;
        p.seed = ctx.params.seed + i;
        const SimConfig sc = p.sim_config();
        const SimStats s = run(sc);
        return Row()
            .set("series", std::string("simulated"))
            .set("n", static_cast<std::int64_t>(n))
            .set("lambda_hat", lambda_hat)
            .set("K", p.cutoff.to_string())
            .set("q", p.q)
            .set("p", s.measured_p)
            .set("throughput", s.measured_throughput)
            .set("diverged", s.diverged)
            .set("seed", s.seed)
            .set("slots", sc.total_slots);
      },
      [&](const Row& r) { ctx.emit(r); });
}

// Absolute-stable region bounds vs aggregate rate.
void figure_absolute_region(const FigureContext& ctx, Cutoff k) {
  const int n = ctx.params.n;
  std::vector<double> rates = linear_grid(0.005, 0.365, 73);
  rates.push_back(kInvE);
  for (double lh : rates) {
    const Bound ql = q_lower(n, lh, k);
    const Bound qu = q_upper(n, lh);
    const Interval sl = absolute_stable_region(n, lh, k);
    ctx.emit(Row()
                 .set("series", std::string("region"))
                 .set("n", static_cast<std::int64_t>(n))
                 .set("K", k.to_string())
                 .set("lambda_hat", lh)
                 .set("q_l", opt(ql.defined, ql.value))
                 .set("q_u", opt(qu.defined, qu.value))
                 .set("region_empty", sl.empty));
  }
  const auto m = max_stable_throughput(n, k, RegionKind::kAbsolute);
  ctx.emit(Row()
               .set("series", std::string("max_stable"))
               .set("n", static_cast<std::int64_t>(n))
               .set("K", k.to_string())
               .set("lambda_hat", opt(m.found, m.lambda_hat))
               .set("q_star", opt(m.found, m.q_star)));
  if (k.is_unbounded()) {
    ctx.emit(Row()
                 .set("series", std::string("beb_half"))
                 .set("n", static_cast<std::int64_t>(n))
                 .set("K", k.to_string())
                 .set("lambda_hat", 0.5 * n * std::exp(-n / 2.0))
                 .set("q_star", 0.5));
  }
}

void figure_13(const FigureContext& ctx) {
  const int n = ctx.params.n;
  const Cutoff k = Cutoff::unbounded();
  std::vector<double> rates = linear_grid(0.005, 0.365, 73);
  rates.push_back(kInvE);
  for (double lh : rates) {
    const Interval sl = absolute_stable_region(n, lh, k);
    const Interval sa = quasi_stable_region(n, lh, k);
    const auto pieces = complete_stable_region(n, lh, k);
    const bool half_in =
        std::any_of(pieces.begin(), pieces.end(), [](const Interval& r) { return r.contains(0.5); });
    ctx.emit(Row()
                 .set("series", std::string("region"))
                 .set("n", static_cast<std::int64_t>(n))
                 .set("K", k.to_string())
                 .set("lambda_hat", lh)
                 .set("S_L_lo", opt(!sl.empty, sl.lo))
                 .set("S_L_hi", opt(!sl.empty, sl.hi))
                 .set("S_A_lo", opt(!sa.empty, sa.lo))
                 .set("S_A_hi", opt(!sa.empty, sa.hi))
                 .set("beb_in_region", half_in));
  }
  for (RegionKind kind : {RegionKind::kAbsolute, RegionKind::kQuasi}) {
    const auto m = max_stable_throughput(n, k, kind);
    ctx.emit(Row()
                 .set("series", "max_" + to_string(kind))
                 .set("n", static_cast<std::int64_t>(n))
                 .set("K", k.to_string())
                 .set("lambda_hat", opt(m.found, m.lambda_hat))
                 .set("q_star", opt(m.found, m.q_star)));
  }
}

void table_1(const FigureContext& ctx) {
  const int n = ctx.params.n;
  const double lh = ctx.params.lambda_hat;
  for (const Cutoff& k : kGeoExp) {
    for (RegionKind kind : {RegionKind::kAbsolute, RegionKind::kQuasi, RegionKind::kComplete}) {
      std::vector<Interval> pieces;
      if (kind == RegionKind::kAbsolute) pieces = {absolute_stable_region(n, lh, k)};
      if (kind == RegionKind::kQuasi) pieces = {quasi_stable_region(n, lh, k)};
      if (kind == RegionKind::kComplete) pieces = complete_stable_region(n, lh, k);
      std::erase_if(pieces, [](const Interval& r) { return r.empty; });
      const auto m = max_stable_throughput(n, k, kind);
      ctx.emit(Row()
                   .set("n", static_cast<std::int64_t>(n))
                   .set("lambda_hat", lh)
                   .set("K", k.to_string())
                   .set("region_kind", to_string(kind))
                   .set("region", union_text(pieces))
                   .set("region_lo", opt(!pieces.empty(), pieces.empty() ? 0.0 : pieces.front().lo))
                   .set("region_hi", opt(!pieces.empty(), pieces.empty() ? 0.0 : pieces.back().hi))
                   .set("max_stable_throughput", opt(m.found, m.lambda_hat))
                   .set("q_star", opt(m.found, m.q_star)));
    }
  }
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"fig6",  "fig7",  "fig8",  "fig11", "fig12", "fig13",
                                               "fig14", "fig15", "fig16", "fig17", "fig18", "tableI"};
  return ids;
}

std::vector<std::string> figure_columns(const std::string& id) {
  std::vector<std::string> base = concat(kStampColumns, {"figure"});
  if (id == "fig6") return concat(base, {"series", "n", "lambda_hat", "K", "q", "rho"});
  if (id == "fig7" || id == "fig8") {
    return concat(base, {"series", "n", "K", "lambda_hat", "q_l", "q_u", "region_empty", "q_star"});
  }
  if (id == "fig11" || id == "fig12" || id == "fig14" || id == "fig17" || id == "fig18") {
    return concat(base, {"series", "n", "lambda_hat", "K", "q", "p_L", "p_S", "p_A", "p", "throughput",
                         "classification", "diverged", "seed", "slots"});
  }
  if (id == "fig13") {
    return concat(base, {"series", "n", "K", "lambda_hat", "S_L_lo", "S_L_hi", "S_A_lo", "S_A_hi", "beb_in_region",
                         "q_star"});
  }
  if (id == "fig15") return concat(base, {"series", "n", "lambda_hat", "K", "q", "rho", "measured_rho", "seed", "slots"});
  if (id == "fig16") {
    return concat(base, {"series", "n", "lambda_hat", "K", "q", "p", "G", "throughput", "seed", "slots"});
  }
  if (id == "tableI") {
    return concat(base, {"n", "lambda_hat", "K", "region_kind", "region", "region_lo", "region_hi",
                         "max_stable_throughput", "q_star"});
  }
  throw std::invalid_argument("unknown figure id '" + id + "'");
}

void run_figure(const std::string& id, const RunParameters& params, RowWriter& writer) {
  const FigureContext ctx{id, params, writer};
  const std::vector<Cutoff> rho_cutoffs = {Cutoff::finite(1), Cutoff::finite(2), Cutoff::finite(4),
                                           Cutoff::finite(8), Cutoff::unbounded()};
  if (id == "fig6") {
    figure_rho(ctx, params.n, params.lambda_hat, rho_cutoffs, false, false);
  } else if (id == "fig7") {
    figure_absolute_region(ctx, Cutoff::finite(1));
  } else if (id == "fig8") {
    figure_absolute_region(ctx, Cutoff::unbounded());
  } else if (id == "fig11" || id == "fig12") {
    figure_operating(ctx, params.n, params.lambda_hat, {Cutoff::finite(1)}, log_grid(1e-3, 0.99, 100), false);
  } else if (id == "fig13") {
    figure_13(ctx);
  } else if (id == "fig14") {
    figure_operating(ctx, params.n, params.lambda_hat, {Cutoff::unbounded()}, linear_grid(0.01, 0.99, 99), false);
  } else if (id == "fig15") {
    figure_rho(ctx, 10, 0.1, {Cutoff::finite(1), Cutoff::finite(2), Cutoff::finite(4), Cutoff::unbounded()}, true,
               true);
  } else if (id == "fig16") {
    figure_16(ctx);
  } else if (id == "fig17" || id == "fig18") {
    figure_operating(ctx, 50, 0.3, kGeoExp, linear_grid(0.01, 0.99, 99), true);
  } else if (id == "tableI") {
    table_1(ctx);
  } else {
    throw std::invalid_argument("unknown figure id '" + id + "'");
  }
}

}  // namespace aloha
