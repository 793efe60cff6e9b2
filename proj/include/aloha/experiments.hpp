#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aloha/equilibrium.hpp"
#include "aloha/rows.hpp"
#include "aloha/simulator.hpp"

namespace aloha {

/// Parameters shared by every command.
struct RunParameters {
  int n = 50;
  double lambda_hat = 0.3;
  double q = 0.5;
  Cutoff cutoff = Cutoff::unbounded();
  std::uint64_t slots = 1'000'000;
  std::uint64_t warmup = 200'000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  /// Blank timestamp column when true.
  bool reproducible = false;
  std::string timestamp;  // filled by the CLI unless reproducible

  [[nodiscard]] BackoffConfig backoff() const { return BackoffConfig::from_aggregate(n, cutoff, q, lambda_hat); }
  [[nodiscard]] SimConfig sim_config() const;
};

/// Columns of the analytic summary (`analyze`).
std::vector<std::string> analyze_columns();
Row analyze_row(const RunParameters& params);

/// Columns of the region summary (`region`).
std::vector<std::string> region_columns();
Row region_row(const RunParameters& params);

/// Analytic result columns: inputs, equilibrium points, bounds, regions,
/// classification, predicted throughput.
std::vector<std::string> result_columns();
Row result_row(const BackoffConfig& config);

/// Simulation columns appended to result rows.
std::vector<std::string> simulation_columns();
Row simulation_row(const SimConfig& config, const SimStats& stats);

/// Stamps schema_version and generated_at onto a row.
Row stamp(Row row, const RunParameters& params);

enum class SweepAxis { kQ, kLambdaHat, kN, kK };
SweepAxis parse_axis(const std::string& text);

/// One sweep: a base configuration plus one axis and its grid.
struct ExperimentSpec {
  RunParameters base;
  SweepAxis axis = SweepAxis::kQ;
  std::vector<std::string> grid;  // textual values; "inf" allowed for K
  bool simulate = false;
};

/// Parses "a:b:step" or a comma list into grid values.
std::vector<std::string> parse_grid(const std::string& text);

/// Writes one row per grid point in grid order. Errors at a point land in
/// the status column and the sweep continues.
void run_sweep(const ExperimentSpec& spec, RowWriter& writer);

/// Column set for a sweep's rows.
std::vector<std::string> sweep_columns(bool simulate);

/// Figure identifiers accepted by run_figure.
const std::vector<std::string>& figure_ids();
std::vector<std::string> figure_columns(const std::string& id);
/// Emits the dataset for one figure or table. Throws std::invalid_argument
/// for an unknown id.
void run_figure(const std::string& id, const RunParameters& params, RowWriter& writer);

/// Runs fn(0..count-1) on up to `jobs` threads and hands results to sink in
/// index order.
void ordered_parallel_for(std::size_t count, unsigned jobs, const std::function<Row(std::size_t)>& fn,
                          const std::function<void(const Row&)>& sink);

}  // namespace aloha
