#include "aloha/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aloha/errors.hpp"
#include "aloha/experiments.hpp"

namespace aloha {
namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Options {
  RunParameters params;
  std::string cutoff = "inf";
  std::string out_path;
  std::string format = "csv";
  std::string axis = "q";
  std::string grid;
  bool simulate = false;
  std::string figure;
};

void add_model_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--n", o.params.n, "number of nodes")->capture_default_str();
  cmd->add_option("--rate", o.params.lambda_hat, "aggregate arrival rate")->capture_default_str();
  cmd->add_option("--q", o.params.q, "retransmission factor")->capture_default_str();
  cmd->add_option("--K", o.cutoff, "cutoff phase, integer or inf")->capture_default_str();
}

void add_output_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out_path, "output file (default stdout)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmd->add_flag("--reproducible", o.params.reproducible, "leave the generated_at column blank");
}

void add_sim_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--slots", o.params.slots, "total slots")->capture_default_str();
  cmd->add_option("--warmup", o.params.warmup, "warmup slots")->capture_default_str();
  cmd->add_option("--seed", o.params.seed, "base seed")->capture_default_str();
}

void add_jobs_option(CLI::App* cmd, Options& o) {
  cmd->add_option("--jobs", o.params.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stability analysis and simulation of buffered slotted Aloha with K-exponential backoff", "aloha"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "equilibrium points, offered load and phase distribution");
  auto* region = app.add_subcommand("region", "stable regions in q and maximum stable throughput");
  auto* classify_cmd = app.add_subcommand("classify", "stability class and predicted throughput");
  auto* simulate = app.add_subcommand("simulate", "run the slot-level simulator");
  auto* sweep = app.add_subcommand("sweep", "evaluate a grid over one parameter");
  auto* figure = app.add_subcommand("figure", "emit the dataset behind a figure or table");

  for (auto* cmd : {analyze, region, classify_cmd, simulate, sweep, figure}) {
    add_model_options(cmd, o);
    add_output_options(cmd, o);
  }
  for (auto* cmd : {simulate, sweep, figure}) add_sim_options(cmd, o);
  for (auto* cmd : {sweep, figure}) add_jobs_option(cmd, o);
  sweep->add_option("--axis", o.axis, "q, lambda_hat, n or K")->capture_default_str();
  sweep->add_option("--grid", o.grid, "start:stop:step or comma list")->required();
  sweep->add_flag("--simulate", o.simulate, "also simulate each grid point");
  figure->add_option("id", o.figure, "figure id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    o.params.cutoff = Cutoff::parse(o.cutoff);
    if (!o.params.reproducible) o.params.timestamp = utc_timestamp();
    const Format format = parse_format(o.format);

    std::ofstream file;
    if (!o.out_path.empty()) {
      file.open(o.out_path);
      if (!file) throw std::invalid_argument("cannot open output file '" + o.out_path + "'");
    }
    std::ostream& sink = o.out_path.empty() ? out : file;
    const std::vector<std::string> stamp_cols = {"schema_version", "generated_at"};

    std::unique_ptr<RowWriter> writer;
    if (analyze->parsed()) {
      const Row row = analyze_row(o.params);
      writer = make_writer(format, sink, analyze_columns());
      writer->write(row);
    } else if (region->parsed()) {
      const Row row = region_row(o.params);
      writer = make_writer(format, sink, region_columns());
      writer->write(row);
    } else if (classify_cmd->parsed()) {
      const BackoffConfig config = o.params.backoff();
      config.validate();
      const Row row = stamp(result_row(config), o.params);
      writer = make_writer(format, sink, concat(stamp_cols, result_columns()));
      writer->write(row);
    } else if (simulate->parsed()) {
      const SimConfig sc = o.params.sim_config();
      sc.validate();
      Row row = result_row(sc.backoff);
      row.merge(simulation_row(sc, run(sc)));
      writer = make_writer(format, sink, concat(concat(stamp_cols, result_columns()), simulation_columns()));
      writer->write(stamp(row, o.params));
    } else if (sweep->parsed()) {
      ExperimentSpec spec;
      spec.base = o.params;
      spec.axis = parse_axis(o.axis);
      spec.grid = parse_grid(o.grid);
      spec.simulate = o.simulate;
      writer = make_writer(format, sink, sweep_columns(o.simulate));
      run_sweep(spec, *writer);
    } else if (figure->parsed()) {
      writer = make_writer(format, sink, figure_columns(o.figure));
      run_figure(o.figure, o.params, *writer);
    }
    if (writer) writer->finish();
    return kExitOk;
  } catch (const BracketingFailure& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: value out of range: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace aloha
