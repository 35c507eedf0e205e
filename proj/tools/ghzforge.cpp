// Command-line front end: training runs, batches, histograms, iteration
// trajectories, and parameter sweeps over the bundled or trained records.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ghzforge/experiments.hpp"

namespace fs = std::filesystem;
using namespace ghzforge;

namespace {

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + out_path);
}

RecordFile record_from_training(const TrainRecord& trained) {
  RecordFile record;
  record.mode_k = trained.config.mode_k;
  record.seed = trained.config.seed;
  record.ansatz_convention_tag = trained.ansatz_convention_tag;
  record.theta = trained.theta_final;
  record.fidelity_history = trained.fidelity_history;
  record.test_results.emplace_back(
      kTestInputSpec,
      evaluate(trained.theta_final, parse_input_spec(kTestInputSpec), trained.config.mode_k));
  return record;
}

void warn_odd_steps(const RecordFile& record, int steps) {
  if (record.mode_k == 2 && steps % 2 != 0)
    std::cerr << "note: record was trained for pairs of iterations; "
              << "odd step count " << steps << " lands mid-cycle\n";
}

int cmd_train(int mode, int cycles, std::uint64_t seed, const std::string& out) {
  TrainerConfig config;
  config.mode_k = mode;
  config.cycles = cycles;
  config.seed = seed;
  const TrainRecord trained = train(config);
  const RecordFile record = record_from_training(trained);
  save_record(record, out);
  std::cout << "wrote " << out << " (test " << kTestInputSpec << " -> "
            << record.test_results[0].second << ")\n";
  return 0;
}

int cmd_batch(int mode, int cycles, std::uint64_t seed, int runs, int jobs,
              const std::string& out_dir) {
  TrainerConfig config;
  config.mode_k = mode;
  config.cycles = cycles;
  config.seed = seed;
  const BatchResult batch = run_batch(config, runs, jobs);

  fs::create_directories(out_dir);
  int failures = 0;
  for (std::size_t i = 0; i < batch.runs.size(); ++i) {
    const BatchRunResult& run = batch.runs[i];
    if (!run.ok) {
      std::cerr << "run " << i << " failed: " << run.error << "\n";
      ++failures;
      continue;
    }
    char name[32];
    std::snprintf(name, sizeof name, "run_%04zu.json", i);
    save_record(run.record, (fs::path(out_dir) / name).string());
  }
  const std::string summary = format_batch_summary(batch);
  write_text(summary, (fs::path(out_dir) / "summary.csv").string());
  std::cout << "wrote " << batch.runs.size() - std::size_t(failures) << " records to " << out_dir
            << "; fraction above " << kReferenceFidelity << ": " << batch.fraction_above()
            << "\n";
  return failures == 0 ? 0 : 1;
}

int cmd_histogram(const std::string& records_dir, int bins, const std::string& out) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(records_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  if (files.empty())
    throw std::runtime_error("no record files (*.json) in directory: " + records_dir);
  std::sort(files.begin(), files.end());

  std::vector<double> values;
  std::string tag;
  for (const fs::path& file : files) {
    const RecordFile record = load_record(file.string());
    if (tag.empty()) tag = record.ansatz_convention_tag;
    values.push_back(record_test_fidelity(record));
  }
  write_text(format_histogram_csv(make_histogram(values, bins), tag), out);
  return 0;
}

int cmd_iterate(const std::string& record_name, const std::string& input_spec, int steps,
                const std::string& out) {
  const RecordFile record = resolve_record(record_name);
  warn_odd_steps(record, steps);
  const ComplexMatrix unitary = build_unitary(record.theta);
  const DensityMatrix3Q input = realize_input(parse_input_spec(input_spec));
  try {
    const Trajectory trajectory = iterate(unitary, input, steps);
    write_text(format_trajectory_csv(trajectory, std::nullopt, record.ansatz_convention_tag),
               out);
    return 0;
  } catch (const DegenerateOutcome& e) {
    const Trajectory prefix = iterate(unitary, input, e.iteration() - 1);
    write_text(format_trajectory_csv(prefix, e.iteration(), record.ansatz_convention_tag), out);
    std::cerr << "error: " << e.what() << "; wrote partial trajectory\n";
    return 1;
  }
}

int cmd_sweep(const std::string& axis_arg, const std::string& record_name,
              const std::string& grid_arg, int steps, const std::string& input_spec,
              const std::string& out) {
  const RecordFile record = resolve_record(record_name);
  const SweepAxis axis = parse_axis(axis_arg);
  const GridSpec grid = parse_grid(grid_arg);
  warn_odd_steps(record, steps);

  std::size_t basis_bits = 3;  // "011" unless --input overrides
  if (!input_spec.empty()) {
    const InputSpec parsed = parse_input_spec(input_spec);
    if (axis == SweepAxis::EpsBasis) {
      if (const auto* basis = std::get_if<BasisErrorSpec>(&parsed))
        basis_bits = basis->basis;
      else
        throw std::invalid_argument("eps-basis sweep needs a basis:<bbb>:<eps> input spec");
    } else {
      std::cerr << "note: --input is only consulted for the eps-basis axis\n";
    }
  }

  const SweepOutcome outcome = run_sweep(record, axis, grid, steps, basis_bits);
  write_text(format_sweep_csv(outcome, record.ansatz_convention_tag), out);
  return 0;
}

int cmd_fixtures() {
  for (const std::string& name : list_fixtures()) {
    const RecordFile record = fixture_record(name);
    std::cout << name << " mode_k=" << record.mode_k << " tag=" << record.ansatz_convention_tag
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iterated GHZ distillation protocols: training and analysis"};
  app.require_subcommand(1);

  int mode = 1, cycles = 150, runs = 100, steps = 1, bins = 40;
  int jobs = int(std::max(1u, std::thread::hardware_concurrency()));
  std::uint64_t seed = 0;
  std::string out, records, input, grid, axis;

  CLI::App* train_cmd = app.add_subcommand("train", "run one training and save the record");
  train_cmd->add_option("--mode", mode, "iterations inside the cost")->default_val(1);
  train_cmd->add_option("--cycles", cycles, "optimization cycles")->default_val(150);
  train_cmd->add_option("--seed", seed, "RNG seed")->default_val(0);
  train_cmd->add_option("--out", out, "record file to write")->required();

  CLI::App* batch_cmd = app.add_subcommand("batch", "run many independent seeded trainings");
  batch_cmd->add_option("--mode", mode, "iterations inside the cost")->default_val(1);
  batch_cmd->add_option("--cycles", cycles, "optimization cycles")->default_val(150);
  batch_cmd->add_option("--seed", seed, "master seed")->default_val(0);
  batch_cmd->add_option("--runs", runs, "number of trainings")->default_val(100);
  batch_cmd->add_option("--jobs", jobs, "worker threads");
  batch_cmd->add_option("--out", out, "output directory")->required();

  CLI::App* hist_cmd = app.add_subcommand("histogram", "bin test fidelities of saved records");
  hist_cmd->add_option("--records", records, "directory of record files")->required();
  hist_cmd->add_option("--bins", bins, "bin count over [0,1]")->default_val(40);
  hist_cmd->add_option("--out", out, "CSV path (default stdout)");

  CLI::App* iter_cmd = app.add_subcommand("iterate", "trace fidelity over protocol iterations");
  iter_cmd->add_option("--records", records, "record file or fixture name")->required();
  iter_cmd->add_option("--input", input, "input spec, e.g. white:0.1")->required();
  iter_cmd->add_option("--steps", steps, "iteration count")->default_val(1);
  iter_cmd->add_option("--out", out, "CSV path (default stdout)");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "sweep an input parameter on a grid");
  sweep_cmd->add_option("axis", axis, "lambda | eps-basis | eps-ghzlike")->required();
  sweep_cmd->add_option("--records", records, "record file or fixture name")->required();
  sweep_cmd->add_option("--grid", grid, "start:stop:step")->required();
  sweep_cmd->add_option("--steps", steps, "iterations per grid point")->default_val(1);
  sweep_cmd->add_option("--input", input, "basis family for eps-basis, e.g. basis:011:0");
  sweep_cmd->add_option("--out", out, "CSV path (default stdout)");

  CLI::App* fixtures_cmd = app.add_subcommand("fixtures", "list bundled records");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return cmd_train(mode, cycles, seed, out);
    if (batch_cmd->parsed()) return cmd_batch(mode, cycles, seed, runs, jobs, out);
    if (hist_cmd->parsed()) return cmd_histogram(records, bins, out);
    if (iter_cmd->parsed()) return cmd_iterate(records, input, steps, out);
    if (sweep_cmd->parsed()) return cmd_sweep(axis, records, grid, steps, input, out);
    if (fixtures_cmd->parsed()) return cmd_fixtures();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
