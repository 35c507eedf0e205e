#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ghzforge/record.hpp"

namespace ghzforge {

inline constexpr double kReferenceFidelity = 0.9125;  // white:0.1 input fidelity
inline const char* kTestInputSpec = "white:0.1";

namespace detail {

// Shortest digits that reparse to the same double; keeps plot data exact
// without burying round values in trailing digits.
inline std::string csv_double(double v) { return format_decimal(v); }

}  // namespace detail

// Fidelity a record claims (or earns) on the standard white:0.1 probe.
inline double record_test_fidelity(const RecordFile& record) {
  for (const auto& [key, value] : record.test_results)
    if (key == kTestInputSpec) return value;
  return evaluate(record.theta, parse_input_spec(kTestInputSpec), record.mode_k);
}

struct BatchRunResult {
  std::uint64_t run_seed = 0;
  bool ok = false;
  std::string error;
  RecordFile record;
  double test_fidelity = std::numeric_limits<double>::quiet_NaN();
};

struct BatchResult {
  TrainerConfig base_config;
  std::vector<BatchRunResult> runs;

  double fraction_above(double reference = kReferenceFidelity) const {
    if (runs.empty()) return 0.0;
    std::size_t above = 0;
    for (const BatchRunResult& r : runs)
      if (r.ok && r.test_fidelity > reference) ++above;
    return double(above) / double(runs.size());
  }

  // Index of the highest-scoring successful run, -1 if every run failed.
  int best_index() const {
    int best = -1;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (!runs[i].ok) continue;
      if (best < 0 || runs[i].test_fidelity > runs[best].test_fidelity) best = int(i);
    }
    return best;
  }
};

// Independent seeded trainings. Each run's stream depends only on
// (master seed, run index), so the result set is identical for any job count;
// workers claim indices from a shared counter and write disjoint slots.
inline BatchResult run_batch(const TrainerConfig& base, int runs, int jobs) {
  base.validate();
  if (runs < 1) throw std::invalid_argument("run_batch: runs must be at least 1");
  if (jobs < 1) throw std::invalid_argument("run_batch: jobs must be at least 1");

  BatchResult result;
  result.base_config = base;
  result.runs.resize(std::size_t(runs));

  std::atomic<int> next{0};
  const auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= runs) return;
      BatchRunResult& slot = result.runs[std::size_t(i)];
      slot.run_seed = derive_run_seed(base.seed, std::uint64_t(i));
      try {
        TrainerConfig config = base;
        config.seed = slot.run_seed;
        const TrainRecord trained = train(config);
        slot.record.mode_k = config.mode_k;
        slot.record.seed = config.seed;
        slot.record.ansatz_convention_tag = trained.ansatz_convention_tag;
        slot.record.theta = trained.theta_final;
        slot.record.fidelity_history = trained.fidelity_history;
        slot.test_fidelity =
            evaluate(trained.theta_final, parse_input_spec(kTestInputSpec), config.mode_k);
        slot.record.test_results.emplace_back(kTestInputSpec, slot.test_fidelity);
        slot.ok = true;
      } catch (const std::exception& e) {
        slot.ok = false;
        slot.error = e.what();
      }
    }
  };

  std::vector<std::thread> pool;
  const int spawn = std::min(jobs, runs);
  pool.reserve(std::size_t(spawn));
  for (int j = 0; j < spawn; ++j) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return result;
}

// Summary text is assembled after the join, in run order, so its bytes do not
// depend on the job count.
inline std::string format_batch_summary(const BatchResult& batch) {
  std::ostringstream out;
  out << "# schema_version: " << kRecordSchemaVersion << "\n";
  out << "# ansatz_convention_tag: " << kAnsatzConventionTag << "\n";
  out << "# mode_k: " << batch.base_config.mode_k << "\n";
  out << "# master_seed: " << batch.base_config.seed << "\n";
  out << "# runs: " << batch.runs.size() << "\n";
  out << "# test_input: " << kTestInputSpec << "\n";
  out << "# reference_fidelity: " << detail::csv_double(kReferenceFidelity) << "\n";
  out << "# fraction_above_reference: " << detail::csv_double(batch.fraction_above()) << "\n";
  out << "run,seed,status,test_fidelity\n";
  for (std::size_t i = 0; i < batch.runs.size(); ++i) {
    const BatchRunResult& r = batch.runs[i];
    out << i << "," << r.run_seed << "," << (r.ok ? "ok" : "error") << ",";
    out << (r.ok ? detail::csv_double(r.test_fidelity) : "nan");
    out << "\n";
  }
  return out.str();
}

struct Histogram {
  int bins = 40;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;
  std::size_t total = 0;
};

inline Histogram make_histogram(const std::vector<double>& values, int bins, double lo = 0.0,
                                double hi = 1.0) {
  if (bins < 1) throw std::invalid_argument("make_histogram: bins must be at least 1");
  if (!(lo < hi)) throw std::invalid_argument("make_histogram: empty range");
  Histogram h;
  h.bins = bins;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(std::size_t(bins), 0);
  // Bins close on the right: a value sitting exactly on an interior edge
  // belongs to the bin below it; lo itself belongs to the first bin.
  for (double v : values) {
    const double t = (v - lo) / (hi - lo);
    int idx = int(std::ceil(t * bins)) - 1;
    if (idx < 0) idx = 0;
    if (idx >= bins) idx = bins - 1;
    ++h.counts[std::size_t(idx)];
    ++h.total;
  }
  return h;
}

inline std::string format_histogram_csv(const Histogram& h, const std::string& tag) {
  std::ostringstream out;
  out << "# schema_version: " << kRecordSchemaVersion << "\n";
  out << "# ansatz_convention_tag: " << tag << "\n";
  out << "# reference_fidelity: " << detail::csv_double(kReferenceFidelity) << "\n";
  out << "# total: " << h.total << "\n";
  out << "bin_left,bin_right,count\n";
  for (int i = 0; i < h.bins; ++i) {
    const double left = h.lo + (h.hi - h.lo) * double(i) / double(h.bins);
    const double right = h.lo + (h.hi - h.lo) * double(i + 1) / double(h.bins);
    out << detail::csv_double(left) << "," << detail::csv_double(right) << ","
        << h.counts[std::size_t(i)] << "\n";
  }
  return out.str();
}

// Copies of the raw input a k-fold iteration consumes; exact in a double for
// every supported step count.
inline double copies_consumed(int iteration) { return std::ldexp(1.0, iteration); }

inline std::string format_trajectory_csv(const Trajectory& trajectory,
                                         std::optional<int> degenerate_at,
                                         const std::string& tag) {
  std::ostringstream out;
  out << "# schema_version: " << kRecordSchemaVersion << "\n";
  out << "# ansatz_convention_tag: " << tag << "\n";
  if (degenerate_at) out << "# degenerate_at_iteration: " << *degenerate_at << "\n";
  out << "iteration,fidelity,success_prob,copies_consumed\n";
  for (const TrajectoryEntry& e : trajectory) {
    char copies[32];
    std::snprintf(copies, sizeof copies, "%.0f", copies_consumed(e.iteration));
    out << e.iteration << "," << detail::csv_double(e.fidelity) << ","
        << detail::csv_double(e.success_prob) << "," << copies << "\n";
  }
  return out.str();
}

enum class SweepAxis { Lambda, EpsBasis, EpsGhzlike };

inline SweepAxis parse_axis(const std::string& name) {
  if (name == "lambda") return SweepAxis::Lambda;
  if (name == "eps-basis") return SweepAxis::EpsBasis;
  if (name == "eps-ghzlike") return SweepAxis::EpsGhzlike;
  throw std::invalid_argument("unknown sweep axis: " + name +
                              " (expected lambda, eps-basis, or eps-ghzlike)");
}

inline const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Lambda: return "lambda";
    case SweepAxis::EpsBasis: return "eps-basis";
    default: return "eps-ghzlike";
  }
}

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  std::vector<double> points() const {
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (stop < start) throw std::invalid_argument("grid stop precedes start");
    std::vector<double> xs;
    for (int i = 0;; ++i) {
      double x = start + step * i;
      if (x > stop + step * 1e-9) break;
      if (x > stop) x = stop;  // accumulated rounding must not leave the range
      xs.push_back(x);
    }
    if (xs.empty()) throw std::invalid_argument("empty grid");
    return xs;
  }
};

inline GridSpec parse_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = text.find(':', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw std::invalid_argument("grid spec must look like start:stop:step, got: " + text);
  GridSpec grid;
  grid.start = detail::parse_decimal(text.substr(0, first), "grid start");
  grid.stop = detail::parse_decimal(text.substr(first + 1, second - first - 1), "grid stop");
  grid.step = detail::parse_decimal(text.substr(second + 1), "grid step");
  grid.points();  // validates
  return grid;
}

struct SweepPoint {
  double x = 0.0;
  bool degenerate = false;
  int degenerate_iteration = -1;
  double input_fidelity = std::numeric_limits<double>::quiet_NaN();
  double output_fidelity = std::numeric_limits<double>::quiet_NaN();
  double success_prob = std::numeric_limits<double>::quiet_NaN();
};

struct SweepThreshold {
  double value = 0.0;
  bool upward = false;   // true: improvement begins above the crossing
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

struct SweepOutcome {
  SweepAxis axis = SweepAxis::Lambda;
  int steps = 0;
  std::vector<SweepPoint> points;
  std::optional<SweepThreshold> threshold;
};

inline InputSpec sweep_input(SweepAxis axis, double x, std::size_t basis_bits) {
  switch (axis) {
    case SweepAxis::Lambda: return WhiteNoiseSpec{x};
    case SweepAxis::EpsBasis: return BasisErrorSpec{basis_bits, x};
    default: return GhzLikeSpec{x};
  }
}

// Sweeps the chosen input-family parameter, iterating the record's unitary a
// fixed number of steps per point. The improvement threshold is the sign
// change of (output - input) fidelity, bisected to 1e-3; a degenerate
// evaluation counts as "no improvement".
inline SweepOutcome run_sweep(const RecordFile& record, SweepAxis axis, const GridSpec& grid,
                              int steps, std::size_t basis_bits = 3) {
  const ComplexMatrix unitary = build_unitary(record.theta);

  const auto improvement = [&](double x) -> std::optional<double> {
    const DensityMatrix3Q input = realize_input(sweep_input(axis, x, basis_bits));
    const double before = fidelity_to_ghz(input);
    try {
      const Trajectory t = iterate(unitary, input, steps);
      return t.back().fidelity - before;
    } catch (const DegenerateOutcome&) {
      return std::nullopt;
    }
  };

  SweepOutcome outcome;
  outcome.axis = axis;
  outcome.steps = steps;
  for (double x : grid.points()) {
    SweepPoint point;
    point.x = x;
    const DensityMatrix3Q input = realize_input(sweep_input(axis, x, basis_bits));
    point.input_fidelity = fidelity_to_ghz(input);
    try {
      const Trajectory t = iterate(unitary, input, steps);
      point.output_fidelity = t.back().fidelity;
      point.success_prob = t.back().success_prob;
    } catch (const DegenerateOutcome& e) {
      point.degenerate = true;
      point.degenerate_iteration = e.iteration();
    }
    outcome.points.push_back(point);
  }

  // Bracket the first adjacent pair whose improvement changes sign. Degenerate
  // points count as negative; a dead zone keeps rounding noise around an
  // exactly-neutral map from faking a crossing.
  const auto improvement_sign = [&](const SweepPoint& p) {
    if (p.degenerate) return -1;
    const double g = p.output_fidelity - p.input_fidelity;
    if (g > 1e-9) return 1;
    if (g < -1e-9) return -1;
    return 0;
  };
  for (std::size_t i = 0; i + 1 < outcome.points.size(); ++i) {
    if (improvement_sign(outcome.points[i]) * improvement_sign(outcome.points[i + 1]) != -1)
      continue;
    const double a = improvement_sign(outcome.points[i]) < 0 ? -1.0 : 1.0;
    double lo = outcome.points[i].x, hi = outcome.points[i + 1].x;
    double flo = a;
    while (hi - lo > 1e-3) {
      const double mid = 0.5 * (lo + hi);
      const std::optional<double> g = improvement(mid);
      const double fmid = g ? *g : -1.0;
      if ((flo < 0.0) == (fmid < 0.0)) {
        lo = mid;
        flo = fmid;
      } else {
        hi = mid;
      }
    }
    SweepThreshold threshold;
    threshold.bracket_lo = lo;
    threshold.bracket_hi = hi;
    threshold.value = 0.5 * (lo + hi);
    threshold.upward = a < 0.0;
    outcome.threshold = threshold;
    break;
  }
  return outcome;
}

inline std::string format_sweep_csv(const SweepOutcome& outcome, const std::string& tag) {
  std::ostringstream out;
  out << "# schema_version: " << kRecordSchemaVersion << "\n";
  out << "# ansatz_convention_tag: " << tag << "\n";
  out << "# axis: " << axis_name(outcome.axis) << "\n";
  out << "# steps: " << outcome.steps << "\n";
  if (outcome.threshold) {
    const char* key = outcome.axis == SweepAxis::Lambda ? "lambda_crit" : "eps_thresh";
    out << "# " << key << ": " << detail::csv_double(outcome.threshold->value) << "\n";
    out << "# threshold_direction: "
        << (outcome.threshold->upward ? "improves-above" : "improves-below") << "\n";
  }
  out << "axis_value,input_fidelity,output_fidelity,success_prob,degenerate\n";
  for (const SweepPoint& p : outcome.points) {
    out << detail::csv_double(p.x) << "," << detail::csv_double(p.input_fidelity) << ",";
    if (p.degenerate) {
      out << "nan,nan,1\n";
    } else {
      out << detail::csv_double(p.output_fidelity) << "," << detail::csv_double(p.success_prob)
          << ",0\n";
    }
  }
  return out.str();
}

}  // namespace ghzforge
