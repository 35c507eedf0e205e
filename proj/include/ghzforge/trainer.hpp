#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ghzforge/ansatz.hpp"
#include "ghzforge/protocol.hpp"
#include "ghzforge/states.hpp"

namespace ghzforge {

// Uniform doubles built directly from the raw 64-bit stream so runs are
// reproducible independent of the standard library's distribution details.
inline double uniform_unit(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

// splitmix64 finalizer; gives each run of a batch its own decorrelated stream.
inline std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index) {
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (run_index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct TrainerConfig {
  int mode_k = 1;          // iterations inside the cost
  int cycles = 150;
  double delta = 0.01;     // difference-quotient step
  double alpha = 0.1;      // learning rate
  double lambda_lo = 0.05;
  double lambda_hi = 0.3;
  double theta_init_lo = 0.0;
  double theta_init_hi = 2.0 * M_PI;
  std::uint64_t seed = 0;

  void validate() const {
    if (mode_k < 1) throw std::invalid_argument("TrainerConfig: mode_k must be at least 1");
    if (cycles < 0) throw std::invalid_argument("TrainerConfig: cycles must be nonnegative");
    if (!(delta > 0.0)) throw std::invalid_argument("TrainerConfig: delta must be positive");
    if (!(alpha >= 0.0)) throw std::invalid_argument("TrainerConfig: alpha must be nonnegative");
    if (!(0.0 <= lambda_lo && lambda_lo <= lambda_hi && lambda_hi <= 1.0))
      throw std::invalid_argument("TrainerConfig: lambda range must satisfy 0 <= lo <= hi <= 1");
    if (!(theta_init_lo <= theta_init_hi))
      throw std::invalid_argument("TrainerConfig: theta init range is inverted");
  }
};

struct FidelitySample {
  int cycle;
  double lambda;
  double cost;
};

struct TrainRecord {
  TrainerConfig config;
  ParamVector theta_final;
  std::vector<FidelitySample> fidelity_history;
  std::vector<ParamVector> theta_history;  // entry 0 is the initial draw
  std::string ansatz_convention_tag;
};

inline ParamVector init_params(std::mt19937_64& rng, double lo = 0.0, double hi = 2.0 * M_PI) {
  ParamVector p;
  for (double& t : p.theta) t = uniform_in(rng, lo, hi);
  return p;
}

// Forward difference quotient of the k-iteration fidelity on a white-noise
// input; the same lambda feeds all seventeen cost evaluations.
inline std::array<double, 16> gradient(const ParamVector& theta, double lambda, int steps,
                                       double delta) {
  const DensityMatrix3Q input = white_noise_input(lambda);
  const double base = cost(build_unitary(theta), input, steps);
  std::array<double, 16> grad{};
  for (int i = 0; i < 16; ++i) {
    ParamVector shifted = theta;
    shifted.theta[i] += delta;
    grad[i] = (cost(build_unitary(shifted), input, steps) - base) / delta;
  }
  return grad;
}

// Plain gradient-ascent step; angles are not wrapped back into [0,2pi].
inline ParamVector update(const ParamVector& theta, const std::array<double, 16>& grad,
                          double alpha) {
  ParamVector next = theta;
  for (int i = 0; i < 16; ++i) next.theta[i] += alpha * grad[i];
  return next;
}

// The optimization loop: draw the angles once, then per cycle sample a noise
// strength, take one ascent step, and log the cost of the updated angles on
// that same input.
inline TrainRecord train(const TrainerConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);

  TrainRecord record;
  record.config = config;
  record.ansatz_convention_tag = kAnsatzConventionTag;
  ParamVector theta = init_params(rng, config.theta_init_lo, config.theta_init_hi);
  record.theta_history.push_back(theta);

  for (int cycle = 0; cycle < config.cycles; ++cycle) {
    const double lambda = uniform_in(rng, config.lambda_lo, config.lambda_hi);
    const std::array<double, 16> grad = gradient(theta, lambda, config.mode_k, config.delta);
    theta = update(theta, grad, config.alpha);
    const double logged = cost(build_unitary(theta), white_noise_input(lambda), config.mode_k);
    record.fidelity_history.push_back({cycle, lambda, logged});
    record.theta_history.push_back(theta);
  }

  record.theta_final = theta;
  return record;
}

inline double evaluate(const ParamVector& theta, const InputSpec& input, int steps) {
  return cost(build_unitary(theta), realize_input(input), steps);
}

}  // namespace ghzforge
