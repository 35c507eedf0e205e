#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>

#include "ghzforge/trainer.hpp"

using namespace ghzforge;

TEST_CASE("uniform draws are deterministic and in range", "[trainer]") {
  std::mt19937_64 a(12345), b(12345);
  for (int i = 0; i < 1000; ++i) {
    const double x = uniform_unit(a);
    REQUIRE(x == uniform_unit(b));
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
  std::mt19937_64 c(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = uniform_in(c, 0.05, 0.3);
    REQUIRE(x >= 0.05);
    REQUIRE(x <= 0.3);
  }
}

TEST_CASE("run seeds decorrelate and reproduce", "[trainer]") {
  REQUIRE(derive_run_seed(42, 0) == derive_run_seed(42, 0));
  REQUIRE(derive_run_seed(42, 0) != derive_run_seed(42, 1));
  REQUIRE(derive_run_seed(42, 0) != derive_run_seed(43, 0));
  // Neighboring indices must not produce neighboring streams.
  std::mt19937_64 r0(derive_run_seed(9, 0)), r1(derive_run_seed(9, 1));
  int agree = 0;
  for (int i = 0; i < 64; ++i)
    if ((r0() & 1u) == (r1() & 1u)) ++agree;
  REQUIRE(agree < 64);
}

TEST_CASE("initial angles are uniform over the full circle", "[trainer]") {
  std::mt19937_64 rng(2024);
  double sum = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws / 16; ++i) {
    const ParamVector p = init_params(rng);
    for (double t : p.theta) {
      REQUIRE(t >= 0.0);
      REQUIRE(t <= 2.0 * M_PI);
      sum += t;
    }
  }
  // Mean of U[0,2pi] is pi with sigma/sqrt(n) ~ 0.0181 for n = 10^4.
  const double mean = sum / double((draws / 16) * 16);
  REQUIRE(std::abs(mean - M_PI) < 3.0 * 0.0182);
}

TEST_CASE("gradient equals its defining difference quotient", "[trainer]") {
  std::mt19937_64 rng(31);
  const ParamVector theta = init_params(rng);
  const double lambda = 0.17;
  const double delta = 0.01;
  const auto grad = gradient(theta, lambda, 1, delta);

  const DensityMatrix3Q input = white_noise_input(lambda);
  const double base = cost(build_unitary(theta), input, 1);
  for (int i = 0; i < 16; ++i) {
    ParamVector shifted = theta;
    shifted.theta[i] += delta;
    const double quotient = (cost(build_unitary(shifted), input, 1) - base) / delta;
    REQUIRE(grad[i] == quotient);  // same expression, bitwise identical
  }
}

TEST_CASE("forward difference tracks a tight central difference", "[trainer]") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 3; ++trial) {
    const ParamVector theta = init_params(rng);
    const double lambda = uniform_in(rng, 0.05, 0.3);
    const auto grad = gradient(theta, lambda, 1, 0.01);

    const DensityMatrix3Q input = white_noise_input(lambda);
    const double h = 1e-5;
    for (int i = 0; i < 16; ++i) {
      ParamVector up = theta, down = theta;
      up.theta[i] += h;
      down.theta[i] -= h;
      const double central =
          (cost(build_unitary(up), input, 1) - cost(build_unitary(down), input, 1)) / (2.0 * h);
      REQUIRE(std::abs(grad[i] - central) < 5e-2);
    }
  }
}

TEST_CASE("update applies the ascent rule exactly", "[trainer]") {
  ParamVector theta;
  theta.theta.fill(0.0);
  std::array<double, 16> grad{};
  grad.fill(1.0);

  const ParamVector frozen = update(theta, grad, 0.0);
  for (double t : frozen.theta) REQUIRE(t == 0.0);

  const ParamVector moved = update(theta, grad, 0.1);
  for (double t : moved.theta) REQUIRE(t == 0.1);

  grad.fill(0.0);
  const ParamVector still = update(moved, grad, 0.5);
  for (double t : still.theta) REQUIRE(t == 0.1);
}

TEST_CASE("training with zero cycles returns the initial draw", "[trainer]") {
  TrainerConfig config;
  config.cycles = 0;
  config.seed = 5;
  const TrainRecord record = train(config);
  REQUIRE(record.fidelity_history.empty());
  REQUIRE(record.theta_history.size() == 1);
  for (int i = 0; i < 16; ++i)
    REQUIRE(record.theta_final.theta[i] == record.theta_history[0].theta[i]);

  std::mt19937_64 rng(5);
  const ParamVector expected = init_params(rng);
  for (int i = 0; i < 16; ++i) REQUIRE(record.theta_final.theta[i] == expected.theta[i]);
}

TEST_CASE("training is bit-reproducible for a fixed seed", "[trainer]") {
  TrainerConfig config;
  config.cycles = 8;
  config.seed = 99;
  const TrainRecord a = train(config);
  const TrainRecord b = train(config);
  REQUIRE(a.fidelity_history.size() == 8);
  REQUIRE(a.theta_history.size() == 9);
  for (std::size_t c = 0; c < a.fidelity_history.size(); ++c) {
    REQUIRE(a.fidelity_history[c].cycle == int(c));
    REQUIRE(a.fidelity_history[c].lambda == b.fidelity_history[c].lambda);
    REQUIRE(a.fidelity_history[c].cost == b.fidelity_history[c].cost);
    REQUIRE(a.fidelity_history[c].lambda >= 0.05);
    REQUIRE(a.fidelity_history[c].lambda <= 0.3);
    REQUIRE(a.fidelity_history[c].cost >= 0.0);
    REQUIRE(a.fidelity_history[c].cost <= 1.0 + 1e-9);
  }
  for (int i = 0; i < 16; ++i) REQUIRE(a.theta_final.theta[i] == b.theta_final.theta[i]);
}

TEST_CASE("config validation rejects broken settings", "[trainer]") {
  TrainerConfig config;
  config.mode_k = 0;
  REQUIRE_THROWS_AS(config.validate(), std::invalid_argument);
  config = TrainerConfig{};
  config.delta = 0.0;
  REQUIRE_THROWS_AS(config.validate(), std::invalid_argument);
  config = TrainerConfig{};
  config.lambda_lo = 0.4;
  config.lambda_hi = 0.2;
  REQUIRE_THROWS_AS(config.validate(), std::invalid_argument);
  config = TrainerConfig{};
  config.cycles = -1;
  REQUIRE_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("evaluate reproduces the closed form for trivial angles", "[trainer]") {
  ParamVector zero;
  zero.theta.fill(0.0);
  const double f = evaluate(zero, parse_input_spec("white:0.1"), 1);
  REQUIRE_THAT(f, Catch::Matchers::WithinAbs(0.9125, 1e-12));
  const double f2 = evaluate(zero, parse_input_spec("white:0.1"), 4);
  REQUIRE_THAT(f2, Catch::Matchers::WithinAbs(0.9125, 1e-12));
}

TEST_CASE("short runs usually move the objective upward", "[trainer]") {
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TrainerConfig config;
    config.cycles = 40;
    config.seed = seed;
    const TrainRecord record = train(config);
    const InputSpec probe = parse_input_spec("white:0.1");
    const double before = evaluate(record.theta_history[0], probe, 1);
    const double after = evaluate(record.theta_final, probe, 1);
    if (after > before) ++improved;
  }
  REQUIRE(improved >= 3);
}
