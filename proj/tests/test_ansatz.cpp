#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ghzforge/ansatz.hpp"
#include "test_helpers.hpp"

using namespace ghzforge;
using namespace ghzforge::testing;
using Catch::Approx;

namespace {

ComplexMatrix swap_gate() {
  ComplexMatrix m(4);
  m(0, 0) = 1.0;
  m(1, 2) = 1.0;
  m(2, 1) = 1.0;
  m(3, 3) = 1.0;
  return m;
}

ParamVector random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
  ParamVector p;
  for (double& t : p.theta) t = uni(rng);
  return p;
}

}  // namespace

TEST_CASE("rotation gates", "[ansatz]") {
  REQUIRE(max_abs_diff(rx(0.0), ComplexMatrix::identity(2)) == 0.0);
  REQUIRE(max_abs_diff(rz(0.0), ComplexMatrix::identity(2)) == 0.0);

  SECTION("half-angle convention: rx(2pi) = -I") {
    const ComplexMatrix full = rx(2.0 * M_PI);
    REQUIRE(max_abs_diff(full, ComplexScalar{-1.0, 0.0} * ComplexMatrix::identity(2)) < 1e-15);
  }

  SECTION("rotations are unitary") {
    REQUIRE(is_unitary(rx(1.234), 1e-12));
    REQUIRE(is_unitary(rz(-2.5), 1e-12));
  }
}

TEST_CASE("cnot", "[ansatz]") {
  SECTION("truth table, qubit 0 as MSB") {
    const ComplexMatrix c01 = cnot(0, 1);
    REQUIRE(c01(0, 0).real() == 1.0);
    REQUIRE(c01(1, 1).real() == 1.0);
    REQUIRE(c01(3, 2).real() == 1.0);
    REQUIRE(c01(2, 3).real() == 1.0);
  }

  SECTION("three alternating cnots make SWAP") {
    const ComplexMatrix s = matmul(cnot(0, 1), matmul(cnot(1, 0), cnot(0, 1)));
    REQUIRE(max_abs_diff(s, swap_gate()) == 0.0);
  }

  SECTION("invalid wires rejected") {
    REQUIRE_THROWS_AS(cnot(0, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(cnot(0, 2), std::invalid_argument);
  }
}

TEST_CASE("build_unitary", "[ansatz]") {
  SECTION("zero angles give SWAP") {
    REQUIRE(max_abs_diff(build_unitary(ParamVector{}), swap_gate()) == 0.0);
  }

  SECTION("random angles give a unitary") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 20; ++trial)
      REQUIRE(is_unitary(build_unitary(random_params(rng)), 1e-12));
  }

  SECTION("theta1=pi case against the dense product oracle") {
    ParamVector p{};
    p.theta[0] = M_PI;
    const ComplexMatrix expected = matmul(swap_gate(), kron(rx(M_PI), ComplexMatrix::identity(2)));
    REQUIRE(max_abs_diff(build_unitary(p), expected) < 1e-15);
  }

  SECTION("non-finite angles rejected") {
    ParamVector p{};
    p.theta[5] = std::numeric_limits<double>::infinity();
    REQUIRE_THROWS_AS(build_unitary(p), std::invalid_argument);
  }
}

TEST_CASE("build_unitary properties", "[ansatz]") {
  std::mt19937_64 rng(53);

  SECTION("|det| = 1") {
    struct Det {
      static ComplexScalar of(const ComplexMatrix& m, std::vector<std::size_t> rows,
                              std::vector<std::size_t> cols) {
        if (rows.size() == 1) return m(rows[0], cols[0]);
        ComplexScalar acc{0.0, 0.0};
        double sign = 1.0;
        for (std::size_t k = 0; k < rows.size(); ++k) {
          std::vector<std::size_t> sub_rows(rows.begin() + 1, rows.end());
          std::vector<std::size_t> sub_cols = cols;
          sub_cols.erase(sub_cols.begin() + k);
          acc += sign * m(rows[0], cols[k]) * of(m, sub_rows, sub_cols);
          sign = -sign;
        }
        return acc;
      }
    };
    for (int trial = 0; trial < 5; ++trial) {
      const ComplexMatrix u = build_unitary(random_params(rng));
      const ComplexScalar det = Det::of(u, {0, 1, 2, 3}, {0, 1, 2, 3});
      REQUIRE(std::abs(det) == Approx(1.0).margin(1e-12));
    }
  }

  SECTION("2pi-periodic in each angle up to global phase") {
    const ParamVector base = random_params(rng);
    for (int i : {0, 3, 7, 12, 15}) {
      ParamVector shifted = base;
      shifted.theta[i] += 2.0 * M_PI;
      const ComplexMatrix overlap = matmul(adjoint(build_unitary(base)), build_unitary(shifted));
      REQUIRE(std::abs(trace(overlap)) == Approx(4.0).margin(1e-9));
    }
  }

  SECTION("continuity under small parameter shifts") {
    const ParamVector base = random_params(rng);
    const double h = 1e-6;
    for (int i = 0; i < 16; ++i) {
      ParamVector shifted = base;
      shifted.theta[i] += h;
      REQUIRE(max_abs_diff(build_unitary(shifted), build_unitary(base)) <= h);
    }
  }
}
