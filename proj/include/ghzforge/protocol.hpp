#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ghzforge/linalg.hpp"
#include "ghzforge/states.hpp"

namespace ghzforge {

// Post-selection weights at or below this are treated as failure; far below
// any meaningful success probability at these dimensions.
inline constexpr double kMinSuccessProb = 1e-12;

struct ProtocolOutcome {
  DensityMatrix3Q state;
  double success_prob;
};

struct TrajectoryEntry {
  int iteration;
  double fidelity;
  double success_prob;
  DensityMatrix3Q state;
};

using Trajectory = std::vector<TrajectoryEntry>;

// Thrown when the all-zeros flag outcome has (numerically) zero weight, i.e.
// post-selection never succeeds for this unitary and input.
class DegenerateOutcome : public std::runtime_error {
 public:
  DegenerateOutcome(double weight, int iteration)
      : std::runtime_error("post-selection weight " + std::to_string(weight) +
                           " at iteration " + std::to_string(iteration) +
                           " is below the success threshold"),
        weight_(weight),
        iteration_(iteration) {}

  double weight() const { return weight_; }
  int iteration() const { return iteration_; }

 private:
  double weight_;
  int iteration_;
};

// One round of the protocol before normalization, generalized to distinct
// data and flag copies so the quadratic structure is directly testable:
// returns the flag-zero block of G (rho_data x rho_flag) G†, G = U x U x U on
// the interleaved register, together with its trace.
inline std::pair<ComplexMatrix, double> distill_numerator(const DensityMatrix3Q& rho_data,
                                                          const DensityMatrix3Q& rho_flag,
                                                          const ComplexMatrix& party_unitary) {
  if (party_unitary.dim() != 4)
    throw std::invalid_argument("distill_numerator: party unitary must be 4x4");
  if (!is_unitary(party_unitary, 1e-9))
    throw std::invalid_argument("distill_numerator: party unitary is not unitary");

  const ComplexMatrix g = kron(kron(party_unitary, party_unitary), party_unitary);
  const ComplexMatrix joint = tensor_interleaved(rho_data.matrix(), rho_flag.matrix());

  // Only the flag-zero rows of G survive the block extraction, so the full
  // 64x64 conjugation reduces to an 8x64 sandwich with identical entries.
  std::array<std::size_t, 8> rows{};
  for (std::size_t d = 0; d < 8; ++d) rows[d] = interleave_index(d, 0);

  ComplexScalar bt[8][64];
  for (std::size_t d = 0; d < 8; ++d)
    for (std::size_t c = 0; c < 64; ++c) {
      ComplexScalar acc{0.0, 0.0};
      for (std::size_t r = 0; r < 64; ++r) acc += g(rows[d], r) * joint(r, c);
      bt[d][c] = acc;
    }

  ComplexMatrix numerator(8);
  for (std::size_t d = 0; d < 8; ++d)
    for (std::size_t dp = 0; dp < 8; ++dp) {
      ComplexScalar acc{0.0, 0.0};
      for (std::size_t c = 0; c < 64; ++c) acc += bt[d][c] * std::conj(g(rows[dp], c));
      numerator(d, dp) = acc;
    }

  return {std::move(numerator), trace(numerator).real()};
}

// The measurement-induced nonlinear map: tensor-square the input, apply the
// party unitary at each site, keep the data copy on the all-zeros flag
// outcome, renormalize.
inline ProtocolOutcome distill_step(const ComplexMatrix& party_unitary,
                                    const DensityMatrix3Q& rho) {
  auto [numerator, weight] = distill_numerator(rho, rho, party_unitary);
  if (weight <= kMinSuccessProb) throw DegenerateOutcome(weight, 1);
  return ProtocolOutcome{DensityMatrix3Q((1.0 / weight) * numerator), weight};
}

// Iterates the map, each round consuming two copies of the previous round's
// output. Entry 0 is the input itself with success probability 1.
inline Trajectory iterate(const ComplexMatrix& party_unitary, const DensityMatrix3Q& rho0,
                          int steps) {
  if (steps < 0 || steps > 64)
    throw std::invalid_argument("iterate: step count must lie in [0,64]");
  Trajectory trajectory;
  trajectory.reserve(std::size_t(steps) + 1);
  trajectory.push_back({0, fidelity_to_ghz(rho0), 1.0, rho0});
  for (int k = 1; k <= steps; ++k) {
    ProtocolOutcome outcome = [&] {
      try {
        return distill_step(party_unitary, trajectory.back().state);
      } catch (const DegenerateOutcome& e) {
        throw DegenerateOutcome(e.weight(), k);
      }
    }();
    trajectory.push_back(
        {k, fidelity_to_ghz(outcome.state), outcome.success_prob, std::move(outcome.state)});
  }
  return trajectory;
}

// Fidelity of the k-th iterate; a degenerate outcome maps to 0 so the
// training loop stays total.
inline double cost(const ComplexMatrix& party_unitary, const DensityMatrix3Q& rho0, int steps) {
  if (steps < 1) throw std::invalid_argument("cost: step count must be at least 1");
  try {
    return iterate(party_unitary, rho0, steps).back().fidelity;
  } catch (const DegenerateOutcome&) {
    return 0.0;
  }
}

}  // namespace ghzforge
