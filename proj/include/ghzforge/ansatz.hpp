#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "ghzforge/linalg.hpp"

namespace ghzforge {

// 16 rotation angles in radians; theta[i] is the (i+1)-th angle of the
// circuit. Angles are periodic and unconstrained, training may leave [0,2pi].
struct ParamVector {
  std::array<double, 16> theta{};

  bool all_finite() const {
    for (double t : theta)
      if (!std::isfinite(t)) return false;
    return true;
  }
};

// Per-party 2-qubit circuit: four rotation layers (Rx then Rz on each qubit)
// with a CNOT between consecutive layers. Layer L consumes angles
// theta[4L..4L+3] as (Rx q0, Rz q0, Rx q1, Rz q1). With all angles zero the
// three alternating CNOTs compose to SWAP.
inline constexpr std::array<std::pair<int, int>, 3> kCnotWiring = {{{0, 1}, {1, 0}, {0, 1}}};

// Recorded in every output file so downstream tooling knows which circuit
// convention produced a given set of angles.
inline constexpr const char* kAnsatzConventionTag = "rxrz4-cnot-01-10-01-halfangle";

// exp(-i theta X / 2)
inline ComplexMatrix rx(double theta) {
  ComplexMatrix m(2);
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  m(0, 0) = c;
  m(1, 1) = c;
  m(0, 1) = ComplexScalar{0.0, -s};
  m(1, 0) = ComplexScalar{0.0, -s};
  return m;
}

// exp(-i theta Z / 2)
inline ComplexMatrix rz(double theta) {
  ComplexMatrix m(2);
  m(0, 0) = std::polar(1.0, -0.5 * theta);
  m(1, 1) = std::polar(1.0, 0.5 * theta);
  return m;
}

// Flips the target iff the control bit is 1; qubit 0 is the MSB.
inline ComplexMatrix cnot(int control, int target) {
  if (control == target || control < 0 || control > 1 || target < 0 || target > 1)
    throw std::invalid_argument("cnot: control and target must be distinct qubits in {0,1}");
  ComplexMatrix m(4);
  for (std::size_t in = 0; in < 4; ++in) {
    const std::size_t ctrl_bit = (in >> (1 - control)) & 1u;
    const std::size_t out = ctrl_bit ? in ^ (std::size_t{1} << (1 - target)) : in;
    m(out, in) = 1.0;
  }
  return m;
}

inline ComplexMatrix build_unitary(const ParamVector& params) {
  if (!params.all_finite())
    throw std::invalid_argument("build_unitary: angles must be finite");
  const auto layer = [&](int l) {
    const double* t = params.theta.data() + 4 * l;
    return kron(matmul(rz(t[1]), rx(t[0])), matmul(rz(t[3]), rx(t[2])));
  };
  ComplexMatrix u = layer(0);
  for (int gap = 0; gap < 3; ++gap) {
    const auto [control, target] = kCnotWiring[gap];
    u = matmul(cnot(control, target), u);
    u = matmul(layer(gap + 1), u);
  }
  return u;
}

}  // namespace ghzforge
