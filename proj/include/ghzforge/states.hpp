#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <variant>

#include "ghzforge/linalg.hpp"

namespace ghzforge {

// Pure 3-qubit state; constructors keep the norm at 1 (the normalization
// factor of the coherent-error families lives here).
class PureState3Q {
 public:
  explicit PureState3Q(std::array<ComplexScalar, 8> amplitudes)
      : amplitudes_(amplitudes) {
    double norm_sq = 0.0;
    for (const auto& a : amplitudes_) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw std::invalid_argument("PureState3Q: non-finite amplitude");
      norm_sq += std::norm(a);
    }
    if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-12)
      throw std::invalid_argument("PureState3Q: amplitudes are not normalized");
  }

  const std::array<ComplexScalar, 8>& amplitudes() const { return amplitudes_; }

  double norm() const {
    double norm_sq = 0.0;
    for (const auto& a : amplitudes_) norm_sq += std::norm(a);
    return std::sqrt(norm_sq);
  }

 private:
  std::array<ComplexScalar, 8> amplitudes_;
};

// 8x8 state of the three data qubits. The constructor checks shape and
// finiteness; the full Hermitian/trace/PSD check is `is_density`, applied by
// the `checked` factory at untrusted boundaries and by the test suites.
class DensityMatrix3Q {
 public:
  explicit DensityMatrix3Q(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.dim() != 8)
      throw std::invalid_argument("DensityMatrix3Q: matrix must be 8x8");
    if (!has_finite_entries(matrix_))
      throw std::invalid_argument("DensityMatrix3Q: non-finite entries");
  }

  static DensityMatrix3Q checked(ComplexMatrix matrix, double tol = 1e-9) {
    if (!is_density(matrix, tol))
      throw std::invalid_argument("DensityMatrix3Q: not a valid density matrix");
    return DensityMatrix3Q(std::move(matrix));
  }

  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

inline DensityMatrix3Q to_density(const PureState3Q& psi) {
  ComplexMatrix m(8);
  const auto& a = psi.amplitudes();
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) m(r, c) = a[r] * std::conj(a[c]);
  return DensityMatrix3Q(std::move(m));
}

inline PureState3Q ghz_state() {
  std::array<ComplexScalar, 8> a{};
  a[0] = 1.0 / std::sqrt(2.0);
  a[7] = a[0];
  return PureState3Q(a);
}

// (1 - lambda) |GHZ><GHZ| + (lambda/8) I8
inline DensityMatrix3Q white_noise_input(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("white_noise_input: noise strength must lie in [0,1]");
  const ComplexMatrix ghz = to_density(ghz_state()).matrix();
  return DensityMatrix3Q((1.0 - lambda) * ghz + (lambda / 8.0) * ComplexMatrix::identity(8));
}

namespace detail {

inline std::size_t parse_basis_bits(std::string_view bits) {
  if (bits.size() != 3 || bits.find_first_not_of("01") != std::string_view::npos)
    throw std::invalid_argument("basis state must be a three-character bit string of 0s and 1s");
  const std::size_t b = ((bits[0] - '0') << 2) | ((bits[1] - '0') << 1) | (bits[2] - '0');
  if (b == 0 || b == 7)
    throw std::invalid_argument(
        "basis state must be orthogonal to the GHZ components (000 and 111 are rejected)");
  return b;
}

inline std::string format_basis_bits(std::size_t b) {
  std::string s(3, '0');
  for (int i = 0; i < 3; ++i) s[i] = char('0' + ((b >> (2 - i)) & 1u));
  return s;
}

inline double parse_decimal(std::string_view text, const char* what) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value))
    throw std::invalid_argument(std::string("malformed input spec: '") + std::string(text) +
                                "' is not a finite decimal " + what);
  return value;
}

inline std::string format_decimal(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace detail

// N (|GHZ> + eps |b>) with b one of the six basis states orthogonal to the
// GHZ components.
inline PureState3Q basis_error_input(std::string_view bits, double eps) {
  const std::size_t b = detail::parse_basis_bits(bits);
  if (!std::isfinite(eps))
    throw std::invalid_argument("basis_error_input: eps must be finite");
  const double h = std::hypot(1.0, eps);
  std::array<ComplexScalar, 8> a{};
  a[0] = (1.0 / std::sqrt(2.0)) / h;
  a[7] = a[0];
  a[b] += eps / h;
  return PureState3Q(a);
}

// N ((1 - eps) |000> + (1 + eps) |111>), eps in [-1, 1]
inline PureState3Q ghzlike_input(double eps) {
  if (!(eps >= -1.0 && eps <= 1.0))
    throw std::invalid_argument("ghzlike_input: eps must lie in [-1,1]");
  const double h = std::hypot(1.0 - eps, 1.0 + eps);
  std::array<ComplexScalar, 8> a{};
  a[0] = (1.0 - eps) / h;
  a[7] = (1.0 + eps) / h;
  return PureState3Q(a);
}

// <GHZ| rho |GHZ>, real in [0,1]; the imaginary residue must vanish to 1e-12.
inline double fidelity_to_ghz(const DensityMatrix3Q& rho) {
  const auto& g = ghz_state().amplitudes();
  const ComplexMatrix& m = rho.matrix();
  ComplexScalar f{0.0, 0.0};
  for (std::size_t r = 0; r < 8; ++r) {
    if (g[r] == ComplexScalar{0.0, 0.0}) continue;
    for (std::size_t c = 0; c < 8; ++c) f += std::conj(g[r]) * m(r, c) * g[c];
  }
  if (std::abs(f.imag()) > 1e-12)
    throw std::domain_error("fidelity_to_ghz: non-real overlap, input is not Hermitian");
  const double value = f.real();
  if (value < -1e-9 || value > 1.0 + 1e-9)
    throw std::domain_error("fidelity_to_ghz: overlap outside [0,1], input is not a density matrix");
  return std::clamp(value, 0.0, 1.0);
}

struct WhiteNoiseSpec {
  double lambda;
};

struct BasisErrorSpec {
  std::size_t basis;  // 1..6
  double eps;
};

struct GhzLikeSpec {
  double eps;
};

using InputSpec = std::variant<WhiteNoiseSpec, BasisErrorSpec, GhzLikeSpec>;

// Grammar: white:<lambda> | basis:<bbb>:<eps> | ghzlike:<eps>
inline InputSpec parse_input_spec(std::string_view text) {
  const auto split = [](std::string_view s) {
    std::vector<std::string_view> parts;
    while (true) {
      const std::size_t pos = s.find(':');
      if (pos == std::string_view::npos) {
        parts.push_back(s);
        return parts;
      }
      parts.push_back(s.substr(0, pos));
      s.remove_prefix(pos + 1);
    }
  };
  const std::vector<std::string_view> parts = split(text);
  if (parts[0] == "white") {
    if (parts.size() != 2)
      throw std::invalid_argument("malformed input spec: expected white:<lambda>");
    const double lambda = detail::parse_decimal(parts[1], "noise strength");
    if (!(lambda >= 0.0 && lambda <= 1.0))
      throw std::invalid_argument("input spec out of range: white noise strength must lie in [0,1]");
    return WhiteNoiseSpec{lambda};
  }
  if (parts[0] == "basis") {
    if (parts.size() != 3)
      throw std::invalid_argument("malformed input spec: expected basis:<bbb>:<eps>");
    const std::size_t b = detail::parse_basis_bits(parts[1]);
    const double eps = detail::parse_decimal(parts[2], "eps");
    return BasisErrorSpec{b, eps};
  }
  if (parts[0] == "ghzlike") {
    if (parts.size() != 2)
      throw std::invalid_argument("malformed input spec: expected ghzlike:<eps>");
    const double eps = detail::parse_decimal(parts[1], "eps");
    if (!(eps >= -1.0 && eps <= 1.0))
      throw std::invalid_argument("input spec out of range: ghzlike eps must lie in [-1,1]");
    return GhzLikeSpec{eps};
  }
  throw std::invalid_argument("malformed input spec '" + std::string(text) +
                              "': expected white:<lambda> | basis:<bbb>:<eps> | ghzlike:<eps>");
}

inline std::string format_input_spec(const InputSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WhiteNoiseSpec>)
          return "white:" + detail::format_decimal(s.lambda);
        else if constexpr (std::is_same_v<T, BasisErrorSpec>)
          return "basis:" + detail::format_basis_bits(s.basis) + ":" + detail::format_decimal(s.eps);
        else
          return "ghzlike:" + detail::format_decimal(s.eps);
      },
      spec);
}

// Pure-state specs are converted to density matrices here; the protocol map
// is defined on density matrices only.
inline DensityMatrix3Q realize_input(const InputSpec& spec) {
  return std::visit(
      [](const auto& s) -> DensityMatrix3Q {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WhiteNoiseSpec>)
          return white_noise_input(s.lambda);
        else if constexpr (std::is_same_v<T, BasisErrorSpec>)
          return to_density(basis_error_input(detail::format_basis_bits(s.basis), s.eps));
        else
          return to_density(ghzlike_input(s.eps));
      },
      spec);
}

}  // namespace ghzforge
