#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghzforge {

using ComplexScalar = std::complex<double>;

// Dense square complex matrix over a small qubit register (dim <= 64).
//
// Register convention, used by every operation in this library: MSB-left,
// i.e. qubit 0 owns the most significant bit of a basis index. For the
// two-copy register the qubit order is (a1,b1,a2,b2,a3,b3), so data bits
// sit at index bits 5,3,1 and flag bits at 4,2,0.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(std::size_t dim)
      : dim_(dim), entries_(dim * dim, ComplexScalar{0.0, 0.0}) {
    if (dim == 0) throw std::invalid_argument("ComplexMatrix: dim must be positive");
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t dim() const { return dim_; }

  ComplexScalar& operator()(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }
  const ComplexScalar& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * dim_ + c];
  }

  const std::vector<ComplexScalar>& entries() const { return entries_; }

 private:
  std::size_t dim_;
  std::vector<ComplexScalar> entries_;
};

inline bool has_finite_entries(const ComplexMatrix& m) {
  for (const auto& z : m.entries())
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

inline void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b,
                             const char* op) {
  if (a.dim() != b.dim())
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "operator+");
  ComplexMatrix out(a.dim());
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) out(r, c) = a(r, c) + b(r, c);
  return out;
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "operator-");
  ComplexMatrix out(a.dim());
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) out(r, c) = a(r, c) - b(r, c);
  return out;
}

inline ComplexMatrix operator*(ComplexScalar s, const ComplexMatrix& m) {
  ComplexMatrix out(m.dim());
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) out(r, c) = s * m(r, c);
  return out;
}

inline ComplexMatrix operator*(double s, const ComplexMatrix& m) {
  return ComplexScalar{s, 0.0} * m;
}

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "matmul");
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const ComplexScalar ark = a(r, k);
      if (ark == ComplexScalar{0.0, 0.0}) continue;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  return matmul(a, b);
}

inline ComplexMatrix adjoint(const ComplexMatrix& m) {
  ComplexMatrix out(m.dim());
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) out(r, c) = std::conj(m(c, r));
  return out;
}

inline ComplexScalar trace(const ComplexMatrix& m) {
  ComplexScalar t{0.0, 0.0};
  for (std::size_t i = 0; i < m.dim(); ++i) t += m(i, i);
  return t;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c)
      worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
  return worst;
}

// Kronecker product; the left factor owns the most significant index bits.
// Register operations in this library never exceed dim 64.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.dim() * b.dim();
  if (n > 64) throw std::invalid_argument("kron: result dimension exceeds 64");
  ComplexMatrix out(n);
  for (std::size_t ra = 0; ra < a.dim(); ++ra)
    for (std::size_t ca = 0; ca < a.dim(); ++ca) {
      const ComplexScalar v = a(ra, ca);
      if (v == ComplexScalar{0.0, 0.0}) continue;
      for (std::size_t rb = 0; rb < b.dim(); ++rb)
        for (std::size_t cb = 0; cb < b.dim(); ++cb)
          out(ra * b.dim() + rb, ca * b.dim() + cb) = v * b(rb, cb);
    }
  return out;
}

// Index of (data, flag) basis bits in the interleaved two-copy register:
// data bits of the 3-bit value `data` go to index bits 5,3,1 and flag bits
// to 4,2,0 (MSB-left).
inline std::size_t interleave_index(std::size_t data, std::size_t flag) {
  std::size_t idx = 0;
  for (int q = 0; q < 3; ++q) {
    idx |= ((data >> (2 - q)) & 1u) << (5 - 2 * q);
    idx |= ((flag >> (2 - q)) & 1u) << (4 - 2 * q);
  }
  return idx;
}

// Two-copy joint state with register order (a1,b1,a2,b2,a3,b3):
// out[idx(d,f)][idx(d',f')] = rho_a[d][d'] * rho_b[f][f'].
inline ComplexMatrix tensor_interleaved(const ComplexMatrix& rho_a,
                                        const ComplexMatrix& rho_b) {
  if (rho_a.dim() != 8 || rho_b.dim() != 8)
    throw std::invalid_argument("tensor_interleaved: both inputs must be 8x8");
  ComplexMatrix out(64);
  for (std::size_t d = 0; d < 8; ++d)
    for (std::size_t dp = 0; dp < 8; ++dp) {
      const ComplexScalar v = rho_a(d, dp);
      if (v == ComplexScalar{0.0, 0.0}) continue;
      for (std::size_t f = 0; f < 8; ++f)
        for (std::size_t fp = 0; fp < 8; ++fp)
          out(interleave_index(d, f), interleave_index(dp, fp)) = v * rho_b(f, fp);
    }
  return out;
}

namespace detail {

inline std::size_t qubit_count_for_dim(std::size_t dim) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  if ((std::size_t{1} << n) != dim)
    throw std::invalid_argument("permute_qubits: dimension is not a power of 2");
  return n;
}

// Moves the bit of qubit j (bit n-1-j, MSB-left) to position perm[j].
inline std::size_t permute_bits(std::size_t index, const std::vector<std::size_t>& perm,
                                std::size_t n) {
  std::size_t out = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t bit = (index >> (n - 1 - j)) & 1u;
    out |= bit << (n - 1 - perm[j]);
  }
  return out;
}

}  // namespace detail

// Conjugation by the unitary relabelling qubit j -> perm[j].
inline ComplexMatrix permute_qubits(const ComplexMatrix& m,
                                    const std::vector<std::size_t>& perm) {
  const std::size_t n = detail::qubit_count_for_dim(m.dim());
  if (perm.size() != n)
    throw std::invalid_argument("permute_qubits: permutation size does not match qubit count");
  std::vector<bool> seen(n, false);
  for (std::size_t p : perm) {
    if (p >= n || seen[p]) throw std::invalid_argument("permute_qubits: not a bijection");
    seen[p] = true;
  }
  ComplexMatrix out(m.dim());
  for (std::size_t r = 0; r < m.dim(); ++r) {
    const std::size_t pr = detail::permute_bits(r, perm, n);
    for (std::size_t c = 0; c < m.dim(); ++c)
      out(pr, detail::permute_bits(c, perm, n)) = m(r, c);
  }
  return out;
}

// Unnormalized conditional state of the data qubits given all flags measured 0:
// out[d][d'] = m[idx(d,0)][idx(d',0)].
inline ComplexMatrix extract_flag_zero_block(const ComplexMatrix& m) {
  if (m.dim() != 64)
    throw std::invalid_argument("extract_flag_zero_block: input must be 64x64");
  ComplexMatrix out(8);
  for (std::size_t d = 0; d < 8; ++d)
    for (std::size_t dp = 0; dp < 8; ++dp)
      out(d, dp) = m(interleave_index(d, 0), interleave_index(dp, 0));
  return out;
}

inline bool is_unitary(const ComplexMatrix& m, double tol) {
  if (!has_finite_entries(m)) return false;
  const ComplexMatrix gram = matmul(adjoint(m), m);
  return max_abs_diff(gram, ComplexMatrix::identity(m.dim())) <= tol;
}

// Eigenvalues of a Hermitian matrix by cyclic Jacobi with complex plane
// rotations; input is symmetrized first. Ascending order.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  ComplexMatrix a = 0.5 * (m + adjoint(m));
  double scale = 0.0;
  for (const auto& z : a.entries()) scale = std::max(scale, std::abs(z));
  if (scale == 0.0) return std::vector<double>(n, 0.0);
  const double stop = 1e-16 * scale;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= stop) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r <= stop) continue;
        const double phi = std::arg(a(p, q));
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const ComplexScalar phase = std::polar(1.0, phi);

        // a <- G† a G with G(p,p)=c, G(p,q)=-s e^{i phi}, G(q,p)=s e^{-i phi}, G(q,q)=c
        for (std::size_t i = 0; i < n; ++i) {
          const ComplexScalar aip = a(i, p);
          const ComplexScalar aiq = a(i, q);
          a(i, p) = aip * c + aiq * s * std::conj(phase);
          a(i, q) = -aip * s * phase + aiq * c;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const ComplexScalar apj = a(p, j);
          const ComplexScalar aqj = a(q, j);
          a(p, j) = c * apj + s * phase * aqj;
          a(q, j) = -s * std::conj(phase) * apj + c * aqj;
        }
      }
    }
  }

  std::vector<double> eigs(n);
  for (std::size_t i = 0; i < n; ++i) eigs[i] = a(i, i).real();
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

inline bool is_density(const ComplexMatrix& m, double tol) {
  if (!has_finite_entries(m)) return false;
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c)
      if (std::abs(m(r, c) - std::conj(m(c, r))) > tol) return false;
  if (std::abs(trace(m) - ComplexScalar{1.0, 0.0}) > tol) return false;
  const std::vector<double> eigs = hermitian_eigenvalues(m);
  return eigs.front() >= -tol;
}

}  // namespace ghzforge
