#pragma once

// Three-qubit pure states, reduced density matrices and seeded sampling.
//
// Amplitude c_ijk lives at index 4i + 2j + k, so qubit A is the most
// significant bit. Every reduced matrix is built from an explicit index map;
// the state storage is never permuted.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>

#include "lorinv/error.hpp"
#include "lorinv/qmath.hpp"

namespace lorinv {

enum class Qubit { A, B, C };
enum class Pair { AB, BC, AC };

inline constexpr std::array<Pair, 3> kAllPairs{Pair::AB, Pair::BC, Pair::AC};

constexpr const char* to_string(Qubit q) {
  switch (q) {
    case Qubit::A: return "A";
    case Qubit::B: return "B";
    case Qubit::C: return "C";
  }
  return "?";
}

constexpr const char* to_string(Pair p) {
  switch (p) {
    case Pair::AB: return "AB";
    case Pair::BC: return "BC";
    case Pair::AC: return "AC";
  }
  return "?";
}

constexpr std::size_t amp_index(std::size_t i, std::size_t j, std::size_t k) {
  return 4 * i + 2 * j + k;
}

struct PureState3Q {
  std::array<cplx, 8> amplitudes{};

  cplx& operator()(std::size_t i, std::size_t j, std::size_t k) { return amplitudes[amp_index(i, j, k)]; }
  const cplx& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return amplitudes[amp_index(i, j, k)];
  }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s;
  }

  bool finite() const {
    for (const auto& a : amplitudes)
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
    return true;
  }

  static PureState3Q basis(std::size_t i, std::size_t j, std::size_t k) {
    PureState3Q s;
    s(i, j, k) = 1.0;
    return s;
  }

  friend bool operator==(const PureState3Q&, const PureState3Q&) = default;
};

inline double max_abs_diff(const PureState3Q& a, const PureState3Q& b) {
  double best = 0.0;
  for (std::size_t n = 0; n < 8; ++n) best = std::max(best, std::abs(a.amplitudes[n] - b.amplitudes[n]));
  return best;
}

/// Unit norm, with the largest-magnitude amplitude (lowest index on ties)
/// made real and non-negative.
inline PureState3Q normalize(const PureState3Q& state) {
  if (!state.finite()) throw Error(ErrorKind::InvalidInput, "non-finite amplitude");
  const double nrm = std::sqrt(state.norm_squared());
  if (nrm < 1e-14) throw Error(ErrorKind::ZeroState, "state norm below 1e-14");

  double largest = 0.0;
  for (const auto& a : state.amplitudes) largest = std::max(largest, std::abs(a));
  std::size_t pivot = 0;
  for (std::size_t n = 0; n < 8; ++n) {
    if (std::abs(state.amplitudes[n]) >= largest * (1.0 - 1e-12)) {
      pivot = n;
      break;
    }
  }
  const cplx phase = std::conj(state.amplitudes[pivot]) / std::abs(state.amplitudes[pivot]);
  PureState3Q out;
  for (std::size_t n = 0; n < 8; ++n) out.amplitudes[n] = state.amplitudes[n] * phase / nrm;
  out.amplitudes[pivot] = cplx(out.amplitudes[pivot].real(), 0.0);
  return out;
}

inline PureState3Q make_state(const std::array<cplx, 8>& amplitudes) {
  PureState3Q s;
  s.amplitudes = amplitudes;
  return normalize(s);
}

inline PureState3Q ghz_state() {
  const double r = 1.0 / std::sqrt(2.0);
  PureState3Q s;
  s(0, 0, 0) = r;
  s(1, 1, 1) = r;
  return s;
}

inline PureState3Q w_state() {
  const double r = 1.0 / std::sqrt(3.0);
  PureState3Q s;
  s(0, 0, 1) = r;
  s(0, 1, 0) = r;
  s(1, 0, 0) = r;
  return s;
}

inline PureState3Q product_state() { return PureState3Q::basis(0, 0, 0); }

using DensityMatrix2 = ComplexMatrix<2>;
using DensityMatrix4 = ComplexMatrix<4>;

/// Checks the density-matrix invariants; throws InvalidDensity.
template <std::size_t N>
void validate_density(const ComplexMatrix<N>& rho, double tol = 1e-10, double positivity_tol = 1e-9) {
  if (!all_finite(rho)) throw Error(ErrorKind::InvalidDensity, "non-finite entry");
  const double herm = hermiticity_residual(rho);
  if (herm > tol) throw Error(ErrorKind::InvalidDensity, "hermiticity residual " + std::to_string(herm));
  const double tr_err = std::abs(rho.trace() - cplx(1.0));
  if (tr_err > tol) throw Error(ErrorKind::InvalidDensity, "trace deviates from 1 by " + std::to_string(tr_err));
  const auto es = hermitian_eigensystem(rho, tol);
  if (es.values[0] < -positivity_tol)
    throw Error(ErrorKind::InvalidDensity, "negative eigenvalue " + std::to_string(es.values[0]));
}

/// ρ_X = Tr_{other two} |ψ⟩⟨ψ|
inline DensityMatrix2 partial_trace(const PureState3Q& psi, Qubit keep) {
  DensityMatrix2 rho{};
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t xp = 0; xp < 2; ++xp) {
      cplx acc{};
      for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t v = 0; v < 2; ++v) {
          switch (keep) {
            case Qubit::A: acc += psi(x, u, v) * std::conj(psi(xp, u, v)); break;
            case Qubit::B: acc += psi(u, x, v) * std::conj(psi(u, xp, v)); break;
            case Qubit::C: acc += psi(u, v, x) * std::conj(psi(u, v, xp)); break;
          }
        }
      rho(x, xp) = acc;
    }
  return rho;
}

/// Two-qubit marginal with rows indexed 2·(first qubit) + (second qubit),
/// where AB → (A,B), BC → (B,C), AC → (A,C).
inline DensityMatrix4 partial_trace(const PureState3Q& psi, Pair keep) {
  const auto amp = [&](std::size_t first, std::size_t second, std::size_t traced) -> cplx {
    switch (keep) {
      case Pair::AB: return psi(first, second, traced);
      case Pair::BC: return psi(traced, first, second);
      case Pair::AC: return psi(first, traced, second);
    }
    return {};
  };
  DensityMatrix4 rho{};
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t ap = 0; ap < 2; ++ap)
        for (std::size_t bp = 0; bp < 2; ++bp) {
          cplx acc{};
          for (std::size_t t = 0; t < 2; ++t) acc += amp(a, b, t) * std::conj(amp(ap, bp, t));
          rho(2 * a + b, 2 * ap + bp) = acc;
        }
  return rho;
}

/// Single-qubit marginals of the first and second qubit of a pair.
constexpr std::array<Qubit, 2> qubits_of(Pair p) {
  switch (p) {
    case Pair::AB: return {Qubit::A, Qubit::B};
    case Pair::BC: return {Qubit::B, Qubit::C};
    case Pair::AC: return {Qubit::A, Qubit::C};
  }
  return {Qubit::A, Qubit::B};
}

enum class OperatorKind { Unitary, SL2C };

struct LocalOperator {
  ComplexMatrix<2> m = ComplexMatrix<2>::identity();
  OperatorKind kind = OperatorKind::Unitary;

  static LocalOperator identity() { return {}; }

  static LocalOperator unitary(const ComplexMatrix<2>& u, double tol = 1e-10) {
    const double err = max_abs_diff(u.adjoint() * u, ComplexMatrix<2>::identity());
    if (!(err <= tol)) throw Error(ErrorKind::InvalidInput, "operator is not unitary, residual " + std::to_string(err));
    return {u, OperatorKind::Unitary};
  }

  static LocalOperator sl2c(const ComplexMatrix<2>& a, double tol = 1e-10) {
    const double err = std::abs(det2(a) - cplx(1.0));
    if (!(err <= tol))
      throw Error(ErrorKind::NotUnitDeterminant, "determinant deviates from 1 by " + std::to_string(err));
    return {a, OperatorKind::SL2C};
  }
};

/// c' = (A⊗B⊗C) c, optionally renormalized.
inline PureState3Q apply_local(const PureState3Q& psi, const LocalOperator& a, const LocalOperator& b,
                               const LocalOperator& c, bool renormalize) {
  for (const auto* op : {&a, &b, &c})
    if (!all_finite(op->m) || std::abs(det2(op->m)) <= 1e-12)
      throw Error(ErrorKind::SingularOperator, "local operator is singular");
  PureState3Q out;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) {
        cplx acc{};
        for (std::size_t ip = 0; ip < 2; ++ip)
          for (std::size_t jp = 0; jp < 2; ++jp)
            for (std::size_t kp = 0; kp < 2; ++kp)
              acc += a.m(i, ip) * b.m(j, jp) * c.m(k, kp) * psi(ip, jp, kp);
        out(i, j, k) = acc;
      }
  if (!renormalize) return out;
  const double nrm = std::sqrt(out.norm_squared());
  if (nrm < 1e-14) throw Error(ErrorKind::ZeroState, "transformed state vanished");
  for (auto& x : out.amplitudes) x /= nrm;
  return out;
}

namespace detail {

inline cplx complex_gaussian(std::mt19937_64& gen) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const double re = nd(gen);
  const double im = nd(gen);
  return {re, im};
}

}  // namespace detail

/// Seed of the index-th draw of a seeded batch (splitmix64 finalizer), so
/// batches can be split across workers without changing any sample.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Independent standard complex Gaussians, normalized. Deterministic per seed.
/// The result is not phase-canonicalized.
inline PureState3Q haar_random_state(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  PureState3Q s;
  for (auto& a : s.amplitudes) a = detail::complex_gaussian(gen);
  const double nrm = std::sqrt(s.norm_squared());
  for (auto& a : s.amplitudes) a /= nrm;
  return s;
}

/// Haar-distributed 2x2 unitary.
inline LocalOperator random_unitary(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  cplx a = detail::complex_gaussian(gen);
  cplx b = detail::complex_gaussian(gen);
  const double nrm = std::sqrt(std::norm(a) + std::norm(b));
  a /= nrm;
  b /= nrm;
  std::uniform_real_distribution<double> ud(0.0, 2.0 * M_PI);
  const cplx phase = std::polar(1.0, ud(gen));
  ComplexMatrix<2> u{{a * phase, -std::conj(b) * phase, b * phase, std::conj(a) * phase}};
  return {u, OperatorKind::Unitary};
}

constexpr int kMaxSamplingAttempts = 10000;

/// Unit-determinant operator with largest singular value ≤ scale_bound, so the
/// condition number is at most scale_bound².
inline LocalOperator random_sl2c(std::uint64_t seed, double scale_bound) {
  if (!(scale_bound >= 1.0)) throw Error(ErrorKind::InvalidInput, "scale_bound must be >= 1");
  std::mt19937_64 gen(seed);
  for (int attempt = 0; attempt < kMaxSamplingAttempts; ++attempt) {
    ComplexMatrix<2> g;
    for (auto& x : g.data) x = detail::complex_gaussian(gen);
    const cplx d = det2(g);
    if (std::abs(d) < 0.1) continue;
    g *= 1.0 / std::sqrt(d);
    if (svd_2x2(g).s[0] > scale_bound) continue;
    return {g, OperatorKind::SL2C};
  }
  throw Error(ErrorKind::SamplingFailure, "random_sl2c exceeded the attempt limit");
}

/// Full-rank two-qubit density matrix W W† / Tr(W W†) from a complex Ginibre W.
inline DensityMatrix4 random_density4(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  ComplexMatrix<4> w;
  for (auto& x : w.data) x = detail::complex_gaussian(gen);
  ComplexMatrix<4> rho = w * w.adjoint();
  rho *= cplx(1.0 / rho.trace().real());
  return rho;
}

}  // namespace lorinv
