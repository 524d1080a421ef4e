#pragma once

// Scalar invariants of three-qubit pure states: the LU set I1..I5 with the
// Kempe invariant, the SLOCC set K1..K5, Wootters concurrences and the
// three-tangle.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "lorinv/error.hpp"
#include "lorinv/mink.hpp"
#include "lorinv/qmath.hpp"
#include "lorinv/states.hpp"

namespace lorinv {

/// ρ̃ = (σ₂⊗σ₂) ρᵀ (σ₂⊗σ₂)
inline DensityMatrix4 spin_flip(const DensityMatrix4& rho) {
  const auto& yy = pauli::sigma2(2, 2);
  return yy * rho.transpose() * yy;
}

struct WoottersResult {
  std::array<double, 4> nus{};  ///< descending
  double concurrence = 0.0;
};

/// ν_k are the square roots of the eigenvalues of ρρ̃.
///
/// With ρ = ΨΨ† and Ψ = V·diag(√e), the ν are the singular values of the
/// complex-symmetric matrix Ψᵀ(σ₂⊗σ₂)Ψ, whose Gram matrix is similar to ρρ̃.
/// Zero eigenvalues of ρ stay exactly zero this way, so ν₃ = ν₄ = 0 for the
/// rank-2 marginals of pure states instead of ~1e-8 square-root noise.
inline WoottersResult wootters(const DensityMatrix4& rho) {
  const auto es = hermitian_eigensystem(rho);
  const double tr = std::max(rho.trace().real(), 0.0);
  ComplexMatrix<4> psi{};
  for (std::size_t k = 0; k < 4; ++k) {
    const double e = es.values[k] > 1e-14 * tr ? es.values[k] : 0.0;
    const double r = std::sqrt(e);
    for (std::size_t row = 0; row < 4; ++row) psi(row, k) = es.vectors(row, k) * r;
  }
  const ComplexMatrix<4> m = psi.transpose() * pauli::sigma2(2, 2) * psi;
  const auto svd = jacobi_svd(m);
  WoottersResult out;
  out.nus = svd.s;
  out.concurrence = std::max(0.0, out.nus[0] - out.nus[1] - out.nus[2] - out.nus[3]);
  return out;
}

namespace detail {

template <std::size_t N>
double trace_real(const ComplexMatrix<N>& m) {
  return m.trace().real();
}

/// Tr[(ρ_X ⊗ ρ_Y) σ] for a pair marginal σ.
inline double product_overlap(const DensityMatrix2& x, const DensityMatrix2& y, const DensityMatrix4& sigma) {
  return trace_real(kron(x, y) * sigma);
}

inline double bilinear(const Vec4& a, const RealMatrix4& m, const Vec4& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) acc += a[i] * m(i, j) * b[j];
  return acc;
}

}  // namespace detail

/// ¼ |ε ε ε ε ε ε c c c c|², summed literally over all 2¹² index tuples.
inline double hyperdeterminant(const PureState3Q& psi) {
  const auto eps = [](unsigned a, unsigned b) { return kEpsilon[a][b]; };
  cplx sum{};
  for (unsigned bits = 0; bits < 4096u; ++bits) {
    const auto bit = [bits](unsigned n) { return (bits >> n) & 1u; };
    const unsigned i1 = bit(0), i2 = bit(1), i3 = bit(2), i4 = bit(3);
    const unsigned j1 = bit(4), j2 = bit(5), j3 = bit(6), j4 = bit(7);
    const unsigned k1 = bit(8), k2 = bit(9), k3 = bit(10), k4 = bit(11);
    const int sign = eps(i1, i2) * eps(i3, i4) * eps(j1, j2) * eps(j3, j4) * eps(k1, k3) * eps(k2, k4);
    if (sign == 0) continue;
    sum += static_cast<double>(sign) * psi(i1, j1, k1) * psi(i2, j2, k2) * psi(i3, j3, k3) * psi(i4, j4, k4);
  }
  return 0.25 * std::norm(sum);
}

struct LUInvariants {
  double I1 = 0.0, I2 = 0.0, I3 = 0.0, I4 = 0.0, I5 = 0.0;
  double kempe = 0.0;
  std::array<double, 3> kempe_terms{};  ///< AB, BC, AC expressions
  double kempe_spread = 0.0;
  double i4_route_residual = 0.0;  ///< |operator trace − ¼ s_AᵀΛ s_B|
};

constexpr double kKempeTol = 1e-8;
constexpr double kRouteTol = 1e-10;

inline LUInvariants lu_invariants(const PureState3Q& psi, double kempe_tol = kKempeTol, double route_tol = kRouteTol) {
  const auto ra = partial_trace(psi, Qubit::A);
  const auto rb = partial_trace(psi, Qubit::B);
  const auto rc = partial_trace(psi, Qubit::C);
  const auto rab = partial_trace(psi, Pair::AB);
  const auto rbc = partial_trace(psi, Pair::BC);
  const auto rac = partial_trace(psi, Pair::AC);

  LUInvariants out;
  out.I1 = detail::trace_real(ra * ra);
  out.I2 = detail::trace_real(rb * rb);
  out.I3 = detail::trace_real(rc * rc);

  const auto lab = lambda_of(rab);
  out.I4 = 0.25 * detail::bilinear(lab.s_a(), lab.m, lab.s_b());
  const double i4_trace = detail::product_overlap(ra, rb, rab);
  out.i4_route_residual = std::abs(out.I4 - i4_trace);
  if (out.i4_route_residual > route_tol)
    throw Error(ErrorKind::RouteMismatch, "I4 routes differ by " + std::to_string(out.i4_route_residual));

  out.I5 = hyperdeterminant(psi);

  const double ca = detail::trace_real(ra * ra * ra);
  const double cb = detail::trace_real(rb * rb * rb);
  const double cc = detail::trace_real(rc * rc * rc);
  out.kempe_terms = {3.0 * i4_trace - ca - cb, 3.0 * detail::product_overlap(rb, rc, rbc) - cb - cc,
                     3.0 * detail::product_overlap(ra, rc, rac) - ca - cc};
  const auto [lo, hi] = std::minmax_element(out.kempe_terms.begin(), out.kempe_terms.end());
  out.kempe_spread = *hi - *lo;
  out.kempe = (out.kempe_terms[0] + out.kempe_terms[1] + out.kempe_terms[2]) / 3.0;
  if (out.kempe_spread > kempe_tol)
    throw Error(ErrorKind::KempeInconsistent, "Kempe expressions spread " + std::to_string(out.kempe_spread));
  return out;
}

struct PairEntanglement {
  Pair pair = Pair::AB;
  std::array<double, 2> nus{};  ///< (ν₁, ν₂)
  std::array<double, 4> all_nus{};
  double concurrence = 0.0;
  double mu0 = 0.0;
  double mu2 = 0.0;
  GammaSpectrum spectrum;
  double bridge_residual = 0.0;  ///< |μ₂ − C²|
  double gap_residual = 0.0;     ///< |(μ₀ − μ₂) − 4ν₁ν₂|
  double trace_residual = 0.0;   ///< |Tr[ρρ̃] − ¼TrΓ|
  double rho_rho_tilde = 0.0;    ///< Tr[ρρ̃]
  double quarter_trace_gamma = 0.0;
};

constexpr double kBridgeTol = 1e-8;

/// Γ spectrum and Wootters data of one marginal, with both bridge identities
/// checked at `tol`.
inline PairEntanglement pair_entanglement(const PureState3Q& psi, Pair pair, double tol = kBridgeTol) {
  const auto rho = partial_trace(psi, pair);
  const auto lam = lambda_of(rho);
  const auto gamma = gamma_of(lam);

  PairEntanglement out;
  out.pair = pair;
  out.spectrum = gamma_spectrum(gamma);
  out.mu0 = out.spectrum.mu[0];
  out.mu2 = out.spectrum.mu[2];
  const auto w = wootters(rho);
  out.all_nus = w.nus;
  out.nus = {w.nus[0], w.nus[1]};
  out.concurrence = w.concurrence;

  out.rho_rho_tilde = detail::trace_real(rho * spin_flip(rho));
  out.quarter_trace_gamma = 0.25 * gamma.trace();
  out.trace_residual = std::abs(out.rho_rho_tilde - out.quarter_trace_gamma);

  out.bridge_residual = std::abs(out.mu2 - out.concurrence * out.concurrence);
  out.gap_residual = std::abs((out.mu0 - out.mu2) - 4.0 * out.nus[0] * out.nus[1]);
  if (out.bridge_residual > tol)
    throw Error(ErrorKind::BridgeViolation,
                std::string("mu2 != C^2 on pair ") + to_string(pair) + ", residual " + std::to_string(out.bridge_residual));
  if (out.gap_residual > tol)
    throw Error(ErrorKind::BridgeViolation, std::string("mu0 - mu2 != 4 nu1 nu2 on pair ") + to_string(pair) +
                                                ", residual " + std::to_string(out.gap_residual));
  return out;
}

struct TangleReport {
  double tau = 0.0;                 ///< 4√I5
  std::array<double, 3> gaps{};     ///< μ₀ − μ₂ for AB, BC, AC
  double gap_spread = 0.0;
  double max_gap_residual = 0.0;    ///< max |τ − gap|
};

constexpr double kPermutationTol = 1e-7;

/// Checks a precomputed set of pair records against τ = 4√I5.
inline TangleReport tangle_report(double i5, const std::array<PairEntanglement, 3>& pairs, double tol = kBridgeTol,
                                  double permutation_tol = kPermutationTol) {
  TangleReport out;
  out.tau = 4.0 * std::sqrt(std::max(i5, 0.0));
  for (std::size_t p = 0; p < 3; ++p) {
    out.gaps[p] = pairs[p].mu0 - pairs[p].mu2;
    out.max_gap_residual = std::max(out.max_gap_residual, std::abs(out.tau - out.gaps[p]));
  }
  const auto [lo, hi] = std::minmax_element(out.gaps.begin(), out.gaps.end());
  out.gap_spread = *hi - *lo;
  if (out.gap_spread > permutation_tol)
    throw Error(ErrorKind::PermutationAsymmetry, "pairwise gaps spread " + std::to_string(out.gap_spread));
  if (out.max_gap_residual > tol)
    throw Error(ErrorKind::BridgeViolation, "tangle differs from the Gamma gap by " + std::to_string(out.max_gap_residual));
  return out;
}

inline std::array<PairEntanglement, 3> all_pairs(const PureState3Q& psi, double tol = kBridgeTol) {
  return {pair_entanglement(psi, Pair::AB, tol), pair_entanglement(psi, Pair::BC, tol),
          pair_entanglement(psi, Pair::AC, tol)};
}

inline TangleReport tangle_report(const PureState3Q& psi, double tol = kBridgeTol) {
  return tangle_report(hyperdeterminant(psi), all_pairs(psi, tol), tol);
}

/// τ = 4√I5, after checking it against μ₀ − μ₂ on every pair.
inline double three_tangle(const PureState3Q& psi) { return tangle_report(psi).tau; }

struct SLOCCInvariants {
  double K1 = 0.0, K2 = 0.0, K3 = 0.0, K4 = 0.0, K5 = 0.0;
  double max_route_residual = 0.0;        ///< operator trace vs Λ bilinear, all four K
  double max_consistency_residual = 0.0;  ///< |K_p − C_p² − τ/2|
};

inline SLOCCInvariants slocc_invariants(const PureState3Q& psi, double tol = kBridgeTol, double route_tol = kRouteTol) {
  SLOCCInvariants out;
  const double i5 = hyperdeterminant(psi);
  const double tau = 4.0 * std::sqrt(std::max(i5, 0.0));
  out.K5 = i5;

  std::array<double, 3> k{};
  for (std::size_t p = 0; p < 3; ++p) {
    const auto rho = partial_trace(psi, kAllPairs[p]);
    const auto lam = lambda_of(rho);
    const double by_trace = detail::trace_real(rho * spin_flip(rho));
    const double by_gamma = 0.25 * gamma_of(lam).trace();
    out.max_route_residual = std::max(out.max_route_residual, std::abs(by_trace - by_gamma));
    k[p] = by_trace;
    const double c = wootters(rho).concurrence;
    out.max_consistency_residual = std::max(out.max_consistency_residual, std::abs(k[p] - c * c - 0.5 * tau));
  }
  out.K1 = k[0];
  out.K2 = k[1];
  out.K3 = k[2];

  const auto rab = partial_trace(psi, Pair::AB);
  const auto lab = lambda_of(rab);
  const double k4_trace =
      detail::product_overlap(partial_trace(psi, Qubit::A), partial_trace(psi, Qubit::B), spin_flip(rab));
  const double k4_lambda = 0.25 * detail::bilinear(lab.s_a(), kMetric * lab.m * kMetric, lab.s_b());
  out.max_route_residual = std::max(out.max_route_residual, std::abs(k4_trace - k4_lambda));
  out.K4 = k4_lambda;

  if (out.max_route_residual > route_tol)
    throw Error(ErrorKind::RouteMismatch, "K routes differ by " + std::to_string(out.max_route_residual));
  if (out.max_consistency_residual > tol)
    throw Error(ErrorKind::BridgeViolation, "K_p != C_p^2 + tau/2, residual " + std::to_string(out.max_consistency_residual));
  return out;
}

}  // namespace lorinv
