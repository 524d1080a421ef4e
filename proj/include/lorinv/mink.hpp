#pragma once

// Minkowski layer: Hilbert-Schmidt coefficients Λ of two-qubit states, the
// matrix Γ = GΛGΛᵀ, the spinor map SL(2,C) → SO(3,1) and the spectral
// analysis of Γ (eigenvalues, dominant eigenvector, case label).

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lorinv/error.hpp"
#include "lorinv/qmath.hpp"
#include "lorinv/states.hpp"

namespace lorinv {

namespace pauli {

inline const ComplexMatrix<2> s0{{1.0, 0.0, 0.0, 1.0}};
inline const ComplexMatrix<2> s1{{0.0, 1.0, 1.0, 0.0}};
inline const ComplexMatrix<2> s2{{0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0}};
inline const ComplexMatrix<2> s3{{1.0, 0.0, 0.0, -1.0}};

inline const std::array<ComplexMatrix<2>, 4>& sigma() {
  static const std::array<ComplexMatrix<2>, 4> all{s0, s1, s2, s3};
  return all;
}

/// σ_α ⊗ σ_β
inline const ComplexMatrix<4>& sigma2(std::size_t alpha, std::size_t beta) {
  static const auto table = [] {
    std::array<ComplexMatrix<4>, 16> t{};
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) t[4 * a + b] = kron(sigma()[a], sigma()[b]);
    return t;
  }();
  return table[4 * alpha + beta];
}

}  // namespace pauli

/// Minkowski metric diag(1, -1, -1, -1).
inline const RealMatrix4 kMetric = RealMatrix4::diagonal({1.0, -1.0, -1.0, -1.0});

/// ε_01 = 1, ε_10 = -1.
constexpr std::array<std::array<int, 2>, 2> kEpsilon{{{0, 1}, {-1, 0}}};

/// Real 4x4 matrix Λ_αβ = Tr[ρ (σ_α ⊗ σ_β)].
struct LambdaMatrix {
  RealMatrix4 m{};

  double operator()(std::size_t a, std::size_t b) const { return m(a, b); }
  double& operator()(std::size_t a, std::size_t b) { return m(a, b); }

  /// Four-vector of the first qubit (column 0).
  Vec4 s_a() const { return column(m, 0); }
  /// Four-vector of the second qubit (row 0).
  Vec4 s_b() const { return {m(0, 0), m(0, 1), m(0, 2), m(0, 3)}; }

  std::array<std::array<double, 3>, 3> correlation() const {
    std::array<std::array<double, 3>, 3> t{};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) t[i][j] = m(i + 1, j + 1);
    return t;
  }
};

using LorentzMatrix = RealMatrix4;

inline LambdaMatrix lambda_of(const DensityMatrix4& rho, double tol = 1e-10) {
  if (!all_finite(rho)) throw Error(ErrorKind::NonHermitianInput, "non-finite entry");
  const double herm = hermiticity_residual(rho);
  if (herm > tol) throw Error(ErrorKind::NonHermitianInput, "hermiticity residual " + std::to_string(herm));
  LambdaMatrix out;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      const cplx t = (rho * pauli::sigma2(a, b)).trace();
      if (std::abs(t.imag()) > tol)
        throw Error(ErrorKind::NonHermitianInput, "imaginary Pauli coefficient " + std::to_string(t.imag()));
      out.m(a, b) = t.real();
    }
  return out;
}

inline LambdaMatrix lambda_of(const PureState3Q& psi, Pair pair) { return lambda_of(partial_trace(psi, pair)); }

/// ρ = ¼ Σ Λ_αβ σ_α ⊗ σ_β
inline DensityMatrix4 rho_of_lambda(const LambdaMatrix& lam) {
  DensityMatrix4 rho{};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) rho += pauli::sigma2(a, b) * cplx(0.25 * lam.m(a, b));
  return rho;
}

enum class Side { A, B };

/// Side A: GΛGΛᵀ. Side B: GΛᵀGΛ.
inline RealMatrix4 gamma_of(const LambdaMatrix& lam, Side side = Side::A) {
  const RealMatrix4& g = kMetric;
  if (side == Side::A) return g * lam.m * g * lam.m.transpose();
  return g * lam.m.transpose() * g * lam.m;
}

enum class TwoQubitCase { I, II, Ambiguous };

constexpr const char* to_string(TwoQubitCase c) {
  switch (c) {
    case TwoQubitCase::I: return "I";
    case TwoQubitCase::II: return "II";
    case TwoQubitCase::Ambiguous: return "ambiguous";
  }
  return "?";
}

struct GammaSpectrum {
  std::array<double, 4> mu{};  ///< descending, clamped at 0
  std::vector<RootCluster> clusters;
  std::array<cplx, 4> roots{};
  Vec4 dominant_vector{};  ///< max-|component| = 1
  double dominant_norm = 0.0;  ///< XᵀGX
  TwoQubitCase kind = TwoQubitCase::Ambiguous;

  double mu0() const { return mu[0]; }
  double mu2() const { return mu[2]; }

  /// Cluster multiplicities (2,2) or (4).
  bool two_value_degenerate() const {
    if (clusters.size() == 1) return clusters[0].multiplicity == 4;
    return clusters.size() == 2 && clusters[0].multiplicity == 2 && clusters[1].multiplicity == 2;
  }
};

constexpr double kGammaClusterTol = 1e-7;
constexpr double kPositivityTol = 1e-7;
constexpr double kNullRankTol = 1e-8;

namespace detail {

/// Orthonormal basis of the numerical null space of m; returns its dimension.
/// Columns [0, dim) of the result span it.
inline std::size_t null_space(const RealMatrix4& m, double rank_tol, RealMatrix4& basis) {
  // Right singular vectors of small singular values span ker m.
  const auto svd = jacobi_svd(m);
  std::size_t dim = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (svd.s[k] <= rank_tol) {
      for (std::size_t r = 0; r < 4; ++r) basis(r, dim) = svd.v(r, k);
      ++dim;
    }
  }
  return dim;
}

/// Eigen-decomposition of the Minkowski form restricted to span(basis[:, :dim]).
/// Unused slots are padded below the admissible range [-1, 1].
inline EigenSystem<double, 4> restricted_metric(const RealMatrix4& basis, std::size_t dim) {
  RealMatrix4 form{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i < dim && j < dim) {
        double acc = 0.0;
        for (std::size_t r = 0; r < 4; ++r) acc += basis(r, i) * kMetric(r, r) * basis(r, j);
        form(i, j) = acc;
      } else if (i == j) {
        form(i, j) = -2.0 - static_cast<double>(i);
      }
    }
  }
  return hermitian_eigensystem(form);
}

inline double minkowski(const Vec4& x, const Vec4& y) { return x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3]; }

}  // namespace detail

/// Spectrum of Γ plus the case label from the dominant eigenvector.
///
/// The dominant eigenvector is taken from ker(Γ − μ₀I); inside a degenerate
/// eigenspace the vector maximizing XᵀGX (per unit Euclidean norm) is used,
/// which is the timelike direction when one exists.
inline GammaSpectrum gamma_spectrum(const RealMatrix4& gamma, double cluster_tol = kGammaClusterTol,
                                    double pos_tol = kPositivityTol) {
  const auto spec = real4_eigenvalues(gamma, cluster_tol);
  GammaSpectrum out;
  out.roots = spec.roots;
  const double mu0_raw = spec.roots[0].real();
  for (const auto& r : spec.roots)
    if (std::abs(r.imag()) > 1e-6 * std::max(1.0, std::abs(mu0_raw)))
      throw Error(ErrorKind::ComplexSpectrum, "Gamma root with imaginary part " + std::to_string(r.imag()));
  for (std::size_t k = 0; k < 4; ++k) out.mu[k] = std::max(0.0, spec.clustered_values[k]);
  out.clusters = spec.clusters;
  for (auto& c : out.clusters) c.value = std::max(0.0, c.value);

  const double scale = std::max(max_abs(gamma), out.mu[0]);
  if (scale <= 1e-14) {
    out.kind = TwoQubitCase::Ambiguous;
    out.dominant_vector = {1.0, 0.0, 0.0, 0.0};
    out.dominant_norm = 1.0;
    return out;
  }

  RealMatrix4 shifted = gamma;
  for (std::size_t i = 0; i < 4; ++i) shifted(i, i) -= spec.clustered_values[0];
  RealMatrix4 basis{};
  std::size_t dim = detail::null_space(shifted, kNullRankTol * scale, basis);
  if (dim == 0) {
    // Tolerance too tight for this input; fall back to the smallest singular direction.
    const auto svd = jacobi_svd(shifted);
    for (std::size_t r = 0; r < 4; ++r) basis(r, 0) = svd.v(r, 3);
    dim = 1;
  }
  const auto form = detail::restricted_metric(basis, dim);
  const std::size_t top = 3;
  Vec4 x{};
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t k = 0; k < dim; ++k) x[r] += basis(r, k) * form.vectors(k, top);
  double big = 0.0;
  std::size_t arg = 0;
  for (std::size_t r = 0; r < 4; ++r)
    if (std::abs(x[r]) > big) {
      big = std::abs(x[r]);
      arg = r;
    }
  const double sgn = x[arg] < 0.0 ? -1.0 : 1.0;
  for (auto& c : x) c *= sgn / big;
  out.dominant_vector = x;
  out.dominant_norm = detail::minkowski(x, x);

  if (out.dominant_norm > pos_tol) {
    out.kind = TwoQubitCase::I;
  } else if (std::abs(out.dominant_norm) <= pos_tol && out.two_value_degenerate()) {
    out.kind = TwoQubitCase::II;
  } else {
    out.kind = TwoQubitCase::Ambiguous;
  }
  return out;
}

/// L_αβ = ½ Tr[σ_α A σ_β A†]
inline LorentzMatrix lorentz_of_sl2c(const LocalOperator& op, double tol = 1e-10) {
  const double err = std::abs(det2(op.m) - cplx(1.0));
  if (!(err <= tol)) throw Error(ErrorKind::NotUnitDeterminant, "determinant deviates from 1 by " + std::to_string(err));
  const auto adj = op.m.adjoint();
  LorentzMatrix l{};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      l(a, b) = 0.5 * (pauli::sigma()[a] * op.m * pauli::sigma()[b] * adj).trace().real();
  return l;
}

/// Λ̄ = L_A Λ L_Bᵀ / (L_A Λ L_Bᵀ)₀₀
inline LambdaMatrix act_slocc_on_lambda(const LambdaMatrix& lam, const LorentzMatrix& la, const LorentzMatrix& lb) {
  const RealMatrix4 t = la * lam.m * lb.transpose();
  if (!(std::abs(t(0, 0)) > 1e-12)) throw Error(ErrorKind::DegenerateNormalization, "(0,0) entry vanished");
  LambdaMatrix out;
  out.m = t * (1.0 / t(0, 0));
  return out;
}

struct LorentzCheck {
  bool ok = false;
  double metric_residual = 0.0;  ///< ‖LᵀGL − G‖_max
  double det = 0.0;
  double l00 = 0.0;
};

inline LorentzCheck is_lorentz(const RealMatrix4& l) {
  LorentzCheck c;
  c.metric_residual = max_abs_diff(l.transpose() * kMetric * l, kMetric);
  c.det = determinant(l);
  c.l00 = l(0, 0);
  c.ok = c.metric_residual <= 1e-9 && std::abs(c.det - 1.0) <= 1e-9 && c.l00 >= 1.0 - 1e-12;
  return c;
}

}  // namespace lorinv
