#pragma once

// Five-term canonical form of three-qubit pure states,
//   λ₀|000⟩ + λ₁e^{iφ}|100⟩ + λ₂|101⟩ + λ₃|110⟩ + λ₄|111⟩,
// its closed-form Λ / Γ / invariant expressions, and the two-qubit canonical
// forms of Γ (Bell-diagonal for case I, recognition only for case II).

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lorinv/error.hpp"
#include "lorinv/invariants.hpp"
#include "lorinv/mink.hpp"
#include "lorinv/qmath.hpp"
#include "lorinv/states.hpp"

namespace lorinv {

struct AcinParams {
  std::array<double, 5> lambda{};
  double phi = 0.0;  ///< in [0, π]

  /// Δ = |λ₁λ₄e^{iφ} − λ₂λ₃|²
  double delta() const {
    return std::norm(lambda[1] * lambda[4] * std::polar(1.0, phi) - lambda[2] * lambda[3]);
  }
};

inline PureState3Q acin_state(const AcinParams& p) {
  PureState3Q s;
  s(0, 0, 0) = p.lambda[0];
  s(1, 0, 0) = p.lambda[1] * std::polar(1.0, p.phi);
  s(1, 0, 1) = p.lambda[2];
  s(1, 1, 0) = p.lambda[3];
  s(1, 1, 1) = p.lambda[4];
  return s;
}

struct AcinDecomposition {
  AcinParams params;
  ComplexMatrix<2> u_a{}, u_b{}, u_c{};  ///< (U_A⊗U_B⊗U_C)|ψ⟩ = canonical state
  PureState3Q canonical;                 ///< the transformed input
  double support_residual = 0.0;         ///< largest amplitude off the five kets
  double reconstruction_residual = 0.0;  ///< max |transformed − acin_state(params)|
};

constexpr double kReductionTol = 1e-7;
constexpr double kPhaseGaugeTol = 1e-10;

namespace detail {

inline ComplexMatrix<2> slice(const PureState3Q& s, std::size_t i) {
  return ComplexMatrix<2>{{s(i, 0, 0), s(i, 0, 1), s(i, 1, 0), s(i, 1, 1)}};
}

/// Unit vectors (a, b) with det(a·T₀ + b·T₁) = 0.
inline std::vector<std::array<cplx, 2>> slice_roots(const ComplexMatrix<2>& t0, const ComplexMatrix<2>& t1) {
  const cplx d0 = det2(t0);
  const cplx d1 = det2(t1);
  const cplx m = t0(0, 0) * t1(1, 1) + t1(0, 0) * t0(1, 1) - t0(0, 1) * t1(1, 0) - t1(0, 1) * t0(1, 0);
  const auto unit = [](cplx a, cplx b) {
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    return std::array<cplx, 2>{a / n, b / n};
  };
  std::vector<std::array<cplx, 2>> out;
  const double scale = std::max({std::abs(d0), std::abs(d1), std::abs(m)});
  if (scale <= 1e-14) {
    // Every combination is singular; take the one of largest Frobenius norm.
    ComplexMatrix<2> gram{};
    const std::array<const ComplexMatrix<2>*, 2> t{&t0, &t1};
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y)
        for (std::size_t k = 0; k < 4; ++k) gram(x, y) += std::conj(t[x]->data[k]) * t[y]->data[k];
    const auto es = hermitian_eigensystem(gram);
    out.push_back(unit(es.vectors(0, 1), es.vectors(1, 1)));
    out.push_back(unit(1.0, 0.0));
    out.push_back(unit(0.0, 1.0));
    return out;
  }
  // Homogeneous quadratic d0·a² + m·ab + d1·b²; divide by the larger end coefficient.
  const bool by_b = std::abs(d1) >= std::abs(d0);
  const cplx lead = by_b ? d1 : d0;
  const cplx tail = by_b ? d0 : d1;
  const cplx sd = std::sqrt(m * m - 4.0 * lead * tail);
  const cplx q = -0.5 * (m + (std::real(std::conj(m) * sd) >= 0.0 ? sd : -sd));
  // Roots q/lead and tail/q, kept as ratios so a vanishing lead is harmless.
  if (std::abs(q) == 0.0) {
    out.push_back(by_b ? unit(1.0, 0.0) : unit(0.0, 1.0));
    return out;
  }
  if (by_b) {
    out.push_back(unit(lead, q));
    out.push_back(unit(q, tail));
  } else {
    out.push_back(unit(q, lead));
    out.push_back(unit(tail, q));
  }
  return out;
}

inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

struct Candidate {
  AcinDecomposition dec;
  bool phase_ok = false;
};

inline Candidate reduce_with_root(const PureState3Q& psi, const std::array<cplx, 2>& root) {
  const cplx a = root[0];
  const cplx b = root[1];
  const ComplexMatrix<2> ua{{a, b, -std::conj(b), std::conj(a)}};
  const auto id = LocalOperator::identity();
  const PureState3Q s1 = apply_local(psi, {ua, OperatorKind::Unitary}, id, id, false);

  const auto svd = svd_2x2(slice(s1, 0));
  const ComplexMatrix<2> ub = svd.u.adjoint();
  const ComplexMatrix<2> uc = svd.v.transpose();  // M' = U_B M U_Cᵀ = U† (U S V†) V
  const PureState3Q s2 = apply_local(s1, id, {ub, OperatorKind::Unitary}, {uc, OperatorKind::Unitary}, false);

  // Kets 100, 101, 110, 111 and the diagonal phases (a1, b1, c1) acting on them.
  const std::array<cplx, 4> z{s2(1, 0, 0), s2(1, 0, 1), s2(1, 1, 0), s2(1, 1, 1)};
  std::array<double, 4> mag{}, th{};
  for (std::size_t n = 0; n < 4; ++n) {
    mag[n] = std::abs(z[n]);
    th[n] = std::arg(z[n]);
  }
  const bool gauge = std::min({mag[0], mag[1], mag[2], mag[3]}) <= kPhaseGaugeTol;
  double a1 = 0.0, b1 = 0.0, c1 = 0.0, phi = 0.0;
  std::size_t absorb = 0;  // ket whose phase equation is dropped
  if (gauge) {
    absorb = static_cast<std::size_t>(std::min_element(mag.begin(), mag.end()) - mag.begin());
  }
  // Equations: th100 + a1 = phi, th101 + a1 + c1 = 0, th110 + a1 + b1 = 0, th111 + a1 + b1 + c1 = 0.
  switch (absorb) {
    case 0:
      c1 = th[2] - th[3];
      b1 = th[1] - th[3];
      a1 = -th[1] + th[3] - th[2];
      phi = gauge ? 0.0 : wrap_angle(th[0] + a1);
      break;
    case 1:  // 101 free
      a1 = -th[0];
      b1 = -th[2] - a1;
      c1 = -th[3] - a1 - b1;
      break;
    case 2:  // 110 free
      a1 = -th[0];
      c1 = -th[1] - a1;
      b1 = -th[3] - a1 - c1;
      break;
    default:  // 111 free
      a1 = -th[0];
      b1 = -th[2] - a1;
      c1 = -th[1] - a1;
      break;
  }

  const ComplexMatrix<2> pa = ComplexMatrix<2>::diagonal({1.0, std::polar(1.0, a1)});
  const ComplexMatrix<2> pb = ComplexMatrix<2>::diagonal({1.0, std::polar(1.0, b1)});
  const ComplexMatrix<2> pc = ComplexMatrix<2>::diagonal({1.0, std::polar(1.0, c1)});

  Candidate out;
  auto& dec = out.dec;
  dec.u_a = pa * ua;
  dec.u_b = pb * ub;
  dec.u_c = pc * uc;
  dec.canonical = apply_local(psi, {dec.u_a, OperatorKind::Unitary}, {dec.u_b, OperatorKind::Unitary},
                              {dec.u_c, OperatorKind::Unitary}, false);
  const auto& c = dec.canonical;
  dec.params.lambda = {std::abs(c(0, 0, 0)), std::abs(c(1, 0, 0)), std::abs(c(1, 0, 1)), std::abs(c(1, 1, 0)),
                       std::abs(c(1, 1, 1))};
  // Rounding can push φ = 0 or φ = π just outside [0, π].
  if (phi < 0.0 && phi > -1e-12) phi = 0.0;
  if (phi < -M_PI + 1e-12) phi = M_PI;
  dec.params.phi = phi;
  out.phase_ok = phi >= 0.0;
  dec.support_residual = std::max({std::abs(c(0, 0, 1)), std::abs(c(0, 1, 0)), std::abs(c(0, 1, 1))});
  dec.reconstruction_residual = max_abs_diff(c, acin_state(dec.params));
  return out;
}

}  // namespace detail

/// Local unitaries and parameters of the five-term canonical form.
///
/// Both roots of the slice quadratic are tried. They give opposite signs of φ
/// on generic input, so the branch with φ ∈ [0, π] is kept; among admissible
/// branches the larger λ₀ wins, then the smaller φ.
inline AcinDecomposition acin_reduce(const PureState3Q& psi) {
  if (!psi.finite()) throw Error(ErrorKind::InvalidInput, "non-finite amplitude");
  if (std::abs(psi.norm_squared() - 1.0) > 1e-10) throw Error(ErrorKind::InvalidInput, "state is not normalized");

  const auto roots = detail::slice_roots(detail::slice(psi, 0), detail::slice(psi, 1));
  std::optional<AcinDecomposition> best;
  double best_residual = 0.0;
  for (const auto& r : roots) {
    const auto cand = detail::reduce_with_root(psi, r);
    const auto& d = cand.dec;
    const double res = std::max(d.support_residual, d.reconstruction_residual);
    if (!cand.phase_ok || res > kReductionTol) continue;
    if (!best) {
      best = d;
      best_residual = res;
      continue;
    }
    const double dl = d.params.lambda[0] - best->params.lambda[0];
    if (dl > 1e-12 || (std::abs(dl) <= 1e-12 && d.params.phi < best->params.phi - 1e-12) ||
        (std::abs(dl) <= 1e-12 && std::abs(d.params.phi - best->params.phi) <= 1e-12 && res < best_residual)) {
      best = d;
      best_residual = res;
    }
  }
  if (!best) throw Error(ErrorKind::ReductionFailure, "no admissible branch of the slice quadratic");
  double sum = 0.0;
  for (double l : best->params.lambda) sum += l * l;
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error(ErrorKind::ReductionFailure, "lambda norm deviates by " + std::to_string(std::abs(sum - 1.0)));
  return *best;
}

/// Λ of a pair marginal of the canonical state, entry by entry.
inline LambdaMatrix acin_lambda_closed_form(const AcinParams& p, Pair pair) {
  const auto& l = p.lambda;
  const double cp = std::cos(p.phi);
  const double sp = std::sin(p.phi);
  const double l0 = l[0], l1 = l[1], l2 = l[2], l3 = l[3], l4 = l[4];
  LambdaMatrix out;
  auto& m = out.m;
  switch (pair) {
    case Pair::AB:
      m = RealMatrix4{{1.0, 2 * (l2 * l4 + l1 * l3 * cp), -2 * l1 * l3 * sp, 1 - 2 * (l3 * l3 + l4 * l4),
                       2 * l0 * l1 * cp, 2 * l0 * l3, 0.0, 2 * l0 * l1 * cp,
                       2 * l0 * l1 * sp, 0.0, -2 * l0 * l3, 2 * l0 * l1 * sp,
                       2 * l0 * l0 - 1, -2 * (l2 * l4 + l1 * l3 * cp), 2 * l1 * l3 * sp, 1 - 2 * (l1 * l1 + l2 * l2)}};
      break;
    case Pair::BC:
      m = RealMatrix4{{1.0, 2 * (l3 * l4 + l1 * l2 * cp), -2 * l1 * l2 * sp, 1 - 2 * (l2 * l2 + l4 * l4),
                       2 * (l2 * l4 + l1 * l3 * cp), 2 * (l2 * l3 + l1 * l4 * cp), -2 * l1 * l4 * sp,
                       -2 * (l2 * l4 - l1 * l3 * cp),
                       -2 * l1 * l3 * sp, -2 * l1 * l4 * sp, 2 * (l2 * l3 - l1 * l4 * cp), -2 * l1 * l3 * sp,
                       1 - 2 * (l3 * l3 + l4 * l4), -2 * (l3 * l4 - l1 * l2 * cp), -2 * l1 * l2 * sp,
                       1 - 2 * (l2 * l2 + l3 * l3)}};
      break;
    case Pair::AC:
      m = RealMatrix4{{1.0, 2 * (l3 * l4 + l1 * l2 * cp), -2 * l1 * l2 * sp, 1 - 2 * (l2 * l2 + l4 * l4),
                       2 * l0 * l1 * cp, 2 * l0 * l2, 0.0, 2 * l0 * l1 * cp,
                       2 * l0 * l1 * sp, 0.0, -2 * l0 * l2, 2 * l0 * l1 * sp,
                       2 * l0 * l0 - 1, -2 * (l3 * l4 + l1 * l2 * cp), 2 * l1 * l2 * sp, 1 - 2 * (l1 * l1 + l3 * l3)}};
      break;
  }
  return out;
}

struct MuPair {
  double mu0 = 0.0;
  double mu2 = 0.0;
};

inline MuPair acin_gamma_eigs_closed_form(const AcinParams& p, Pair pair) {
  const auto& l = p.lambda;
  const double l02 = l[0] * l[0];
  switch (pair) {
    case Pair::AB: return {4 * l02 * (l[3] * l[3] + l[4] * l[4]), 4 * l02 * l[3] * l[3]};
    case Pair::BC: {
      const double d = p.delta();
      return {4 * (d + l02 * l[4] * l[4]), 4 * d};
    }
    case Pair::AC: return {4 * l02 * (l[2] * l[2] + l[4] * l[4]), 4 * l02 * l[2] * l[2]};
  }
  return {};
}

struct ClosedFormInvariants {
  double I1 = 0.0, I2 = 0.0, I3 = 0.0, I4 = 0.0, I5 = 0.0;
  double K1 = 0.0, K2 = 0.0, K3 = 0.0, K4 = 0.0, K5 = 0.0;
  double tau = 0.0;
};

/// LU and SLOCC invariants as polynomials in the canonical parameters.
/// K1..K3 here are Tr[ρρ̃], i.e. C² + τ/2.
inline ClosedFormInvariants acin_invariants_closed_form(const AcinParams& p) {
  const auto& l = p.lambda;
  const double l0 = l[0] * l[0], l1 = l[1] * l[1], l2 = l[2] * l[2], l3 = l[3] * l[3], l4 = l[4] * l[4];
  const double d = p.delta();
  ClosedFormInvariants c;
  c.I1 = 1 - 2 * l0 * (1 - l0 - l1);
  c.I2 = 1 - 2 * l0 * (1 - l0 - l1 - l2) - 2 * d;
  c.I3 = 1 - 2 * l0 * (1 - l0 - l1 - l3) - 2 * d;
  c.I4 = 1 + l0 * (l2 * l3 - l1 * l4 - 2 * l2 - 3 * l3 - 3 * l4) - (2 - l0) * d;
  c.I5 = l0 * l0 * l4 * l4;
  c.K1 = 4 * l0 * l3 + 2 * l0 * l4;
  c.K2 = 4 * d + 2 * l0 * l4;
  c.K3 = 4 * l0 * l2 + 2 * l0 * l4;
  c.K4 = l0 * (d + l2 * l3 - l1 * l4 + l3 + l4);
  c.K5 = c.I5;
  c.tau = 4 * l0 * l4;
  return c;
}

struct TwoQubitClassification {
  TwoQubitCase kind = TwoQubitCase::Ambiguous;
  GammaSpectrum spectrum;
};

inline TwoQubitClassification classify_two_qubit(const DensityMatrix4& rho) {
  const auto spec = gamma_spectrum(gamma_of(lambda_of(rho)));
  return {spec.kind, spec};
}

struct BellDiagonalForm {
  LorentzMatrix la{}, lb{};
  LambdaMatrix lambda_bar;
  DensityMatrix4 rho_bar{};
  std::array<double, 4> mu{};
  double off_diagonal = 0.0;  ///< max off-diagonal |Λ̄|
};

namespace detail {

/// G-orthonormal vectors spanning span(vectors) whose G-Gram is diagonal ±1.
inline std::vector<std::pair<Vec4, double>> g_orthonormalize(const RealMatrix4& basis, std::size_t dim) {
  const auto form = restricted_metric(basis, dim);
  std::vector<std::pair<Vec4, double>> out;
  for (std::size_t e = 4 - dim; e < 4; ++e) {
    const double n = form.values[e];
    if (std::abs(n) < 1e-9) throw Error(ErrorKind::DegenerateFrame, "null vector inside a Gamma eigenspace");
    Vec4 x{};
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t k = 0; k < dim; ++k) x[r] += basis(r, k) * form.vectors(k, e);
    const double s = 1.0 / std::sqrt(std::abs(n));
    for (auto& v : x) v *= s;
    out.emplace_back(x, n > 0 ? 1.0 : -1.0);
  }
  return out;
}

}  // namespace detail

/// SLOCC frame in which Λ becomes diag(1, √(μ₁/μ₀), √(μ₂/μ₀), ±√(μ₃/μ₀)),
/// the sign being that of det Λ.
inline BellDiagonalForm bell_diagonal_form(const DensityMatrix4& rho) {
  const LambdaMatrix lam = lambda_of(rho);
  const RealMatrix4 gamma = gamma_of(lam);
  const GammaSpectrum spec = gamma_spectrum(gamma);
  if (spec.kind != TwoQubitCase::I)
    throw Error(ErrorKind::NotCaseI, std::string("two-qubit state is case ") + to_string(spec.kind));

  // Eigenvectors per cluster, G-orthonormalized inside each eigenspace.
  struct Frame {
    Vec4 x;
    double sign;
    double mu;
  };
  std::vector<Frame> frames;
  std::size_t offset = 0;
  for (const auto& cl : spec.clusters) {
    RealMatrix4 shifted = gamma;
    const double value = spec.mu[offset];
    for (std::size_t i = 0; i < 4; ++i) shifted(i, i) -= value;
    const auto svd = jacobi_svd(shifted);
    RealMatrix4 basis{};
    const auto dim = static_cast<std::size_t>(cl.multiplicity);
    for (std::size_t k = 0; k < dim; ++k)
      for (std::size_t r = 0; r < 4; ++r) basis(r, k) = svd.v(r, 4 - dim + k);
    for (const auto& [x, sign] : detail::g_orthonormalize(basis, dim)) frames.push_back({x, sign, value});
    offset += dim;
  }
  const auto timelike = std::count_if(frames.begin(), frames.end(), [](const Frame& f) { return f.sign > 0; });
  if (timelike != 1) throw Error(ErrorKind::DegenerateFrame, "eigenbasis does not have Lorentzian signature");
  std::stable_sort(frames.begin(), frames.end(), [](const Frame& a, const Frame& b) {
    if (a.sign != b.sign) return a.sign > b.sign;
    return a.mu > b.mu;
  });

  BellDiagonalForm out;
  for (std::size_t b = 0; b < 4; ++b) out.mu[b] = frames[b].mu;
  if (frames[0].x[0] < 0.0)
    for (auto& v : frames[0].x) v = -v;
  for (std::size_t b = 0; b < 4; ++b)
    for (std::size_t r = 0; r < 4; ++r) out.la(b, r) = frames[b].x[r];
  if (determinant(out.la) < 0.0)
    for (std::size_t r = 0; r < 4; ++r) out.la(3, r) = -out.la(3, r);

  // Partner frame on the second qubit: Y_β = GΛᵀX_β / √μ_β, completed where μ_β = 0.
  const RealMatrix4 glt = kMetric * lam.m.transpose();
  const double mu_floor = 1e-12 * std::max(1.0, out.mu[0]);
  std::array<Vec4, 4> y{};
  std::array<bool, 4> have{};
  for (std::size_t b = 0; b < 4; ++b) {
    if (out.mu[b] <= mu_floor) continue;
    const Vec4 xb = {out.la(b, 0), out.la(b, 1), out.la(b, 2), out.la(b, 3)};
    y[b] = glt * xb;
    const double s = 1.0 / std::sqrt(out.mu[b]);
    for (auto& v : y[b]) v *= s;
    have[b] = true;
  }
  if (!have[0]) throw Error(ErrorKind::DegenerateFrame, "vanishing leading eigenvalue");
  std::size_t candidate = 0;
  const std::array<Vec4, 4> units{{{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}}};
  for (std::size_t b = 1; b < 4; ++b) {
    while (!have[b]) {
      if (candidate >= units.size()) throw Error(ErrorKind::DegenerateFrame, "cannot complete the second frame");
      Vec4 v = units[candidate++];
      for (std::size_t j = 0; j < 4; ++j) {
        if (!have[j]) continue;
        const double eta = j == 0 ? 1.0 : -1.0;
        const double proj = detail::minkowski(y[j], v) * eta;
        for (std::size_t r = 0; r < 4; ++r) v[r] -= proj * y[j][r];
      }
      const double n = detail::minkowski(v, v);
      if (n < -1e-6) {
        const double s = 1.0 / std::sqrt(-n);
        for (auto& c : v) c *= s;
        y[b] = v;
        have[b] = true;
      }
    }
  }
  for (std::size_t b = 0; b < 4; ++b)
    for (std::size_t r = 0; r < 4; ++r) out.lb(b, r) = y[b][r];

  RealMatrix4 t = out.la * lam.m * out.lb.transpose();
  for (std::size_t b = 1; b < 3; ++b)
    if (t(b, b) < 0.0) {
      for (std::size_t r = 0; r < 4; ++r) out.lb(b, r) = -out.lb(b, r);
    }
  if (determinant(out.lb) < 0.0)
    for (std::size_t r = 0; r < 4; ++r) out.lb(3, r) = -out.lb(3, r);

  out.lambda_bar = act_slocc_on_lambda(lam, out.la, out.lb);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) out.off_diagonal = std::max(out.off_diagonal, std::abs(out.lambda_bar(i, j)));
  out.rho_bar = rho_of_lambda(out.lambda_bar);
  return out;
}

struct CaseTwoForm {
  double mu0 = 0.0;
  double mu2 = 0.0;
  std::optional<double> phi0;  ///< set only when the input already has the canonical shape
  std::optional<double> gamma0;
  std::optional<double> gamma2;
  double shape_residual = 0.0;
};

/// Reads μ₀, μ₂ off a case-II Γ and, when Γ is already
///   [[φ₀, 0, 0, φ₀−μ₀], [0, μ₂, 0, 0], [0, 0, μ₂, 0], [μ₀−φ₀, 0, 0, 2μ₀−φ₀]],
/// also φ₀, γ₀ = μ₀/φ₀ and γ₂ = √(μ₂/φ₀).
inline CaseTwoForm recognize_case_two(const RealMatrix4& gamma, double shape_tol = 1e-9) {
  const auto spec = gamma_spectrum(gamma);
  if (spec.kind != TwoQubitCase::II)
    throw Error(ErrorKind::NotCaseII, std::string("Gamma is case ") + to_string(spec.kind));
  CaseTwoForm out;
  out.mu0 = spec.mu[0];
  out.mu2 = spec.mu[2];
  const double phi0 = gamma(0, 0);
  const RealMatrix4 expected{{phi0, 0, 0, phi0 - out.mu0, 0, out.mu2, 0, 0, 0, 0, out.mu2, 0, out.mu0 - phi0, 0, 0,
                              2 * out.mu0 - phi0}};
  out.shape_residual = max_abs_diff(gamma, expected);
  if (out.shape_residual <= shape_tol * std::max(1.0, max_abs(gamma)) && phi0 > 0.0) {
    out.phi0 = phi0;
    out.gamma0 = out.mu0 / phi0;
    out.gamma2 = std::sqrt(out.mu2 / phi0);
  }
  return out;
}

}  // namespace lorinv
