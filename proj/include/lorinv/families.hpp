#pragma once

// Permutation-symmetric three-qubit families with closed-form Γ spectra,
// concurrence and tangle:
//   one parameter:   (√3 cos(β/2)|000⟩ + sin(β/2)|W⟩) / √(2 + cos β)
//   three parameter: N(|000⟩ + y e^{iφ} |β⟩^{⊗3}),  |β⟩ = cos(β/2)|0⟩ + sin(β/2)|1⟩

#include <cmath>
#include <string>

#include "lorinv/error.hpp"
#include "lorinv/states.hpp"

namespace lorinv {

namespace detail {

constexpr double kDomainSlack = 1e-12;

inline void check_beta(double beta) {
  if (!(beta > 0.0 && beta <= M_PI + kDomainSlack))
    throw Error(ErrorKind::DomainError, "beta must lie in (0, pi], got " + std::to_string(beta));
}

inline void check_three(double y, double beta, double phi) {
  check_beta(beta);
  if (!(y > 0.0 && y <= 1.0 + kDomainSlack))
    throw Error(ErrorKind::DomainError, "y must lie in (0, 1], got " + std::to_string(y));
  if (!(phi >= -kDomainSlack && phi <= 2.0 * M_PI + kDomainSlack))
    throw Error(ErrorKind::DomainError, "phi must lie in [0, 2pi], got " + std::to_string(phi));
}

}  // namespace detail

inline PureState3Q one_param_state(double beta) {
  detail::check_beta(beta);
  const double n = 1.0 / std::sqrt(2.0 + std::cos(beta));
  const double zero = n * std::sqrt(3.0) * std::cos(beta / 2.0);
  const double w = n * std::sin(beta / 2.0) / std::sqrt(3.0);
  PureState3Q s;
  s(0, 0, 0) = zero;
  s(0, 0, 1) = w;
  s(0, 1, 0) = w;
  s(1, 0, 0) = w;
  return s;
}

struct OneParamClosedForms {
  double u = 0.0;    ///< μ₀ = μ₂
  double C = 0.0;
  double tau = 0.0;
};

inline OneParamClosedForms one_param_closed_forms(double beta) {
  detail::check_beta(beta);
  const double c = (1.0 - std::cos(beta)) / (3.0 * (2.0 + std::cos(beta)));
  return {c * c, c, 0.0};
}

/// D = 1 + y² + 2y cos φ cos³(β/2), the inverse squared normalization.
inline double three_param_denominator(double y, double beta, double phi) {
  const double c = std::cos(beta / 2.0);
  return 1.0 + y * y + 2.0 * y * std::cos(phi) * c * c * c;
}

inline PureState3Q three_param_state(double y, double beta, double phi) {
  detail::check_three(y, beta, phi);
  const double d = three_param_denominator(y, beta, phi);
  if (!(d >= 1e-12)) throw Error(ErrorKind::DegenerateNormalization, "normalization denominator below 1e-12");
  const double n = 1.0 / std::sqrt(d);
  const std::array<double, 2> ket{std::cos(beta / 2.0), std::sin(beta / 2.0)};
  const cplx amp = y * std::polar(1.0, phi);
  PureState3Q s;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) s(i, j, k) = n * amp * ket[i] * ket[j] * ket[k];
  s(0, 0, 0) += n;
  return s;
}

struct ThreeParamClosedForms {
  double B = 0.0;
  double mu0 = 0.0;           ///< 2B
  double mu2 = 0.0;           ///< B(1 + cos β)
  double tau = 0.0;           ///< (2y sin³(β/2) / D)²
  double C_paper = 0.0;       ///< 2y sin β sin(β/2) / D, as printed
  double C_consistent = 0.0;  ///< √μ₂
  double D = 0.0;
};

/// The printed concurrence expression equals 2√μ₂, twice the Wootters value
/// of these states; both are returned.
inline ThreeParamClosedForms three_param_closed_forms(double y, double beta, double phi) {
  detail::check_three(y, beta, phi);
  ThreeParamClosedForms f;
  f.D = three_param_denominator(y, beta, phi);
  if (!(f.D >= 1e-12)) throw Error(ErrorKind::DegenerateNormalization, "normalization denominator below 1e-12");
  const double cb = std::cos(beta);
  f.B = y * y * (1.0 - cb) * (1.0 - cb) / (2.0 * f.D * f.D);
  f.mu0 = 2.0 * f.B;
  f.mu2 = f.B * (1.0 + cb);
  const double s3 = std::pow(std::sin(beta / 2.0), 3);
  f.tau = std::pow(2.0 * y * s3 / f.D, 2);
  f.C_paper = 2.0 * y * std::sin(beta) * std::sin(beta / 2.0) / f.D;
  f.C_consistent = std::sqrt(std::max(f.mu2, 0.0));
  return f;
}

}  // namespace lorinv
