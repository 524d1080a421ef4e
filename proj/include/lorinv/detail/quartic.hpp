#pragma once

// Characteristic-polynomial roots of a real 4x4 matrix in 113-bit binary
// floating point. A quadruple root of a Jordan block perturbs like eps^(1/4),
// so double precision alone would leave ~1e-4 scatter on the W-class spectra.

#include <array>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace lorinv {

template <typename T, std::size_t N>
struct Matrix;

namespace detail {

using Quad = boost::multiprecision::cpp_bin_float_quad;

struct QuadRoot {
  Quad re = 0;
  Quad im = 0;
};

inline Quad largest_cubic_root(const Quad& a, const Quad& b, const Quad& c) {
  // s^3 + a s^2 + b s + c
  using boost::multiprecision::acos;
  using boost::multiprecision::cbrt;
  using boost::multiprecision::cos;
  using boost::multiprecision::sqrt;
  const Quad p = b - a * a / 3;
  const Quad q = 2 * a * a * a / 27 - a * b / 3 + c;
  const Quad disc = q * q / 4 + p * p * p / 27;
  Quad z;
  if (p == 0) {
    z = cbrt(-q);
  } else if (disc > 0) {
    const Quad sd = sqrt(disc);
    z = cbrt(-q / 2 + sd) + cbrt(-q / 2 - sd);
  } else {
    const Quad r = sqrt(-p / 3);
    Quad arg = (3 * q / (2 * p)) * sqrt(-3 / p);
    if (arg > 1) arg = 1;
    if (arg < -1) arg = -1;
    z = 2 * r * cos(acos(arg) / 3);
  }
  return z - a / 3;
}

inline void solve_monic_quadratic(const Quad& b, const Quad& c, QuadRoot& r1, QuadRoot& r2) {
  // y^2 + b y + c
  using boost::multiprecision::sqrt;
  const Quad disc = b * b - 4 * c;
  if (disc >= 0) {
    const Quad sd = sqrt(disc);
    r1 = {(-b + sd) / 2, 0};
    r2 = {(-b - sd) / 2, 0};
  } else {
    const Quad sd = sqrt(-disc);
    r1 = {-b / 2, sd / 2};
    r2 = {-b / 2, -sd / 2};
  }
}

/// Four roots of det(M - tI) = 0, unordered.
inline std::array<QuadRoot, 4> quartic_roots(const Matrix<double, 4>& m) {
  using boost::multiprecision::abs;
  using boost::multiprecision::sqrt;
  using Q4 = std::array<std::array<Quad, 4>, 4>;

  Quad shift = 0;
  for (std::size_t i = 0; i < 4; ++i) shift += Quad(m(i, i));
  shift /= 4;

  Q4 n{};
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) n[r][c] = Quad(m(r, c)) - (r == c ? shift : Quad(0));

  const auto mul = [](const Q4& x, const Q4& y) {
    Q4 out{};
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t c = 0; c < 4; ++c) out[r][c] += x[r][k] * y[k][c];
    return out;
  };
  const auto trace_of_product = [](const Q4& x, const Q4& y) {
    Quad t = 0;
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t k = 0; k < 4; ++k) t += x[r][k] * y[k][r];
    return t;
  };
  const Q4 n2 = mul(n, n);
  const Quad q2 = trace_of_product(n, n);
  const Quad q3 = trace_of_product(n2, n);
  const Quad q4 = trace_of_product(n2, n2);

  // Newton identities with zero first power trace: y^4 + P y^2 + Q y + R.
  const Quad P = -q2 / 2;
  const Quad Qc = -q3 / 3;
  const Quad R = (q2 * q2 / 2 - q4) / 4;

  // Ferrari: (y^2 + s)^2 = (2s - P) y^2 - Q y + (s^2 - R) must be a square.
  const Quad s = largest_cubic_root(-P / 2, -R, (4 * P * R - Qc * Qc) / 8);
  const Quad w2 = 2 * s - P;
  const Quad w = w2 > 0 ? Quad(sqrt(w2)) : Quad(0);
  const Quad h2 = s * s - R;
  Quad h;
  if (w * w > abs(h2)) {
    h = Qc / (2 * w);
  } else {
    h = h2 > 0 ? Quad(sqrt(h2)) : Quad(0);
    if (Qc < 0) h = -h;
  }

  std::array<QuadRoot, 4> roots;
  solve_monic_quadratic(-w, s + h, roots[0], roots[1]);
  solve_monic_quadratic(w, s - h, roots[2], roots[3]);
  for (auto& r : roots) r.re += shift;
  return roots;
}

}  // namespace detail
}  // namespace lorinv
