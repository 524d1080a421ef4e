#pragma once

// Fixed-size dense kernels: 2x2 / 4x4 / 8x8 matrices, cyclic Jacobi
// eigensolver for Hermitian input, one-sided Jacobi SVD, analytic 2x2 SVD and
// the analytic quartic used for the spectra of real 4x4 matrices.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <type_traits>
#include <vector>

#include "lorinv/error.hpp"

namespace lorinv {

using cplx = std::complex<double>;

namespace detail {

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

template <typename T>
constexpr T conj_if(const T& x) {
  if constexpr (is_complex<T>::value) {
    return std::conj(x);
  } else {
    return x;
  }
}

template <typename T>
constexpr double real_part(const T& x) {
  if constexpr (is_complex<T>::value) {
    return x.real();
  } else {
    return x;
  }
}

}  // namespace detail

/// Row-major N x N matrix with value semantics.
template <typename T, std::size_t N>
struct Matrix {
  static constexpr std::size_t dim = N;
  using value_type = T;

  std::array<T, N * N> data{};

  constexpr T& operator()(std::size_t r, std::size_t c) { return data[r * N + c]; }
  constexpr const T& operator()(std::size_t r, std::size_t c) const { return data[r * N + c]; }

  static constexpr Matrix zero() { return Matrix{}; }

  static constexpr Matrix identity() {
    Matrix m{};
    for (std::size_t i = 0; i < N; ++i) m(i, i) = T(1);
    return m;
  }

  static constexpr Matrix diagonal(const std::array<T, N>& d) {
    Matrix m{};
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  constexpr Matrix transpose() const {
    Matrix t{};
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  constexpr Matrix adjoint() const {
    Matrix t{};
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) t(c, r) = detail::conj_if((*this)(r, c));
    return t;
  }

  constexpr Matrix conjugate() const {
    Matrix t{};
    for (std::size_t i = 0; i < N * N; ++i) t.data[i] = detail::conj_if(data[i]);
    return t;
  }

  constexpr T trace() const {
    T s{};
    for (std::size_t i = 0; i < N; ++i) s += (*this)(i, i);
    return s;
  }

  Matrix& operator+=(const Matrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) data[i] += o.data[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) data[i] -= o.data[i];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : data) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix p{};
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t k = 0; k < N; ++k) {
        const T ark = a(r, k);
        for (std::size_t c = 0; c < N; ++c) p(r, c) += ark * b(k, c);
      }
    return p;
  }

  friend std::array<T, N> operator*(const Matrix& a, const std::array<T, N>& v) {
    std::array<T, N> out{};
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) out[r] += a(r, c) * v[c];
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

template <std::size_t N>
using ComplexMatrix = Matrix<cplx, N>;
using RealMatrix4 = Matrix<double, 4>;
using Vec4 = std::array<double, 4>;

template <typename T, std::size_t N>
double max_abs(const Matrix<T, N>& m) {
  double best = 0.0;
  for (const auto& x : m.data) best = std::max(best, std::abs(x));
  return best;
}

template <typename T, std::size_t N>
double max_abs_diff(const Matrix<T, N>& a, const Matrix<T, N>& b) {
  return max_abs(a - b);
}

template <typename T, std::size_t N>
bool all_finite(const Matrix<T, N>& m) {
  for (const auto& x : m.data) {
    if constexpr (detail::is_complex<T>::value) {
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    } else {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

/// ‖H − H†‖_max
template <typename T, std::size_t N>
double hermiticity_residual(const Matrix<T, N>& h) {
  return max_abs(h - h.adjoint());
}

template <typename T, std::size_t A, std::size_t B>
Matrix<T, A * B> kron(const Matrix<T, A>& x, const Matrix<T, B>& y) {
  Matrix<T, A * B> out{};
  for (std::size_t i = 0; i < A; ++i)
    for (std::size_t j = 0; j < A; ++j)
      for (std::size_t k = 0; k < B; ++k)
        for (std::size_t l = 0; l < B; ++l) out(i * B + k, j * B + l) = x(i, j) * y(k, l);
  return out;
}

template <typename T, std::size_t N>
Matrix<cplx, N> to_complex(const Matrix<T, N>& m) {
  Matrix<cplx, N> out{};
  for (std::size_t i = 0; i < N * N; ++i) out.data[i] = cplx(m.data[i]);
  return out;
}

template <std::size_t N>
Matrix<double, N> real_part(const ComplexMatrix<N>& m) {
  Matrix<double, N> out{};
  for (std::size_t i = 0; i < N * N; ++i) out.data[i] = m.data[i].real();
  return out;
}

template <typename T>
T det2(const Matrix<T, 2>& m) {
  return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

/// Determinant by Gaussian elimination with partial pivoting.
template <typename T, std::size_t N>
T determinant(Matrix<T, N> m) {
  T det = T(1);
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (m(piv, col) == T(0)) return T(0);
    if (piv != col) {
      for (std::size_t c = 0; c < N; ++c) std::swap(m(piv, c), m(col, c));
      det = -det;
    }
    det *= m(col, col);
    for (std::size_t r = col + 1; r < N; ++r) {
      const T f = m(r, col) / m(col, col);
      for (std::size_t c = col; c < N; ++c) m(r, c) -= f * m(col, c);
    }
  }
  return det;
}

template <typename T, std::size_t N>
std::array<T, N> column(const Matrix<T, N>& m, std::size_t c) {
  std::array<T, N> v{};
  for (std::size_t r = 0; r < N; ++r) v[r] = m(r, c);
  return v;
}

template <typename T, std::size_t N>
void set_column(Matrix<T, N>& m, std::size_t c, const std::array<T, N>& v) {
  for (std::size_t r = 0; r < N; ++r) m(r, c) = v[r];
}

namespace detail {

/// 2x2 unitary J = [[j00, j01], [j10, j11]] such that J† [[app, apq], [conj(apq), aqq]] J
/// is diagonal. app, aqq real.
template <typename T>
struct Rotation {
  T j00, j01, j10, j11;
};

template <typename T>
Rotation<T> jacobi_rotation(double app, double aqq, const T& apq) {
  const double r = std::abs(apq);
  T w = T(1);
  if (r > 0.0) w = apq / r;
  const double theta = (aqq - app) / (2.0 * r);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  // J = diag(1, conj(w)) * [[c, s], [-s, c]]
  return {T(c), T(s), -T(s) * conj_if(w), T(c) * conj_if(w)};
}

template <typename T, std::size_t N>
void rotate_columns(Matrix<T, N>& a, std::size_t p, std::size_t q, const Rotation<T>& j) {
  for (std::size_t k = 0; k < N; ++k) {
    const T akp = a(k, p);
    const T akq = a(k, q);
    a(k, p) = akp * j.j00 + akq * j.j10;
    a(k, q) = akp * j.j01 + akq * j.j11;
  }
}

template <typename T, std::size_t N>
void rotate_rows_adjoint(Matrix<T, N>& a, std::size_t p, std::size_t q, const Rotation<T>& j) {
  for (std::size_t k = 0; k < N; ++k) {
    const T apk = a(p, k);
    const T aqk = a(q, k);
    a(p, k) = conj_if(j.j00) * apk + conj_if(j.j10) * aqk;
    a(q, k) = conj_if(j.j01) * apk + conj_if(j.j11) * aqk;
  }
}

}  // namespace detail

template <typename T, std::size_t N>
struct EigenSystem {
  std::array<double, N> values{};  ///< ascending
  Matrix<T, N> vectors{};          ///< orthonormal columns
};

constexpr int kMaxJacobiSweeps = 100;

/// Cyclic Jacobi diagonalization of a Hermitian (or real symmetric) matrix.
template <typename T, std::size_t N>
EigenSystem<T, N> hermitian_eigensystem(const Matrix<T, N>& h, double hermiticity_tol = 1e-10) {
  if (!all_finite(h)) throw Error(ErrorKind::NotHermitian, "non-finite matrix entry");
  const double herm = hermiticity_residual(h);
  if (herm > hermiticity_tol)
    throw Error(ErrorKind::NotHermitian, "hermiticity residual " + std::to_string(herm));

  Matrix<T, N> a = h;
  for (std::size_t i = 0; i < N; ++i) {
    a(i, i) = T(detail::real_part(a(i, i)));
    for (std::size_t j = i + 1; j < N; ++j) {
      const T avg = (a(i, j) + detail::conj_if(a(j, i))) * 0.5;
      a(i, j) = avg;
      a(j, i) = detail::conj_if(avg);
    }
  }
  Matrix<T, N> v = Matrix<T, N>::identity();

  double scale = 0.0;
  for (const auto& x : a.data) scale += std::norm(x);
  const double tiny = std::numeric_limits<double>::min();

  bool converged = false;
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) off += std::norm(a(p, q));
    if (off <= 1e-34 * scale || off < tiny) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const T apq = a(p, q);
        if (std::abs(apq) < tiny) continue;
        const auto rot = detail::jacobi_rotation<T>(detail::real_part(a(p, p)),
                                                    detail::real_part(a(q, q)), apq);
        detail::rotate_columns(a, p, q, rot);
        detail::rotate_rows_adjoint(a, p, q, rot);
        a(p, q) = T(0);
        a(q, p) = T(0);
        a(p, p) = T(detail::real_part(a(p, p)));
        a(q, q) = T(detail::real_part(a(q, q)));
        detail::rotate_columns(v, p, q, rot);
      }
    }
  }
  if (!converged) throw Error(ErrorKind::NoConvergence, "Jacobi sweep limit reached");

  std::array<std::size_t, N> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return detail::real_part(a(x, x)) < detail::real_part(a(y, y));
  });
  EigenSystem<T, N> out;
  for (std::size_t k = 0; k < N; ++k) {
    out.values[k] = detail::real_part(a(order[k], order[k]));
    for (std::size_t r = 0; r < N; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

template <typename T, std::size_t N>
struct SingularValueDecomposition {
  Matrix<T, N> u{};
  std::array<double, N> s{};  ///< descending
  Matrix<T, N> v{};           ///< M = U diag(s) V†
};

/// One-sided (Hestenes) Jacobi SVD. Small singular values come out with
/// absolute accuracy ~eps·‖M‖, unlike square roots of Gram eigenvalues.
template <typename T, std::size_t N>
SingularValueDecomposition<T, N> jacobi_svd(const Matrix<T, N>& m) {
  if (!all_finite(m)) throw Error(ErrorKind::InvalidInput, "non-finite matrix entry");
  Matrix<T, N> a = m;
  Matrix<T, N> v = Matrix<T, N>::identity();
  const double eps = std::numeric_limits<double>::epsilon();
  const double tiny = std::numeric_limits<double>::min();
  double frob2 = 0.0;
  for (const auto& x : m.data) frob2 += std::norm(x);
  // Column pairs at roundoff level relative to the whole matrix can cycle
  // forever just above the relative threshold; their overlap is irrelevant.
  const double floor = eps * eps * frob2;
  const double rel_tol = static_cast<double>(N) * eps;

  bool converged = false;
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        double alpha = 0.0, beta = 0.0;
        T gamma{};
        for (std::size_t k = 0; k < N; ++k) {
          alpha += std::norm(a(k, p));
          beta += std::norm(a(k, q));
          gamma += detail::conj_if(a(k, p)) * a(k, q);
        }
        if (std::abs(gamma) <= rel_tol * std::sqrt(alpha * beta) || std::abs(gamma) <= floor || std::abs(gamma) < tiny)
          continue;
        rotated = true;
        const auto rot = detail::jacobi_rotation<T>(alpha, beta, gamma);
        detail::rotate_columns(a, p, q, rot);
        detail::rotate_columns(v, p, q, rot);
      }
    }
    if (!rotated) {
      converged = true;
      break;
    }
  }
  if (!converged) throw Error(ErrorKind::NoConvergence, "one-sided Jacobi sweep limit reached");

  std::array<double, N> norms{};
  for (std::size_t c = 0; c < N; ++c) {
    double s2 = 0.0;
    for (std::size_t r = 0; r < N; ++r) s2 += std::norm(a(r, c));
    norms[c] = std::sqrt(s2);
  }
  std::array<std::size_t, N> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  SingularValueDecomposition<T, N> out;
  const double cutoff = std::max(norms[order[0]], 1.0) * eps * 16.0;
  std::size_t filled = 0;
  for (std::size_t k = 0; k < N; ++k) {
    const std::size_t c = order[k];
    out.s[k] = norms[c];
    for (std::size_t r = 0; r < N; ++r) out.v(r, k) = v(r, c);
    if (norms[c] > cutoff) {
      for (std::size_t r = 0; r < N; ++r) out.u(r, k) = a(r, c) / norms[c];
      ++filled;
    }
  }
  // Complete U with Gram-Schmidt on unit vectors for the null directions.
  std::size_t basis = 0;
  for (std::size_t k = filled; k < N; ++k) {
    while (basis < N) {
      std::array<T, N> cand{};
      cand[basis++] = T(1);
      for (std::size_t j = 0; j < k; ++j) {
        T proj{};
        for (std::size_t r = 0; r < N; ++r) proj += detail::conj_if(out.u(r, j)) * cand[r];
        for (std::size_t r = 0; r < N; ++r) cand[r] -= proj * out.u(r, j);
      }
      double nrm = 0.0;
      for (const auto& x : cand) nrm += std::norm(x);
      nrm = std::sqrt(nrm);
      if (nrm > 1e-6) {
        for (std::size_t r = 0; r < N; ++r) out.u(r, k) = cand[r] / nrm;
        break;
      }
    }
  }
  return out;
}

struct Svd2 {
  ComplexMatrix<2> u{};
  std::array<double, 2> s{};
  ComplexMatrix<2> v{};
};

/// Analytic SVD of a 2x2 complex matrix, M = U diag(s) V†.
///
/// Phase convention: det V = 1 and det U = det M / |det M|, which reduces to
/// det U = det V = 1 whenever M is real-positive-determinant or singular.
inline Svd2 svd_2x2(const ComplexMatrix<2>& m) {
  if (!all_finite(m)) throw Error(ErrorKind::InvalidInput, "non-finite matrix entry");
  Svd2 out;
  // Hermitian Gram matrix M†M = [[a, b], [conj(b), d]].
  const double a = std::norm(m(0, 0)) + std::norm(m(1, 0));
  const double d = std::norm(m(0, 1)) + std::norm(m(1, 1));
  const cplx b = std::conj(m(0, 0)) * m(0, 1) + std::conj(m(1, 0)) * m(1, 1);
  const double half_tr = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), std::abs(b));
  const double lam1 = half_tr + rad;
  const cplx detm = det2(m);
  const double s1 = std::sqrt(std::max(lam1, 0.0));
  const double s2 = s1 > 0.0 ? std::abs(detm) / s1 : 0.0;
  out.s = {s1, s2};

  // Top eigenvector of M†M.
  std::array<cplx, 2> v1;
  if (std::abs(b) > 0.0) {
    v1 = {b, cplx(lam1 - a)};
    if (std::abs(lam1 - a) < std::abs(lam1 - d)) v1 = {cplx(lam1 - d), std::conj(b)};
  } else {
    v1 = (a >= d) ? std::array<cplx, 2>{1.0, 0.0} : std::array<cplx, 2>{0.0, 1.0};
  }
  const double n1 = std::sqrt(std::norm(v1[0]) + std::norm(v1[1]));
  v1[0] /= n1;
  v1[1] /= n1;
  std::array<cplx, 2> v2 = {-std::conj(v1[1]), std::conj(v1[0])};

  out.v(0, 0) = v1[0];
  out.v(1, 0) = v1[1];
  out.v(0, 1) = v2[0];
  out.v(1, 1) = v2[1];  // det V = |v1|^2 = 1

  std::array<cplx, 2> u1, u2;
  if (s1 > 0.0) {
    u1 = {(m(0, 0) * v1[0] + m(0, 1) * v1[1]) / s1, (m(1, 0) * v1[0] + m(1, 1) * v1[1]) / s1};
    const double nu = std::sqrt(std::norm(u1[0]) + std::norm(u1[1]));
    u1[0] /= nu;
    u1[1] /= nu;
  } else {
    u1 = {1.0, 0.0};
  }
  u2 = {-std::conj(u1[1]), std::conj(u1[0])};
  if (s2 > 0.0) {
    // M v2 = s2 · phase · u2; push the phase into u2.
    const cplx mv0 = m(0, 0) * v2[0] + m(0, 1) * v2[1];
    const cplx mv1 = m(1, 0) * v2[0] + m(1, 1) * v2[1];
    const cplx proj = std::conj(u2[0]) * mv0 + std::conj(u2[1]) * mv1;
    if (std::abs(proj) > 0.0) {
      const cplx phase = proj / std::abs(proj);
      u2[0] *= phase;
      u2[1] *= phase;
    }
  }
  out.u(0, 0) = u1[0];
  out.u(1, 0) = u1[1];
  out.u(0, 1) = u2[0];
  out.u(1, 1) = u2[1];
  return out;
}

struct RootCluster {
  double value = 0.0;
  int multiplicity = 0;
};

struct Real4Spectrum {
  std::array<cplx, 4> roots{};  ///< sorted by real part, descending
  std::vector<RootCluster> clusters;
  /// Each root replaced by the (real part of the) mean of its cluster.
  std::array<double, 4> clustered_values{};
};

constexpr double kDefaultClusterTol = 1e-8;

}  // namespace lorinv

#include "lorinv/detail/quartic.hpp"

namespace lorinv {

/// Spectrum of a real 4x4 matrix from its characteristic polynomial.
///
/// The polynomial comes from power traces of the trace-shifted matrix via the
/// Newton identities and is solved with Ferrari's resolvent cubic, all in
/// 113-bit arithmetic. No diagonalizability is assumed. Roots whose imaginary
/// part is within cluster_tol·max(1, |root|) are projected onto the real axis;
/// roots within cluster_tol·max(|largest root|, 1e-4), or within the
/// defective-root floor 2·sqrt(eps·max|m_ij|), of their neighbour share a
/// cluster, whose value is the mean of its members.
inline Real4Spectrum real4_eigenvalues(const RealMatrix4& m, double cluster_tol = kDefaultClusterTol) {
  if (!all_finite(m)) throw Error(ErrorKind::InvalidInput, "non-finite matrix entry");
  const auto quad_roots = detail::quartic_roots(m);

  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (quad_roots[x].re != quad_roots[y].re) return quad_roots[x].re > quad_roots[y].re;
    return quad_roots[x].im > quad_roots[y].im;
  });

  Real4Spectrum out;
  double largest = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& r = quad_roots[order[k]];
    cplx z(static_cast<double>(r.re), static_cast<double>(r.im));
    if (std::abs(z.imag()) <= cluster_tol * std::max(1.0, std::abs(z))) z = cplx(z.real(), 0.0);
    out.roots[k] = z;
    largest = std::max(largest, std::abs(z));
  }

  // A perturbed 2x2 Jordan block splits by ~sqrt(eps·‖m‖), far above any
  // relative tolerance when the eigenvalue itself is small.
  const double defect = 2.0 * std::sqrt(std::numeric_limits<double>::epsilon() * max_abs(m));
  const double thresh = std::max(cluster_tol * std::max(largest, 1e-4), defect);
  std::size_t start = 0;
  while (start < 4) {
    std::size_t end = start + 1;
    while (end < 4 && std::abs(out.roots[end] - out.roots[end - 1]) <= thresh) ++end;
    detail::Quad mean = 0;
    for (std::size_t k = start; k < end; ++k) mean += quad_roots[order[k]].re;
    mean /= static_cast<int>(end - start);
    const double value = static_cast<double>(mean);
    out.clusters.push_back({value, static_cast<int>(end - start)});
    for (std::size_t k = start; k < end; ++k) out.clustered_values[k] = value;
    start = end;
  }
  return out;
}

}  // namespace lorinv
