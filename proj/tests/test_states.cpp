#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lorinv/states.hpp"
#include "oracles.hpp"

using namespace lorinv;
using Catch::Matchers::WithinAbs;

namespace {

double max_diff(const ComplexMatrix<4>& a, const oracle::CMat& b) { return (oracle::from(a) - b).cwiseAbs().maxCoeff(); }

double max_diff(const ComplexMatrix<2>& a, const oracle::CMat& b) { return (oracle::from2(a) - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("normalize fixtures", "[states]") {
  PureState3Q s;
  s(0, 0, 0) = 2.0;
  CHECK(max_abs_diff(normalize(s), PureState3Q::basis(0, 0, 0)) <= 1e-15);

  PureState3Q g;
  g(0, 0, 0) = 1.0;
  g(1, 1, 1) = 1.0;
  CHECK(max_abs_diff(normalize(g), ghz_state()) <= 1e-15);

  PureState3Q gi;
  gi(0, 0, 0) = cplx(0, 1);
  gi(1, 1, 1) = cplx(0, 1);
  const auto n = normalize(gi);
  CHECK(max_abs_diff(n, ghz_state()) <= 1e-15);
  CHECK(n(0, 0, 0).imag() == 0.0);
}

TEST_CASE("normalize rejects zero and non-finite states", "[states]") {
  PureState3Q z;
  z(0, 1, 0) = 1e-15;
  CHECK_THROWS_AS(normalize(z), Error);
  try {
    normalize(z);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroState);
  }
  PureState3Q nan;
  nan(0, 0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(normalize(nan), Error);
}

TEST_CASE("partial trace fixtures", "[states]") {
  const auto p = partial_trace(product_state(), Pair::AB);
  ComplexMatrix<4> e00{};
  e00(0, 0) = 1.0;
  CHECK(max_abs_diff(p, e00) <= 1e-15);

  const auto g = partial_trace(ghz_state(), Pair::AB);
  CHECK(max_abs_diff(g, ComplexMatrix<4>::diagonal({0.5, 0.0, 0.0, 0.5})) <= 1e-15);

  const auto w = partial_trace(w_state(), Pair::AB);
  ComplexMatrix<4> we{};
  we(0, 0) = 1.0 / 3.0;
  we(1, 1) = we(1, 2) = we(2, 1) = we(2, 2) = 1.0 / 3.0;
  CHECK(max_abs_diff(w, we) <= 1e-15);
}

TEST_CASE("partial traces agree with the brute-force reducer", "[states]") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto psi = haar_random_state(seed);
    for (Pair p : kAllPairs) CHECK(max_diff(partial_trace(psi, p), oracle::reduce(psi, oracle::qubits(p))) <= 1e-14);
    CHECK(max_diff(partial_trace(psi, Qubit::A), oracle::reduce(psi, {0})) <= 1e-14);
    CHECK(max_diff(partial_trace(psi, Qubit::B), oracle::reduce(psi, {1})) <= 1e-14);
    CHECK(max_diff(partial_trace(psi, Qubit::C), oracle::reduce(psi, {2})) <= 1e-14);
  }
}

TEST_CASE("marginal consistency, rank bound and validity", "[states]") {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> nd;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto psi = haar_random_state(seed);
    for (Pair p : kAllPairs) {
      const auto rho = partial_trace(psi, p);
      validate_density(rho);
      const auto es = hermitian_eigensystem(rho);
      CHECK(std::abs(es.values[0]) <= 1e-9);
      CHECK(std::abs(es.values[1]) <= 1e-9);

      ComplexMatrix<2> m;
      m(0, 0) = nd(gen);
      m(1, 1) = nd(gen);
      m(0, 1) = cplx(nd(gen), nd(gen));
      m(1, 0) = std::conj(m(0, 1));
      const auto [first, second] = qubits_of(p);
      const double lhs = (rho * kron(m, ComplexMatrix<2>::identity())).trace().real();
      const double lhs2 = (rho * kron(ComplexMatrix<2>::identity(), m)).trace().real();
      CHECK_THAT(lhs, WithinAbs((partial_trace(psi, first) * m).trace().real(), 1e-10));
      CHECK_THAT(lhs2, WithinAbs((partial_trace(psi, second) * m).trace().real(), 1e-10));
    }
  }
}

TEST_CASE("apply_local fixtures", "[states]") {
  const auto id = LocalOperator::identity();
  const auto psi = haar_random_state(4);
  CHECK(max_abs_diff(apply_local(psi, id, id, id, false), psi) == 0.0);

  const auto x = LocalOperator::unitary(ComplexMatrix<2>{{0.0, 1.0, 1.0, 0.0}});
  const auto flipped = apply_local(w_state(), x, id, id, false);
  PureState3Q expect;
  const double r = 1.0 / std::sqrt(3.0);
  expect(0, 0, 0) = r;
  expect(1, 1, 0) = r;
  expect(1, 0, 1) = r;
  CHECK(max_abs_diff(flipped, expect) <= 1e-15);

  const auto a = LocalOperator::sl2c(ComplexMatrix<2>::diagonal({2.0, 0.5}));
  const auto g = apply_local(ghz_state(), a, id, id, true);
  const double n = std::sqrt(17.0 / 4.0);
  CHECK_THAT(g(0, 0, 0).real(), WithinAbs(2.0 / n, 1e-15));
  CHECK_THAT(g(1, 1, 1).real(), WithinAbs(0.5 / n, 1e-15));
  CHECK_THAT(g.norm_squared(), WithinAbs(1.0, 1e-15));
}

TEST_CASE("apply_local validates operators", "[states]") {
  CHECK_THROWS_AS(LocalOperator::unitary(ComplexMatrix<2>::diagonal({2.0, 0.5})), Error);
  CHECK_THROWS_AS(LocalOperator::sl2c(ComplexMatrix<2>::diagonal({2.0, 2.0})), Error);
  LocalOperator singular{ComplexMatrix<2>::diagonal({1.0, 0.0}), OperatorKind::SL2C};
  try {
    apply_local(w_state(), singular, LocalOperator::identity(), LocalOperator::identity(), false);
    FAIL("expected SingularOperator");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularOperator);
  }
}

TEST_CASE("apply_local matches the Kronecker action and commutes with partial trace", "[states]") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto psi = haar_random_state(seed);
    const auto ua = random_unitary(3 * seed + 100), ub = random_unitary(3 * seed + 101), uc = random_unitary(3 * seed + 102);
    const auto out = apply_local(psi, ua, ub, uc, false);
    CHECK_THAT(out.norm_squared(), WithinAbs(1.0, 1e-10));
    const auto ref = oracle::apply(psi, oracle::from2(ua.m), oracle::from2(ub.m), oracle::from2(uc.m));
    CHECK(max_abs_diff(out, ref) <= 1e-14);
    const auto uab = kron(ua.m, ub.m);
    CHECK(max_abs_diff(partial_trace(out, Pair::AB), uab * partial_trace(psi, Pair::AB) * uab.adjoint()) <= 1e-10);

    const auto sa = random_sl2c(seed, 4.0);
    const auto raw = apply_local(psi, sa, LocalOperator::identity(), sa, false);
    const auto ref2 = oracle::apply(psi, oracle::from2(sa.m), oracle::from2(ComplexMatrix<2>::identity()), oracle::from2(sa.m));
    CHECK(max_abs_diff(raw, ref2) <= 1e-13);
  }
}

TEST_CASE("haar_random_state: determinism, spread and the fourth moment", "[states]") {
  CHECK(haar_random_state(123) == haar_random_state(123));
  for (std::uint64_t s = 0; s < 100; ++s) CHECK(max_abs_diff(haar_random_state(s), haar_random_state(s + 1)) > 1e-6);

  const int n = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto psi = haar_random_state(derive_seed(99, static_cast<std::uint64_t>(i)));
    CHECK_THAT(psi.norm_squared(), WithinAbs(1.0, 1e-12));
    double q = 0.0;
    for (const auto& a : psi.amplitudes) q += std::norm(a) * std::norm(a);
    sum += q;
    sum2 += q * q;
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 2.0 / 9.0) <= 3.0 * sd);
}

TEST_CASE("random_sl2c: unit determinant, determinism and condition bound", "[states]") {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto a = random_sl2c(s, 4.0);
    CHECK(std::abs(det2(a.m) - cplx(1.0)) <= 1e-12);
    const auto sv = svd_2x2(a.m);
    CHECK(sv.s[0] / sv.s[1] <= 16.0 * (1 + 1e-12));
  }
  CHECK(random_sl2c(77, 4.0).m == random_sl2c(77, 4.0).m);
  CHECK_THROWS_AS(random_sl2c(1, 0.5), Error);
}

TEST_CASE("random_density4 produces valid states", "[states]") {
  for (std::uint64_t s = 0; s < 100; ++s) validate_density(random_density4(s));
  ComplexMatrix<4> bad = ComplexMatrix<4>::diagonal({1.5, -0.5, 0.0, 0.0});
  CHECK_THROWS_AS(validate_density(bad), Error);
}
