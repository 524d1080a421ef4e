#include <catch2/catch_amalgamated.hpp>

#include <array>

#include "lorinv/families.hpp"
#include "lorinv/invariants.hpp"
#include "oracles.hpp"

using namespace lorinv;
using Catch::Matchers::WithinAbs;

namespace {

constexpr std::array<std::array<int, 3>, 6> kPerms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

PureState3Q permute(const PureState3Q& s, const std::array<int, 3>& p) {
  PureState3Q out;
  for (std::size_t n = 0; n < 8; ++n) {
    const std::array<std::size_t, 3> bits{n >> 2 & 1, n >> 1 & 1, n & 1};
    out(bits[static_cast<std::size_t>(p[0])], bits[static_cast<std::size_t>(p[1])],
        bits[static_cast<std::size_t>(p[2])]) = s.amplitudes[n];
  }
  return out;
}

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("one-parameter family states", "[families]") {
  CHECK(max_abs_diff(one_param_state(M_PI), w_state()) <= 1e-15);
  CHECK(max_abs_diff(one_param_state(1e-6), product_state()) <= 1e-6);
  const auto h = one_param_state(M_PI / 2);
  CHECK_THAT(h(0, 0, 0).real(), WithinAbs(std::sqrt(3.0) / std::sqrt(2.0) / std::sqrt(2.0), 1e-15));
  CHECK_THAT(h(0, 0, 1).real(), WithinAbs(1.0 / std::sqrt(2.0) / std::sqrt(3.0) / std::sqrt(2.0), 1e-15));
  CHECK_THAT(h.norm_squared(), WithinAbs(1.0, 1e-12));
  CHECK(kind_of([] { one_param_state(0.0); }) == ErrorKind::DomainError);
  CHECK(kind_of([] { one_param_state(3.5); }) == ErrorKind::DomainError);
}

TEST_CASE("one-parameter closed forms", "[families]") {
  const auto pi = one_param_closed_forms(M_PI);
  CHECK_THAT(pi.u, WithinAbs(4.0 / 9.0, 1e-15));
  CHECK_THAT(pi.C, WithinAbs(2.0 / 3.0, 1e-15));
  CHECK(pi.tau == 0.0);
  CHECK_THAT(one_param_closed_forms(M_PI / 2).C, WithinAbs(1.0 / 6.0, 1e-15));
  CHECK_THAT(one_param_closed_forms(2 * M_PI / 3).C, WithinAbs(1.0 / 3.0, 1e-15));
  CHECK(kind_of([] { one_param_closed_forms(-1.0); }) == ErrorKind::DomainError);

  for (int k = 1; k <= 50; ++k) {
    const double beta = M_PI * k / 50.0;
    const auto cf = one_param_closed_forms(beta);
    const auto psi = one_param_state(beta);
    const auto pe = pair_entanglement(psi, Pair::AB);
    CHECK_THAT(pe.mu0, WithinAbs(cf.u, 1e-10));
    CHECK_THAT(pe.mu2, WithinAbs(cf.u, 1e-10));
    CHECK_THAT(pe.concurrence, WithinAbs(cf.C, 1e-10));
    CHECK_THAT(oracle::concurrence(oracle::reduce(psi, {0, 1}), true), WithinAbs(cf.C, 1e-8));
    CHECK_THAT(4.0 * std::sqrt(hyperdeterminant(psi)), WithinAbs(0.0, 1e-7));
  }
}

TEST_CASE("three-parameter family states", "[families]") {
  CHECK(max_abs_diff(three_param_state(1.0, M_PI, 0.0), ghz_state()) <= 1e-15);

  const auto s = three_param_state(1.0, M_PI / 2, 0.0);
  const double t = std::pow(2.0, -1.5), m = 2.0 + 1.0 / std::sqrt(2.0);
  CHECK_THAT(s(0, 0, 0).real(), WithinAbs((1 + t) / std::sqrt(m), 1e-15));
  for (std::size_t n = 1; n < 8; ++n) CHECK_THAT(s.amplitudes[n].real(), WithinAbs(t / std::sqrt(m), 1e-15));

  const auto h = three_param_state(0.5, M_PI, M_PI);
  CHECK_THAT(h(0, 0, 0).real(), WithinAbs(1.0 / std::sqrt(1.25), 1e-15));
  CHECK_THAT(h(1, 1, 1).real(), WithinAbs(-0.5 / std::sqrt(1.25), 1e-15));
  CHECK(std::abs(h(1, 1, 1).imag()) <= 1e-15);

  CHECK(kind_of([] { three_param_state(0.0, 1.0, 0.0); }) == ErrorKind::DomainError);
  CHECK(kind_of([] { three_param_state(1.2, 1.0, 0.0); }) == ErrorKind::DomainError);
  CHECK(kind_of([] { three_param_state(1.0, 1.0, 7.0); }) == ErrorKind::DomainError);
  CHECK(kind_of([] { three_param_state(1.0, 1e-7, M_PI); }) == ErrorKind::DegenerateNormalization);
}

TEST_CASE("three-parameter closed forms", "[families]") {
  const auto g = three_param_closed_forms(1.0, M_PI, 0.0);
  CHECK_THAT(g.tau, WithinAbs(1.0, 1e-15));
  CHECK_THAT(g.C_paper, WithinAbs(0.0, 1e-15));
  CHECK_THAT(g.C_consistent, WithinAbs(0.0, 1e-15));

  const auto p = three_param_closed_forms(1.0, M_PI / 2, 0.0);
  CHECK_THAT(p.B, WithinAbs(0.06822746429607383, 1e-15));
  CHECK_THAT(p.mu0, WithinAbs(0.13645492859214767, 1e-15));
  CHECK_THAT(p.mu2, WithinAbs(0.06822746429607383, 1e-15));
  CHECK_THAT(p.tau, WithinAbs(0.06822746429607383, 1e-15));
  CHECK_THAT(p.C_consistent, WithinAbs(0.26120387496374137, 1e-15));
  CHECK_THAT(p.C_paper, WithinAbs(0.5224077499274827, 1e-15));
  CHECK_THAT(p.tau, WithinAbs(p.B * (1 - std::cos(M_PI / 2)), 1e-15));

  const auto z = three_param_closed_forms(1e-6, 1.0, 0.3);
  CHECK(z.B <= 1e-11);
  CHECK(z.tau <= 1e-11);
  CHECK(z.C_paper <= 1e-5);
}

TEST_CASE("families are permutation symmetric", "[families]") {
  for (int k = 1; k <= 10; ++k) {
    const double beta = M_PI * k / 10.0;
    for (const auto& s : {one_param_state(beta), three_param_state(0.1 * k, beta, 0.6 * k)}) {
      for (const auto& p : kPerms) CHECK(max_abs_diff(permute(s, p), s) <= 1e-12);
      const auto gab = gamma_of(lambda_of(s, Pair::AB));
      CHECK(max_abs_diff(gab, gamma_of(lambda_of(s, Pair::BC))) <= 1e-10);
      CHECK(max_abs_diff(gab, gamma_of(lambda_of(s, Pair::AC))) <= 1e-10);
    }
  }
}

TEST_CASE("three-parameter grid: numeric pipeline vs closed forms", "[families]") {
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int k = 0; k < 10; ++k) {
        const double y = 0.1 + 0.1 * i, beta = M_PI / 10 + (M_PI - M_PI / 10) * j / 9.0, phi = 2 * M_PI * k / 9.0;
        const auto psi = three_param_state(y, beta, phi);
        const auto cf = three_param_closed_forms(y, beta, phi);
        const auto pe = pair_entanglement(psi, Pair::AB);
        CHECK_THAT(pe.mu0, WithinAbs(cf.mu0, 1e-9));
        CHECK_THAT(pe.mu2, WithinAbs(cf.mu2, 1e-9));
        CHECK_THAT(pe.concurrence, WithinAbs(cf.C_consistent, 1e-9));
        CHECK_THAT(4.0 * std::sqrt(hyperdeterminant(psi)), WithinAbs(cf.tau, 1e-9));
        CHECK_THAT(cf.C_paper, WithinAbs(2.0 * cf.C_consistent, 1e-10));
      }
}
