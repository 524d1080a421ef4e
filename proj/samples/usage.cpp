// Invariants of a random state and of the W state, then the canonical form
// of the random state and a Bell-diagonal two-qubit marginal.

#include <cstdio>

#include "lorinv/canonical.hpp"
#include "lorinv/invariants.hpp"
#include "lorinv/states.hpp"

int main() {
  using namespace lorinv;

  const PureState3Q psi = normalize(haar_random_state(2024));
  const auto pairs = all_pairs(psi);
  const auto lu = lu_invariants(psi);
  const auto tangle = tangle_report(lu.I5, pairs);

  std::printf("pair  mu0        mu2        C^2        case\n");
  for (const auto& p : pairs)
    std::printf("%-4s  %.8f %.8f %.8f %s\n", to_string(p.pair), p.mu0, p.mu2, p.concurrence * p.concurrence,
                to_string(p.spectrum.kind));
  std::printf("tau = 4 sqrt(I5) = %.12f, gaps = %.12f %.12f %.12f\n", tangle.tau, tangle.gaps[0], tangle.gaps[1],
              tangle.gaps[2]);

  const auto k = slocc_invariants(psi);
  std::printf("K = %.8f %.8f %.8f %.8f %.8f\n", k.K1, k.K2, k.K3, k.K4, k.K5);

  const auto dec = acin_reduce(psi);
  const auto& l = dec.params.lambda;
  std::printf("lambda = (%.6f, %.6f, %.6f, %.6f, %.6f), phi = %.6f, residual %.2e\n", l[0], l[1], l[2], l[3], l[4],
              dec.params.phi, dec.reconstruction_residual);

  const auto w = slocc_invariants(w_state());
  std::printf("W: K1 = %.12f (4/9), K4 = %.12f (5/27)\n", w.K1, w.K4);

  const auto bell = bell_diagonal_form(partial_trace(psi, Pair::AB));
  std::printf("Bell-diagonal Lambda: diag(%.6f, %.6f, %.6f, %.6f), off-diagonal %.2e\n", bell.lambda_bar.m(0, 0),
              bell.lambda_bar.m(1, 1), bell.lambda_bar.m(2, 2), bell.lambda_bar.m(3, 3), bell.off_diagonal);
  return 0;
}
