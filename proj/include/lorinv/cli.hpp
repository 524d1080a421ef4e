#pragma once

// Batch front-end logic: state files, invariant reports, family scans, the
// Monte-Carlo verification suite and canonical-form output. The executable in
// tools/ only parses arguments and maps errors onto exit codes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "lorinv/canonical.hpp"
#include "lorinv/error.hpp"
#include "lorinv/families.hpp"
#include "lorinv/invariants.hpp"
#include "lorinv/mink.hpp"
#include "lorinv/states.hpp"

namespace lorinv::cli {

using json = nlohmann::ordered_json;

inline constexpr std::string_view kStateFormat = "3q-pure-v1";
inline constexpr std::string_view kReportFormat = "3q-report-v1";
inline constexpr std::string_view kCanonicalFormat = "3q-acin-v1";

enum ExitCode : int { kOk = 0, kInputError = 1, kIdentityViolation = 2 };

inline int exit_code_for(const Error& e) { return e.is_identity_violation() ? kIdentityViolation : kInputError; }

// ---------------------------------------------------------------------------
// files

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::InvalidInput, "write to '" + path + "' failed");
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, origin + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// 3q-pure-v1

struct LoadedState {
  PureState3Q raw;
  PureState3Q state;  ///< normalized, phase-canonical
  double norm = 0.0;  ///< of the raw amplitudes
};

inline double json_number(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::InvalidInput, where + ": missing '" + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorKind::InvalidInput, where + ": '" + key + "' is not a number");
  return v.get<double>();
}

inline LoadedState state_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidInput, "state document is not an object");
  if (!j.contains("format") || !j.at("format").is_string() || j.at("format").get<std::string>() != kStateFormat)
    throw Error(ErrorKind::InvalidInput, "format must be \"" + std::string(kStateFormat) + "\"");
  if (!j.contains("amplitudes") || !j.at("amplitudes").is_array())
    throw Error(ErrorKind::InvalidInput, "'amplitudes' must be an array");
  const auto& amps = j.at("amplitudes");
  if (amps.size() != 8)
    throw Error(ErrorKind::InvalidInput, "expected 8 amplitudes, got " + std::to_string(amps.size()));
  LoadedState out;
  for (std::size_t n = 0; n < 8; ++n) {
    const std::string where = "amplitudes[" + std::to_string(n) + "]";
    out.raw.amplitudes[n] = cplx(json_number(amps[n], "re", where), json_number(amps[n], "im", where));
  }
  if (!out.raw.finite()) throw Error(ErrorKind::InvalidInput, "non-finite amplitude");
  out.norm = std::sqrt(out.raw.norm_squared());
  out.state = normalize(out.raw);
  return out;
}

inline LoadedState read_state_file(const std::string& path) {
  return state_from_json(parse_json_text(read_text_file(path), path));
}

inline json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json state_to_json(const PureState3Q& s) {
  json amps = json::array();
  for (const auto& a : s.amplitudes) amps.push_back(complex_json(a));
  return json{{"format", kStateFormat}, {"amplitudes", amps}};
}

/// Row-major list of [re, im] pairs.
template <std::size_t N>
json matrix_json(const ComplexMatrix<N>& m) {
  json out = json::array();
  for (const auto& z : m.data) out.push_back(json::array({z.real(), z.imag()}));
  return out;
}

template <typename Array>
json array_json(const Array& a) {
  json out = json::array();
  for (const auto& x : a) out.push_back(x);
  return out;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// analyze

struct InvariantReport {
  double norm = 0.0;
  PureState3Q state;
  LUInvariants lu;
  SLOCCInvariants slocc;
  std::array<PairEntanglement, 3> pairs;
  TangleReport tangle;
  AcinDecomposition acin;
  std::array<TwoQubitCase, 3> case_by_pair{};
  std::vector<std::string> warnings;
};

/// Throws lorinv::Error when any internal identity fails at the library
/// tolerances.
inline InvariantReport analyze(const LoadedState& in) {
  InvariantReport r;
  r.norm = in.norm;
  r.state = in.state;
  if (std::abs(in.norm - 1.0) > 1e-12) {
    std::ostringstream w;
    w.precision(17);
    w << "input norm " << in.norm << " renormalized to 1";
    r.warnings.push_back(w.str());
  }
  r.lu = lu_invariants(r.state);
  r.slocc = slocc_invariants(r.state);
  r.pairs = all_pairs(r.state);
  r.tangle = tangle_report(r.lu.I5, r.pairs);
  r.acin = acin_reduce(r.state);
  for (std::size_t p = 0; p < 3; ++p) {
    r.case_by_pair[p] = r.pairs[p].spectrum.kind;
    if (r.case_by_pair[p] == TwoQubitCase::Ambiguous)
      r.warnings.push_back(std::string("pair ") + to_string(kAllPairs[p]) +
                           ": two-qubit case not decidable at the working tolerance");
  }
  const auto& l = r.acin.params.lambda;
  if (std::min({l[1], l[2], l[3], l[4]}) <= kPhaseGaugeTol)
    r.warnings.push_back("acin: phase is a gauge freedom for this state, phi reported as 0");
  return r;
}

inline json pair_json(const PairEntanglement& p, TwoQubitCase kind) {
  json j;
  j["pair"] = to_string(p.pair);
  j["case"] = to_string(kind);
  j["mu"] = array_json(p.spectrum.mu);
  j["mu0"] = p.mu0;
  j["mu2"] = p.mu2;
  j["nu"] = array_json(p.all_nus);
  j["concurrence"] = p.concurrence;
  j["rho_rho_tilde"] = p.rho_rho_tilde;
  j["quarter_trace_gamma"] = p.quarter_trace_gamma;
  j["dominant_norm"] = p.spectrum.dominant_norm;
  j["residuals"] = json{{"mu2_vs_concurrence", p.bridge_residual},
                        {"gap_vs_nu", p.gap_residual},
                        {"trace_routes", p.trace_residual}};
  return j;
}

inline json report_json(const InvariantReport& r) {
  json j;
  j["format"] = kReportFormat;
  j["norm"] = r.norm;
  j["state"] = state_to_json(r.state)["amplitudes"];
  j["I"] = json{{"I1", r.lu.I1}, {"I2", r.lu.I2}, {"I3", r.lu.I3}, {"I4", r.lu.I4}, {"I5", r.lu.I5},
                {"kempe", r.lu.kempe}, {"kempe_terms", array_json(r.lu.kempe_terms)}};
  j["K"] = json{{"K1", r.slocc.K1}, {"K2", r.slocc.K2}, {"K3", r.slocc.K3}, {"K4", r.slocc.K4}, {"K5", r.slocc.K5}};
  json pairs = json::array();
  for (std::size_t p = 0; p < 3; ++p) pairs.push_back(pair_json(r.pairs[p], r.case_by_pair[p]));
  j["pairs"] = pairs;
  j["tangle"] = r.tangle.tau;
  j["gaps"] = array_json(r.tangle.gaps);
  j["acin"] = json{{"lambda", array_json(r.acin.params.lambda)},
                   {"phi", r.acin.params.phi},
                   {"delta", r.acin.params.delta()}};
  json cases;
  for (std::size_t p = 0; p < 3; ++p) cases[to_string(kAllPairs[p])] = to_string(r.case_by_pair[p]);
  j["case_by_pair"] = cases;
  j["residuals"] = json{{"i4_routes", r.lu.i4_route_residual},
                        {"kempe_spread", r.lu.kempe_spread},
                        {"k_routes", r.slocc.max_route_residual},
                        {"k_vs_concurrence_tangle", r.slocc.max_consistency_residual},
                        {"gap_spread", r.tangle.gap_spread},
                        {"gap_vs_tangle", r.tangle.max_gap_residual},
                        {"acin_support", r.acin.support_residual},
                        {"acin_reconstruction", r.acin.reconstruction_residual}};
  j["warnings"] = array_json(r.warnings);
  return j;
}

// ---------------------------------------------------------------------------
// canonical

inline json canonical_json(const LoadedState& in, const AcinDecomposition& d) {
  json j;
  j["format"] = kCanonicalFormat;
  j["norm"] = in.norm;
  j["lambda"] = array_json(d.params.lambda);
  j["phi"] = d.params.phi;
  j["delta"] = d.params.delta();
  j["u_a"] = matrix_json(d.u_a);
  j["u_b"] = matrix_json(d.u_b);
  j["u_c"] = matrix_json(d.u_c);
  j["support_residual"] = d.support_residual;
  j["reconstruction_residual"] = d.reconstruction_residual;
  return j;
}

// ---------------------------------------------------------------------------
// grids

/// Accepts plain decimals and multiples of pi: "pi", "-pi/2", "2pi/3", "2*pi/3", "0.5pi".
inline double parse_grid_number(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(static_cast<char>(std::tolower(c)));
  const auto plain = [&](const std::string& t) -> double {
    if (t.empty()) throw Error(ErrorKind::InvalidInput, "empty number in grid spec");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidInput, "bad number '" + t + "' in grid spec");
    }
    if (used != t.size() || !std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "bad number '" + t + "' in grid spec");
    return v;
  };
  const auto at = s.find("pi");
  if (at == std::string::npos) return plain(s);
  std::string coef = s.substr(0, at);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double factor = 1.0;
  if (coef == "-")
    factor = -1.0;
  else if (coef == "+" || coef.empty())
    factor = 1.0;
  else
    factor = plain(coef);
  const std::string rest = s.substr(at + 2);
  double div = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw Error(ErrorKind::InvalidInput, "bad number '" + s + "' in grid spec");
    div = plain(rest.substr(1));
    if (div == 0.0) throw Error(ErrorKind::InvalidInput, "division by zero in grid spec");
  }
  return factor * M_PI / div;
}

/// Inclusive linspace; n = 1 yields lo.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? lo : (i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return v;
}

/// "key=lo:hi:n,key=value,..." → key → sample points.
inline std::map<std::string, std::vector<double>> parse_grid(std::string_view spec) {
  std::map<std::string, std::vector<double>> out;
  std::string buf(spec);
  std::stringstream ss(buf);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidInput, "grid item '" + item + "' lacks '='");
    std::string key = item.substr(0, eq);
    key.erase(std::remove_if(key.begin(), key.end(), [](unsigned char c) { return std::isspace(c); }), key.end());
    if (key.empty()) throw Error(ErrorKind::InvalidInput, "grid item '" + item + "' has an empty key");
    if (out.count(key)) throw Error(ErrorKind::InvalidInput, "grid key '" + key + "' given twice");
    std::vector<std::string> parts;
    std::stringstream ps(item.substr(eq + 1));
    std::string part;
    while (std::getline(ps, part, ':')) parts.push_back(part);
    if (parts.size() == 1) {
      out[key] = {parse_grid_number(parts[0])};
    } else if (parts.size() == 3) {
      const double lo = parse_grid_number(parts[0]);
      const double hi = parse_grid_number(parts[1]);
      const double n = parse_grid_number(parts[2]);
      if (!(n >= 0.0) || n != std::floor(n) || n > 1e7)
        throw Error(ErrorKind::InvalidInput, "grid count for '" + key + "' must be a non-negative integer");
      out[key] = linspace(lo, hi, static_cast<std::size_t>(n));
    } else {
      throw Error(ErrorKind::InvalidInput, "grid item '" + item + "' must be key=value or key=lo:hi:n");
    }
  }
  return out;
}

enum class Family { One, Three };

inline Family parse_family(std::string_view name) {
  if (name == "one") return Family::One;
  if (name == "three") return Family::Three;
  throw Error(ErrorKind::InvalidInput, "family must be 'one' or 'three'");
}

/// Grid points of a family in row order (last key fastest).
inline std::vector<std::vector<double>> family_points(Family f, std::string_view spec) {
  auto grid = parse_grid(spec);
  const std::vector<std::string> keys =
      f == Family::One ? std::vector<std::string>{"beta"} : std::vector<std::string>{"y", "beta", "phi"};
  for (const auto& [k, v] : grid)
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw Error(ErrorKind::InvalidInput, "unknown grid key '" + k + "'");
  std::size_t total = 1;
  for (const auto& k : keys) {
    if (!grid.count(k)) throw Error(ErrorKind::InvalidInput, "grid lacks '" + k + "'");
    total *= grid[k].size();
  }
  if (total == 0) throw Error(ErrorKind::InvalidInput, "empty grid");
  std::vector<std::vector<double>> pts;
  pts.reserve(total);
  std::vector<std::size_t> idx(keys.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::vector<double> p(keys.size());
    for (std::size_t k = 0; k < keys.size(); ++k) p[k] = grid[keys[k]][idx[k]];
    pts.push_back(std::move(p));
    for (std::size_t k = keys.size(); k-- > 0;) {
      if (++idx[k] < grid[keys[k]].size()) break;
      idx[k] = 0;
    }
  }
  return pts;
}

// ---------------------------------------------------------------------------
// family scans

struct ScanRow {
  std::vector<std::pair<std::string, double>> cells;
  double max_residual = 0.0;
  bool factor2_flag = false;
};

struct Numeric {
  double mu0, mu2, C, tau, gap_residual;
};

inline Numeric numeric_of(const PureState3Q& psi) {
  const auto inf = std::numeric_limits<double>::infinity();
  const auto ab = pair_entanglement(psi, Pair::AB, inf);
  const double tau = 4.0 * std::sqrt(std::max(hyperdeterminant(psi), 0.0));
  return {ab.mu0, ab.mu2, ab.concurrence, tau, std::abs((ab.mu0 - ab.mu2) - tau)};
}

inline double nan_as_inf(double x) { return std::isnan(x) ? std::numeric_limits<double>::infinity() : x; }

inline ScanRow scan_one(double beta) {
  const auto num = numeric_of(one_param_state(beta));
  const auto cf = one_param_closed_forms(beta);
  ScanRow r;
  const double res_mu0 = std::abs(num.mu0 - cf.u), res_mu2 = std::abs(num.mu2 - cf.u);
  const double res_c = std::abs(num.C - cf.C), res_tau = std::abs(num.tau - cf.tau);
  r.max_residual = nan_as_inf(std::max({res_mu0, res_mu2, res_c, res_tau, num.gap_residual}));
  r.cells = {{"beta", beta},         {"mu0", num.mu0},         {"mu2", num.mu2},       {"C_numeric", num.C},
             {"C_closed", cf.C},     {"tau_numeric", num.tau}, {"tau_closed", cf.tau}, {"mu_closed", cf.u},
             {"res_mu0", res_mu0},   {"res_mu2", res_mu2},     {"res_C", res_c},       {"res_tau", res_tau},
             {"res_gap", num.gap_residual}, {"max_residual", r.max_residual}};
  return r;
}

/// The factor-2 flag marks rows where the printed concurrence expression
/// disagrees with the Wootters value; C_paper / C_numeric is then exactly 2.
inline ScanRow scan_three(double y, double beta, double phi) {
  const auto num = numeric_of(three_param_state(y, beta, phi));
  const auto cf = three_param_closed_forms(y, beta, phi);
  ScanRow r;
  const double res_mu0 = std::abs(num.mu0 - cf.mu0), res_mu2 = std::abs(num.mu2 - cf.mu2);
  const double res_c = std::abs(num.C - cf.C_consistent), res_tau = std::abs(num.tau - cf.tau);
  r.max_residual = nan_as_inf(std::max({res_mu0, res_mu2, res_c, res_tau, num.gap_residual}));
  r.factor2_flag = std::abs(cf.C_paper - num.C) > 1e-9;
  const double ratio = num.C > 1e-12 ? cf.C_paper / num.C : std::numeric_limits<double>::quiet_NaN();
  r.cells = {{"y", y},
             {"beta", beta},
             {"phi", phi},
             {"mu0", num.mu0},
             {"mu2", num.mu2},
             {"C_numeric", num.C},
             {"C_paper", cf.C_paper},
             {"C_consistent", cf.C_consistent},
             {"tau_numeric", num.tau},
             {"tau_closed", cf.tau},
             {"mu0_closed", cf.mu0},
             {"mu2_closed", cf.mu2},
             {"res_mu0", res_mu0},
             {"res_mu2", res_mu2},
             {"res_C", res_c},
             {"res_tau", res_tau},
             {"res_gap", num.gap_residual},
             {"max_residual", r.max_residual},
             {"C_paper_over_numeric", ratio}};
  return r;
}

inline std::vector<ScanRow> scan_family(Family f, std::string_view spec) {
  std::vector<ScanRow> rows;
  for (const auto& p : family_points(f, spec))
    rows.push_back(f == Family::One ? scan_one(p[0]) : scan_three(p[0], p[1], p[2]));
  return rows;
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string scan_csv(Family f, const std::vector<ScanRow>& rows) {
  std::string out;
  if (rows.empty()) return out;
  for (std::size_t c = 0; c < rows[0].cells.size(); ++c) {
    if (c) out += ',';
    out += rows[0].cells[c].first;
  }
  if (f == Family::Three) out += ",factor2_flag";
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.cells.size(); ++c) {
      if (c) out += ',';
      out += format_double(r.cells[c].second);
    }
    if (f == Family::Three) out += r.factor2_flag ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  double slocc_bound = 16.0;  ///< condition-number bound on each SL(2,C) factor
  double tol = 1e-8;
  unsigned threads = 1;
};

struct Identity {
  const char* name;
  const char* description;
  bool gating;
};

/// Gating lines are theorems that must hold to tol. The non-gating lines
/// measure K1..K5 drift under arbitrary SL(2,C) triples on all three qubits,
/// where only K5 (unnormalized) is invariant; they are reported, not enforced.
inline const std::vector<Identity>& verify_identities() {
  static const std::vector<Identity> ids = {
      {"mu2_eq_concurrence_sq", "|mu2 - C^2| over AB, BC, AC", true},
      {"gap_eq_4nu1nu2", "|(mu0 - mu2) - 4 nu1 nu2| over pairs", true},
      {"gap_eq_tangle", "|(mu0 - mu2) - 4 sqrt(I5)| over pairs", true},
      {"gap_pair_spread", "max - min of mu0 - mu2 over pairs", true},
      {"two_eigenvalues", "max |(Gamma - mu0)(Gamma - mu2)| with Wootters mu0, mu2", true},
      {"trace_routes", "|Tr[rho rho~] - Tr[Gamma]/4| over pairs", true},
      {"k_routes", "K1..K4 operator-trace route vs Lambda route", true},
      {"k_eq_c2_plus_tau_half", "|K_p - C_p^2 - tau/2|", true},
      {"i4_routes", "I4 operator-trace route vs Lambda route", true},
      {"kempe_spread", "spread of the three Kempe expressions", true},
      {"lu_drift", "I1..I5, Kempe under random local unitaries", true},
      {"lambda_slocc_route", "Lambda of (A x B) rho (A x B)^dag vs L_A Lambda L_B^T (relative)", true},
      {"gamma_spectrum_slocc", "Gamma eigenvalues under A x B, relative to mu0", true},
      {"k1_pair_slocc", "K1 under SL(2,C) on A, B, unitary on C, unnormalized (relative)", true},
      {"k5_slocc", "K5 under SL(2,C)^3, unnormalized (relative)", true},
      {"lorentz_metric", "|L^T G L - G| for L of sampled SL(2,C)", true},
      {"acin_residual", "Acin reduction support and reconstruction", true},
      {"acin_lu_preserved", "I1..I5, Kempe of canonical form vs input", true},
      {"sample_errors", "samples that raised an error", true},
      {"k_drift_slocc_renormalized", "max relative drift of K1..K5 under SL(2,C)^3 with renormalization", false},
      {"k_drift_slocc_raw", "max relative drift of K1..K4 under SL(2,C)^3 without renormalization", false},
  };
  return ids;
}

struct VerifyResult {
  std::vector<double> max_residual;  ///< parallel to verify_identities()
  std::size_t samples = 0;

  bool passed(double tol) const {
    const auto& ids = verify_identities();
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i].gating && !(max_residual[i] <= tol)) return false;
    return true;
  }
};

namespace detail {

inline double rel(double a, double b, double floor = 1e-12) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline std::array<double, 6> lu_vector(const LUInvariants& l) { return {l.I1, l.I2, l.I3, l.I4, l.I5, l.kempe}; }

inline double max_diff(const std::array<double, 6>& a, const std::array<double, 6>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 6; ++i) m = std::max(m, nan_as_inf(std::abs(a[i] - b[i])));
  return m;
}

/// ρ' = (A⊗B) ρ (A⊗B)†, unnormalized.
inline DensityMatrix4 act_on_rho(const DensityMatrix4& rho, const ComplexMatrix<2>& a, const ComplexMatrix<2>& b) {
  const auto ab = kron(a, b);
  return ab * rho * ab.adjoint();
}

inline void verify_sample(const VerifyOptions& opt, std::size_t index, std::vector<double>& acc) {
  const auto inf = std::numeric_limits<double>::infinity();
  std::size_t slot = 0;
  const auto put = [&](double v) {
    acc[slot] = std::max(acc[slot], nan_as_inf(v));
    ++slot;
  };
  const std::uint64_t s = derive_seed(opt.seed, index);
  const PureState3Q psi = haar_random_state(derive_seed(s, 0));
  const double scale = std::sqrt(opt.slocc_bound);
  const auto a = random_sl2c(derive_seed(s, 1), scale);
  const auto b = random_sl2c(derive_seed(s, 2), scale);
  const auto c = random_sl2c(derive_seed(s, 3), scale);
  const auto ua = random_unitary(derive_seed(s, 4));
  const auto ub = random_unitary(derive_seed(s, 5));
  const auto uc = random_unitary(derive_seed(s, 6));

  const auto pairs = all_pairs(psi, inf);
  const auto lu = lu_invariants(psi, inf, inf);
  const auto k = slocc_invariants(psi, inf, inf);
  const auto tr = tangle_report(lu.I5, pairs, inf, inf);

  double bridge = 0.0, gapnu = 0.0, trace = 0.0, minpoly = 0.0;
  for (const auto& p : pairs) {
    bridge = std::max(bridge, p.bridge_residual);
    gapnu = std::max(gapnu, p.gap_residual);
    trace = std::max(trace, p.trace_residual);
    const auto gamma = gamma_of(lambda_of(psi, p.pair));
    const double hi = p.concurrence * p.concurrence + 4.0 * p.nus[0] * p.nus[1];
    const double lo = p.concurrence * p.concurrence;
    const RealMatrix4 id = RealMatrix4::identity();
    minpoly = std::max(minpoly, max_abs((gamma - id * hi) * (gamma - id * lo)));
  }
  put(bridge);
  put(gapnu);
  put(tr.max_gap_residual);
  put(tr.gap_spread);
  put(minpoly);
  put(trace);
  put(k.max_route_residual);
  put(k.max_consistency_residual);
  put(lu.i4_route_residual);
  put(lu.kempe_spread);

  const auto rotated = apply_local(psi, ua, ub, uc, false);
  put(max_diff(lu_vector(lu), lu_vector(lu_invariants(rotated, inf, inf))));

  const auto rho = partial_trace(psi, Pair::AB);
  const auto lam = lambda_of(rho);
  const auto la = lorentz_of_sl2c(a), lb = lorentz_of_sl2c(b);
  const RealMatrix4 moved = la * lam.m * lb.transpose();
  const auto rho_moved = act_on_rho(rho, a.m, b.m);
  const auto lam_rho = lambda_of(rho_moved);
  put(max_abs(lam_rho.m - moved) / std::max(max_abs(moved), 1e-300));

  const auto spec0 = gamma_spectrum(gamma_of(lam));
  LambdaMatrix lm;
  lm.m = moved;
  const auto spec1 = gamma_spectrum(gamma_of(lm));
  double sd = 0.0;
  for (std::size_t i = 0; i < 4; ++i) sd = std::max(sd, std::abs(spec0.mu[i] - spec1.mu[i]));
  put(sd / std::max(spec0.mu[0], 1e-12));

  const auto pair_moved = apply_local(psi, a, b, uc, false);
  const auto rp = partial_trace(pair_moved, Pair::AB);
  put(rel(k.K1, lorinv::detail::trace_real(rp * spin_flip(rp))));

  const auto full_raw = apply_local(psi, a, b, c, false);
  put(rel(k.K5, hyperdeterminant(full_raw)));

  put(std::max({is_lorentz(la).metric_residual, is_lorentz(lb).metric_residual,
                is_lorentz(lorentz_of_sl2c(c)).metric_residual}));

  const auto dec = acin_reduce(psi);
  put(std::max(dec.support_residual, dec.reconstruction_residual));
  put(max_diff(lu_vector(lu), lu_vector(lu_invariants(acin_state(dec.params), inf, inf))));

  put(0.0);  // sample_errors, filled by the caller on exceptions

  const auto full_norm = apply_local(psi, a, b, c, true);
  const auto kn = slocc_invariants(full_norm, inf, inf);
  const auto kr = slocc_invariants(full_raw, inf, inf);
  put(std::max({rel(k.K1, kn.K1), rel(k.K2, kn.K2), rel(k.K3, kn.K3), rel(k.K4, kn.K4), rel(k.K5, kn.K5)}));
  put(std::max({rel(k.K1, kr.K1), rel(k.K2, kr.K2), rel(k.K3, kr.K3), rel(k.K4, kr.K4)}));
}

}  // namespace detail

/// Samples are split into contiguous blocks per worker; maxima are combined
/// afterwards, so the result does not depend on the thread count.
inline VerifyResult run_verify(const VerifyOptions& opt) {
  if (opt.n < 1) throw Error(ErrorKind::InvalidInput, "n must be >= 1");
  if (!(opt.slocc_bound >= 1.0)) throw Error(ErrorKind::InvalidInput, "slocc bound must be >= 1");
  if (!(opt.tol >= 0.0)) throw Error(ErrorKind::InvalidInput, "tol must be >= 0");
  const std::size_t m = verify_identities().size();
  const std::size_t errors_slot = m - 3;
  const unsigned workers = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(opt.n)));
  std::vector<std::vector<double>> partial(workers, std::vector<double>(m, 0.0));
  const auto body = [&](unsigned w) {
    const std::size_t lo = opt.n * w / workers, hi = opt.n * (w + 1) / workers;
    for (std::size_t i = lo; i < hi; ++i) {
      std::vector<double> acc(m, 0.0);
      try {
        detail::verify_sample(opt, i, acc);
      } catch (const std::exception&) {
        acc.assign(m, 0.0);
        acc[errors_slot] = 1.0;
        partial[w][errors_slot] += 1.0;
        continue;
      }
      for (std::size_t k = 0; k < m; ++k) partial[w][k] = std::max(partial[w][k], acc[k]);
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  VerifyResult r;
  r.samples = opt.n;
  r.max_residual.assign(m, 0.0);
  for (const auto& p : partial)
    for (std::size_t k = 0; k < m; ++k)
      r.max_residual[k] = k == errors_slot ? r.max_residual[k] + p[k] : std::max(r.max_residual[k], p[k]);
  return r;
}

inline std::string verify_summary(const VerifyOptions& opt, const VerifyResult& r) {
  std::ostringstream out;
  out << "verify: n=" << r.samples << " seed=" << opt.seed << " slocc_bound=" << format_double(opt.slocc_bound)
      << " tol=" << format_double(opt.tol) << "\n";
  const auto& ids = verify_identities();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const bool ok = r.max_residual[i] <= opt.tol;
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %-24s %s", ids[i].name, format_double(r.max_residual[i]).c_str(),
                  ids[i].gating ? (ok ? "ok" : "FAIL") : "info (not an invariant)");
    out << line << "  # " << ids[i].description << "\n";
  }
  out << (r.passed(opt.tol) ? "result: all gating residuals within tol\n" : "result: residuals exceed tol\n");
  return out.str();
}

}  // namespace lorinv::cli
