#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lorinv/cli.hpp"

using namespace lorinv;
using namespace lorinv::cli;
using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

const std::string kCli = LORINV_CLI_PATH;
const std::string kSamples = LORINV_SAMPLES_DIR;

struct Scratch {
  fs::path dir = fs::temp_directory_path() / ("lorinv_cli_test_" + std::to_string(::getpid()));
  Scratch() { fs::create_directories(dir); }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
};

fs::path scratch_dir() {
  static const Scratch s;
  return s.dir;
}

std::string path_in(const std::string& name) { return (scratch_dir() / name).string(); }

int run(const std::string& args, const std::string& log = "cli.log") {
  const std::string cmd = "\"" + kCli + "\" " + args + " > \"" + path_in(log) + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  REQUIRE(raw != -1);
  REQUIRE(WIFEXITED(raw));
  return WEXITSTATUS(raw);
}

std::string slurp(const std::string& p) { return read_text_file(p); }

json load(const std::string& p) { return json::parse(slurp(p)); }

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  REQUIRE(it != header.end());
  return static_cast<std::size_t>(it - header.begin());
}

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::NotCaseI;
}

json state_doc(const std::vector<std::pair<double, double>>& amps) {
  json a = json::array();
  for (const auto& [re, im] : amps) a.push_back(json{{"re", re}, {"im", im}});
  return json{{"format", "3q-pure-v1"}, {"amplitudes", a}};
}

}  // namespace

TEST_CASE("state documents are validated", "[cli]") {
  const auto ok = state_doc({{1, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}, {1, 0}});
  const auto s = state_from_json(ok);
  CHECK_THAT(s.norm, WithinAbs(std::sqrt(2.0), 1e-15));
  CHECK(max_abs_diff(s.state, ghz_state()) <= 1e-15);

  auto bad_format = ok;
  bad_format["format"] = "3q-pure-v2";
  CHECK(kind_of([&] { state_from_json(bad_format); }) == ErrorKind::InvalidInput);
  auto short_list = ok;
  short_list["amplitudes"].erase(0);
  CHECK(kind_of([&] { state_from_json(short_list); }) == ErrorKind::InvalidInput);
  auto not_number = ok;
  not_number["amplitudes"][3]["re"] = "x";
  CHECK(kind_of([&] { state_from_json(not_number); }) == ErrorKind::InvalidInput);
  auto missing = ok;
  missing["amplitudes"][2].erase("im");
  CHECK(kind_of([&] { state_from_json(missing); }) == ErrorKind::InvalidInput);
  const auto zero = state_doc(std::vector<std::pair<double, double>>(8, {0.0, 0.0}));
  CHECK(kind_of([&] { state_from_json(zero); }) == ErrorKind::ZeroState);
  CHECK(kind_of([] { parse_json_text("{\"format\":", "inline"); }) == ErrorKind::InvalidInput);
}

TEST_CASE("grid specs", "[cli]") {
  CHECK_THAT(parse_grid_number("pi"), WithinAbs(M_PI, 1e-15));
  CHECK_THAT(parse_grid_number("pi/2"), WithinAbs(M_PI / 2, 1e-15));
  CHECK_THAT(parse_grid_number("2pi/3"), WithinAbs(2 * M_PI / 3, 1e-15));
  CHECK_THAT(parse_grid_number("2*pi/3"), WithinAbs(2 * M_PI / 3, 1e-15));
  CHECK_THAT(parse_grid_number("-PI"), WithinAbs(-M_PI, 1e-15));
  CHECK_THAT(parse_grid_number("0.25"), WithinAbs(0.25, 0.0));
  for (const char* bad : {"", "abc", "pi/0", "1.0x", "pi*2", "nan"})
    CHECK(kind_of([&] { parse_grid_number(bad); }) == ErrorKind::InvalidInput);

  const auto g = parse_grid("beta=pi/181:pi:181");
  REQUIRE(g.at("beta").size() == 181);
  CHECK(g.at("beta").front() == M_PI / 181);
  CHECK(g.at("beta").back() == M_PI);
  CHECK(family_points(Family::Three, "y=1,beta=pi/2,phi=0").size() == 1);
  CHECK(family_points(Family::Three, "y=0.1:1:10, beta=pi/10:pi:10, phi=0:2pi:10").size() == 1000);
  const auto pts = family_points(Family::Three, "y=0.5:1:2,beta=1:2:2,phi=0:1:2");
  CHECK(pts[0] == std::vector<double>{0.5, 1, 0});
  CHECK(pts[1] == std::vector<double>{0.5, 1, 1});
  CHECK(pts[7] == std::vector<double>{1, 2, 1});

  for (const char* bad : {"", "beta=0.1:pi:0", "beta", "beta=1:2", "beta=1,beta=2", "gamma=1", "beta=1:2:2.5"})
    CHECK(kind_of([&] { family_points(Family::One, bad); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { family_points(Family::Three, "y=1,beta=1"); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { parse_family("two"); }) == ErrorKind::InvalidInput);
}

TEST_CASE("analyze: fixtures through the executable", "[cli]") {
  REQUIRE(run("analyze --in \"" + kSamples + "/ghz.json\" --out \"" + path_in("ghz_report.json") + "\"") == 0);
  const auto g = load(path_in("ghz_report.json"));
  CHECK(g["format"] == "3q-report-v1");
  CHECK_THAT(g["tangle"].get<double>(), WithinAbs(1.0, 1e-10));
  CHECK_THAT(g["norm"].get<double>(), WithinAbs(std::sqrt(2.0), 1e-15));
  for (const auto& p : g["pairs"]) CHECK_THAT(p["concurrence"].get<double>(), WithinAbs(0.0, 1e-10));
  CHECK_THAT(g["I"]["I5"].get<double>(), WithinAbs(1.0 / 16.0, 1e-10));
  CHECK(g["case_by_pair"]["AB"] == "I");
  CHECK(g["warnings"].size() >= 1);

  REQUIRE(run("analyze --in \"" + kSamples + "/w.json\" --out \"" + path_in("w_report.json") + "\"") == 0);
  const auto w = load(path_in("w_report.json"));
  CHECK_THAT(w["tangle"].get<double>(), WithinAbs(0.0, 1e-10));
  for (const auto& p : w["pairs"]) CHECK_THAT(p["concurrence"].get<double>(), WithinAbs(2.0 / 3.0, 1e-10));
  CHECK_THAT(w["I"]["kempe"].get<double>(), WithinAbs(2.0 / 9.0, 1e-10));
  CHECK(w["case_by_pair"]["BC"] == "II");
}

TEST_CASE("analyze: exit codes for bad input", "[cli]") {
  write_text_file(path_in("malformed.json"), "{\"format\": \"3q-pure-v1\", \"amplitudes\": [");
  CHECK(run("analyze --in \"" + path_in("malformed.json") + "\" --out \"" + path_in("never.json") + "\"", "err.log") == 1);
  CHECK_FALSE(fs::exists(path_in("never.json")));
  const auto err = slurp(path_in("err.log"));
  CHECK(err.find("error:") != std::string::npos);
  CHECK(err.find("\"format\"") == std::string::npos);

  CHECK(run("analyze --in \"" + path_in("does_not_exist.json") + "\" --out \"" + path_in("x.json") + "\"") == 1);
  write_text_file(path_in("zero.json"), dump(state_doc(std::vector<std::pair<double, double>>(8, {0.0, 0.0}))));
  CHECK(run("analyze --in \"" + path_in("zero.json") + "\" --out \"" + path_in("x.json") + "\"") == 1);
  CHECK(run("analyze --in \"" + kSamples + "/w.json\"") == 1);
  CHECK(run("no-such-command") == 1);
  CHECK(run("") == 1);
}

TEST_CASE("analyze: byte-identical reruns and value-preserving round trip", "[cli]") {
  const auto psi = haar_random_state(2718);
  write_text_file(path_in("random.json"), dump(state_to_json(psi)));
  REQUIRE(run("analyze --in \"" + path_in("random.json") + "\" --out \"" + path_in("r1.json") + "\"") == 0);
  REQUIRE(run("analyze --in \"" + path_in("random.json") + "\" --out \"" + path_in("r2.json") + "\"") == 0);
  CHECK(slurp(path_in("r1.json")) == slurp(path_in("r2.json")));

  const auto report = load(path_in("r1.json"));
  const auto direct = report_json(analyze(state_from_json(state_to_json(psi))));
  CHECK(report == json::parse(dump(direct)));
  CHECK(report["I"]["I4"].get<double>() == direct["I"]["I4"].get<double>());

  // feeding the normalized state back reproduces every number bit for bit
  json again_in{{"format", "3q-pure-v1"}, {"amplitudes", report["state"]}};
  write_text_file(path_in("again.json"), dump(again_in));
  REQUIRE(run("analyze --in \"" + path_in("again.json") + "\" --out \"" + path_in("r3.json") + "\"") == 0);
  auto r3 = load(path_in("r3.json"));
  CHECK(r3["state"] == report["state"]);
  CHECK(r3["I"] == report["I"]);
  CHECK(r3["K"] == report["K"]);
  CHECK(r3["pairs"] == report["pairs"]);
  CHECK(r3["tangle"] == report["tangle"]);
  CHECK(r3["acin"] == report["acin"]);
}

TEST_CASE("canonical: fixtures", "[cli]") {
  const double r2 = 1.0 / std::sqrt(2.0), r3 = 1.0 / std::sqrt(3.0);
  const std::vector<std::pair<std::string, std::array<double, 5>>> cases{
      {"ghz", {r2, 0, 0, 0, r2}}, {"w", {r3, 0, r3, r3, 0}}, {"product", {1, 0, 0, 0, 0}}};
  for (const auto& [name, expect] : cases) {
    REQUIRE(run("canonical --in \"" + kSamples + "/" + name + ".json\" --out \"" + path_in(name + "_c.json") + "\"") == 0);
    const auto c = load(path_in(name + "_c.json"));
    CHECK(c["format"] == "3q-acin-v1");
    for (std::size_t i = 0; i < 5; ++i) CHECK_THAT(c["lambda"][i].get<double>(), WithinAbs(expect[i], 1e-12));
    CHECK(c["u_a"].size() == 4);
    CHECK(c["u_a"][0].size() == 2);
    CHECK(c["reconstruction_residual"].get<double>() <= 1e-12);
  }
}

TEST_CASE("canonical: unitaries in the file reproduce the canonical state", "[cli]") {
  const auto psi = haar_random_state(31415);
  write_text_file(path_in("c_in.json"), dump(state_to_json(psi)));
  REQUIRE(run("canonical --in \"" + path_in("c_in.json") + "\" --out \"" + path_in("c_out.json") + "\"") == 0);
  const auto c = load(path_in("c_out.json"));
  const auto mat = [&](const char* key) {
    ComplexMatrix<2> m;
    for (std::size_t i = 0; i < 4; ++i) m.data[i] = cplx(c[key][i][0].get<double>(), c[key][i][1].get<double>());
    return LocalOperator::unitary(m);
  };
  AcinParams p;
  for (std::size_t i = 0; i < 5; ++i) p.lambda[i] = c["lambda"][i].get<double>();
  p.phi = c["phi"].get<double>();
  const auto moved = apply_local(normalize(psi), mat("u_a"), mat("u_b"), mat("u_c"), false);
  CHECK(max_abs_diff(moved, acin_state(p)) <= 1e-8);
}

TEST_CASE("scan-family: one-parameter sweep", "[cli]") {
  REQUIRE(run("scan-family --family one --grid \"beta=pi/181:pi:181\" --out \"" + path_in("one.csv") + "\"") == 0);
  const auto lines = lines_of(slurp(path_in("one.csv")));
  REQUIRE(lines.size() == 182);
  const auto header = split(lines[0]);
  const auto mr = column(header, "max_residual"), cn = column(header, "C_numeric"), cc = column(header, "C_closed");
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r]);
    REQUIRE(cells.size() == header.size());
    CHECK(std::stod(cells[mr]) <= 1e-9);
    CHECK_THAT(std::stod(cells[cn]), WithinAbs(std::stod(cells[cc]), 1e-10));
  }
}

TEST_CASE("scan-family: three-parameter point and the factor-2 flag", "[cli]") {
  REQUIRE(run("scan-family --family three --grid \"y=1,beta=pi/2,phi=0\" --out \"" + path_in("three.csv") + "\"",
              "three.log") == 0);
  const auto lines = lines_of(slurp(path_in("three.csv")));
  REQUIRE(lines.size() == 2);
  const auto header = split(lines[0]);
  const auto row = split(lines[1]);
  CHECK_THAT(std::stod(row[column(header, "C_numeric")]), WithinAbs(0.26120387496374137, 1e-12));
  CHECK_THAT(std::stod(row[column(header, "C_paper")]), WithinAbs(0.5224077499274827, 1e-12));
  CHECK_THAT(std::stod(row[column(header, "C_paper_over_numeric")]), WithinAbs(2.0, 1e-10));
  CHECK(row[column(header, "factor2_flag")] == "1");
  CHECK(slurp(path_in("three.log")).find("factor 2") != std::string::npos);

  // at beta = pi both expressions vanish, so nothing is flagged
  const auto rows = scan_family(Family::Three, "y=1,beta=pi,phi=0");
  CHECK_FALSE(rows[0].factor2_flag);
}

TEST_CASE("scan-family: error exits", "[cli]") {
  CHECK(run("scan-family --family one --grid \"beta=0.1:pi:0\" --out \"" + path_in("e.csv") + "\"") == 1);
  CHECK(run("scan-family --family one --grid \"beta=0:pi:5\" --out \"" + path_in("e.csv") + "\"") == 1);
  CHECK(run("scan-family --family three --grid \"y=2,beta=1,phi=0\" --out \"" + path_in("e.csv") + "\"") == 1);
  CHECK(run("scan-family --family four --grid \"beta=1\" --out \"" + path_in("e.csv") + "\"") == 1);
}

TEST_CASE("verify: pass, failure path and determinism", "[cli]") {
  VerifyOptions one;
  one.n = 1;
  one.seed = 42;
  const auto r1 = run_verify(one);
  const auto& ids = verify_identities();
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i].gating) CHECK(r1.max_residual[i] <= 1e-9);
  CHECK(r1.passed(1e-8));

  REQUIRE(run("verify --n 200 --seed 42 --slocc-bound 16 --tol 1e-8", "verify.log") == 0);
  const auto log = slurp(path_in("verify.log"));
  for (const auto& id : ids) CHECK(log.find(id.name) != std::string::npos);
  CHECK(run("verify --n 20 --seed 42 --slocc-bound 16 --tol 1e-300") == 2);
  CHECK(run("verify --n 0 --seed 42 --slocc-bound 16 --tol 1e-8") == 1);
  CHECK(run("verify --n 5 --slocc-bound 16 --tol 1e-8") == 1);

  VerifyOptions a;
  a.n = 60;
  a.seed = 9;
  VerifyOptions b = a;
  b.threads = 4;
  CHECK(run_verify(a).max_residual == run_verify(b).max_residual);
  REQUIRE(run("verify --n 30 --seed 5 --tol 1e-8 --threads 1", "v1.log") == 0);
  REQUIRE(run("verify --n 30 --seed 5 --tol 1e-8 --threads 3", "v3.log") == 0);
  CHECK(slurp(path_in("v1.log")) == slurp(path_in("v3.log")));
}
