#include <doctest.h>

#include <charconv>
#include <cstring>
#include <chrono>
#include <filesystem>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "io.hpp"
#include "projsum/geometry.hpp"
#include "projsum/parallel.hpp"

using namespace projsum;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name) {
  const fs::path dir = fs::path("cli_test_out");
  fs::create_directories(dir);
  return (dir / name).string();
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string f;
    while (std::getline(fields, f, ',')) row.push_back(std::stod(f));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("float formatting round-trips") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(-0.0) == "0");
  CHECK(io::format_double(1e-300) == "1e-300");
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 10000; ++i) {
    double x;
    const std::uint64_t b = bits(rng);
    std::memcpy(&x, &b, sizeof x);
    if (!std::isfinite(x)) continue;
    const std::string s = io::format_double(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == x);
  }
}

TEST_CASE("sample writes the spectrum") {
  const std::string p = scratch("one");
  REQUIRE(invoke({"sample", "--n", "1", "--a", "1", "--alpha", "0", "--b", "1", "--beta", "0",
                  "--out-prefix", p}).code == 0);
  CHECK(io::read_file(p + ".esd.csv") == "re,im\r\n0,0\r\n");
  CHECK(fs::exists(p + ".manifest.json"));

  const std::string f = scratch("fig");
  REQUIRE(invoke({"sample", "--n", "200", "--seed", "5", "--out-prefix", f}).code == 0);
  const auto rows = parse_csv(io::read_file(f + ".esd.csv"));
  REQUIRE(rows.size() == 200);
  const HyperbolaRectangle g = make_geometry({0.625, 0, 1}, {0.875, 0, 0.8});
  for (const auto& r : rows) CHECK(dist_to_hr(g, {r[0], r[1]}) <= 1e-8 * g.scale());

  const std::string f2 = scratch("fig2");
  REQUIRE(invoke({"sample", "--n", "200", "--seed", "5", "--out-prefix", f2}).code == 0);
  CHECK(io::read_file(f + ".esd.csv") == io::read_file(f2 + ".esd.csv"));

  const auto m = cli::Json::parse(io::read_file(f + ".manifest.json"));
  CHECK(m["command"] == "sample");
  CHECK(m["params"]["n"] == 200);
  CHECK(m["params"]["seed"] == 5);
  CHECK(m["realized_laws"]["p"]["weight"] == 0.625);
  CHECK(m.contains("tool_version"));
  CHECK(m["timings"].contains("eigenvalues"));
}

TEST_CASE("check reports and exit codes") {
  for (const char* seed : {"1", "2", "3"}) {
    const Outcome o = invoke({"check", "--seed", seed, "--out-prefix", scratch("chk")});
    CHECK(o.code == 0);
  }
  const auto rep = cli::Json::parse(io::read_file(scratch("chk") + ".check.json"));
  CHECK(rep["passed"] == true);
  CHECK(rep["bound"].size() == 100);
  CHECK(rep["corners"][0]["esd_mass"] == doctest::Approx(0.5));
  CHECK(rep["structure"].contains("normality_residual"));

  const Outcome bad = invoke({"check", "--perturb", "1e-3", "--out-prefix", scratch("bad")});
  CHECK(bad.code == 3);
  CHECK(bad.err.find("support") != std::string::npos);
  const auto bad_rep = cli::Json::parse(io::read_file(scratch("bad") + ".check.json"));
  CHECK(bad_rep["first_failure"] == "support");

  const Outcome empty = invoke({"check", "--z-grid", "0", "--out-prefix", scratch("nz")});
  CHECK(empty.code == 0);
  CHECK(cli::Json::parse(io::read_file(scratch("nz") + ".check.json"))["bound"].empty());

  const Outcome fussy = invoke({"check", "--tol-normality", "0", "--z-grid", "0", "--out-prefix", scratch("t0")});
  CHECK(fussy.code == 3);
  CHECK(fussy.err.find("normality") != std::string::npos);

  CHECK(invoke({"check", "--commuting", "--n", "16", "--out-prefix", scratch("cm")}).code == 0);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"sample", "--n", "0"}).code == 2);
  CHECK(invoke({"sample", "--n", "abc"}).code == 2);
  CHECK(invoke({"sample", "--a", "1.5"}).code == 2);
  CHECK(invoke({"check", "--a", "1", "--out-prefix", scratch("deg")}).code == 2);
  CHECK(invoke({"recover", "--nx", "40", "--ny", "30", "--out-prefix", scratch("ns")}).code == 2);
  CHECK(invoke({"potential", "--xmax", "2.1", "--nx", "40", "--ny", "40", "--out-prefix", scratch("ns")}).code == 2);
  CHECK(invoke({"converge", "--schedule", "50,x", "--out-prefix", scratch("ns")}).code == 2);
  CHECK(invoke({"converge", "--schedule", "100,50", "--out-prefix", scratch("ns")}).code == 2);
  CHECK(invoke({"replay", "--manifest", scratch("missing.json")}).code != 0);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("potential and recover artifacts") {
  const std::string p = scratch("tiny");
  const auto start = std::chrono::steady_clock::now();
  REQUIRE(invoke({"potential", "--n", "50", "--nx", "40", "--ny", "40", "--out-prefix", p}).code == 0);
  REQUIRE(invoke({"recover", "--n", "50", "--nx", "40", "--ny", "40", "--out-prefix", p}).code == 0);
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 10.0);
  CHECK(parse_csv(io::read_file(p + ".potential.csv")).size() == 1600);
  CHECK(parse_csv(io::read_file(p + ".measure.csv")).size() == 38 * 38);

  const std::string r = scratch("cover");
  REQUIRE(invoke({"recover", "--n", "100", "--nx", "161", "--ny", "161", "--samples", "2",
                  "--out-prefix", r}).code == 0);
  const std::string text = io::read_file(r + ".measure.csv");
  const auto pos = text.find("# total_mass=");
  REQUIRE(pos != std::string::npos);
  const double total = std::stod(text.substr(pos + 13));
  CHECK(std::abs(total - 1.0) <= 0.02);
}

TEST_CASE("converge report") {
  const std::string p = scratch("conv");
  REQUIRE(invoke({"converge", "--schedule", "20,40,60", "--reference-n", "80", "--samples", "2",
                  "--out-prefix", p}).code == 0);
  const auto j = cli::Json::parse(io::read_file(p + ".converge.json"));
  CHECK(j["distances"].size() == 3);
  CHECK(j["reference_n"] == 80);
  const auto m = cli::Json::parse(io::read_file(p + ".manifest.json"));
  CHECK(m["params"]["converge"]["schedule"].size() == 3);
}

TEST_CASE("replay reproduces every artifact independent of thread count") {
  struct Case {
    std::vector<std::string> args;
    const char* artifact;
  };
  const std::vector<Case> cases{
      {{"sample", "--n", "60", "--seed", "11"}, ".esd.csv"},
      {{"check", "--n", "40", "--seed", "11", "--z-grid", "4"}, ".check.json"},
      {{"potential", "--n", "30", "--nx", "41", "--ny", "41", "--samples", "3"}, ".potential.csv"},
      {{"recover", "--n", "30", "--nx", "41", "--ny", "41", "--samples", "3"}, ".measure.csv"},
      {{"converge", "--schedule", "10,20", "--reference-n", "30", "--samples", "3"}, ".converge.json"},
  };
  int k = 0;
  for (const Case& c : cases) {
    const std::string first = scratch("rp" + std::to_string(k));
    const std::string second = scratch("rp" + std::to_string(k) + "_again");
    auto args = c.args;
    args.insert(args.end(), {"--out-prefix", first});
    set_thread_limit(1);
    REQUIRE(invoke(args).code == 0);
    set_thread_limit(4);
    REQUIRE(invoke({"replay", "--manifest", first + ".manifest.json", "--out-prefix", second}).code == 0);
    set_thread_limit(0);
    CHECK_MESSAGE(io::read_file(first + c.artifact) == io::read_file(second + c.artifact), c.args[0]);
    ++k;
  }
}
