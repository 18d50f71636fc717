// End-to-end checks of the rgrade binary: documented example invocations,
// byte-identical reruns on a warm cache, and error reporting.

#include <cstdio>
#include <unistd.h>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace {

std::string binary_path() {
  const char* p = std::getenv("RGRADE_BIN");
  REQUIRE_MESSAGE(p != nullptr, "RGRADE_BIN must point at the rgrade binary");
  return p;
}

struct RunResult {
  int status;
  std::string stdout_text;
};

RunResult run(const std::string& args) {
  const std::string out = (std::filesystem::temp_directory_path() /
                           ("rgrade-cli-out-" + std::to_string(::getpid())))
                              .string();
  const std::string cmd = binary_path() + " " + args + " > " + out + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  std::ifstream f(out);
  std::stringstream ss;
  ss << f.rdbuf();
  std::filesystem::remove(out);
  return {WEXITSTATUS(raw), ss.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Field `col` (0-based) of the first data row of a CSV blob.
std::string csv_field(const std::string& csv, std::size_t col) {
  std::stringstream ss(csv);
  std::string line;
  REQUIRE(std::getline(ss, line));  // header
  REQUIRE(std::getline(ss, line));
  std::stringstream row(line);
  std::string tok;
  for (std::size_t i = 0; i <= col; ++i) REQUIRE(std::getline(row, tok, ','));
  return tok;
}

struct TempDir {
  std::filesystem::path dir;
  TempDir() {
    dir = std::filesystem::temp_directory_path() /
          ("rgrade-cli-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  }
  std::string p(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("grade command reproduces the 1D formula") {
  TempDir tmp;
  const RunResult r = run("grade --d 1 --x 3 --L 64 --out " + tmp.p("g"));
  CHECK(r.status == 0);
  CHECK(std::stod(csv_field(r.stdout_text, 3)) == doctest::Approx(12.0).epsilon(1e-6));
  CHECK(std::filesystem::exists(tmp.p("g") + ".csv"));
  CHECK(std::filesystem::exists(tmp.p("g") + ".json"));
}

TEST_CASE("bm command evaluates the closed form") {
  TempDir tmp;
  const RunResult r = run("bm --d 1 --r0 1 --x 3 --out " + tmp.p("b"));
  CHECK(r.status == 0);
  CHECK(std::stod(csv_field(r.stdout_text, 5)) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("disk command solves the R=1 star graph") {
  TempDir tmp;
  const RunResult r = run("disk --R 1 --x0 1,0 --out " + tmp.p("d"));
  CHECK(r.status == 0);
  CHECK(std::stod(csv_field(r.stdout_text, 2)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("reruns with a warm cache are byte-identical") {
  TempDir tmp;
  const std::string args = "kernel --d 2 --L 12 --out " + tmp.p("k");
  CHECK(run(args).status == 0);
  const std::string first_csv = slurp(tmp.p("k") + ".csv");
  CHECK(run(args).status == 0);
  CHECK(slurp(tmp.p("k") + ".csv") == first_csv);

  const std::string gargs = "grade --d 2 --x 2,0 --L 10 --out " + tmp.p("g2");
  CHECK(run(gargs).status == 0);
  const std::string gfirst = slurp(tmp.p("g2") + ".csv");
  CHECK(run(gargs).status == 0);
  CHECK(slurp(tmp.p("g2") + ".csv") == gfirst);
}

TEST_CASE("config file backfills flags; flags win on conflict") {
  TempDir tmp;
  {
    std::ofstream f(tmp.p("cfg.json"));
    f << R"({"d": 1, "x": "3", "L": 64, "out": ")" << tmp.p("cfgout") << R"("})";
  }
  const RunResult r = run("--config " + tmp.p("cfg.json") + " grade");
  CHECK(r.status == 0);
  CHECK(std::stod(csv_field(r.stdout_text, 3)) == doctest::Approx(12.0).epsilon(1e-6));

  const RunResult r2 =
      run("--config " + tmp.p("cfg.json") + " grade --x 1 --out " + tmp.p("o2"));
  CHECK(r2.status == 0);
  CHECK(std::stod(csv_field(r2.stdout_text, 3)) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("invalid input yields machine-readable error JSON and nonzero exit") {
  const RunResult r = run("grade --d 2 --x 0,0");
  CHECK(r.status == 1);
  CHECK(r.stdout_text.find("\"error\"") != std::string::npos);

  const RunResult r2 = run("mc --d 2 --x0 3,0");  // missing required --seed
  CHECK(r2.status != 0);
}

TEST_CASE("mc command is reproducible for a fixed seed") {
  TempDir tmp;
  const std::string args =
      "mc --d 1 --x0 2 --strategy euclidean:2 --replicates 5000 --seed 42 --out " +
      tmp.p("m");
  CHECK(run(args).status == 0);
  const std::string first = slurp(tmp.p("m") + ".csv");
  CHECK(run(args).status == 0);
  CHECK(slurp(tmp.p("m") + ".csv") == first);
  // gamma(2,0) = 6; the threshold rule at rho = 2 is optimal in 1D.
  CHECK(std::stod(csv_field(first, 7)) == doctest::Approx(6.0).epsilon(0.05));
}

TEST_CASE("verify z1-exact suite passes end to end") {
  TempDir tmp;
  const RunResult r = run("verify z1-exact --out " + tmp.p("v"));
  CHECK(r.status == 0);
  CHECK(r.stdout_text.find("[PASS] z1-exact") != std::string::npos);
}
