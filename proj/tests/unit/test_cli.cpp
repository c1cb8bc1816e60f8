#include "cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result
{
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args)
{
  std::ostringstream out, err;
  const int code = covsmooth::cli::run(args, out, err);
  return { code, out.str(), err.str() };
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  return { std::istreambuf_iterator<char>(in), {} };
}

} // namespace

TEST_CASE("command line: simulate then estimate")
{
  const fs::path dir = fs::temp_directory_path() / "covsmooth_cli_test";
  fs::create_directories(dir);
  const auto data = (dir / "d.csv").string();
  const auto surf = (dir / "s.csv").string();
  const auto sd = (dir / "sd.csv").string();
  REQUIRE(run({ "simulate", "--process", "ou", "--theta", "3", "--sigma", "2",
                "--noise-sd", "0.75", "--n", "100", "--p", "40", "--seed", "7",
                "--out", data })
            .code == 0);
  REQUIRE(run({ "estimate", "--input", data, "--order", "1", "--bandwidth", "0.3",
                "--out", surf, "--std-out", sd })
            .code == 0);
  const auto text = slurp(surf);
  CHECK(text.rfind("x,y,value\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 40 * 41 / 2 + 1);
  CHECK(slurp(sd).rfind("x,sd,clamped\n", 0) == 0);

  const auto cv = run({ "cv", "--input", data, "--h-grid", "0.3", "--seed", "1",
                        "--out", (dir / "cv.csv").string() });
  CHECK(cv.code == 0);
  CHECK(cv.out == "0.29999999999999999\n");
  fs::remove_all(dir);
}

TEST_CASE("command line: usage and runtime errors")
{
  CHECK(run({}).code == 2);
  CHECK(run({ "frobnicate" }).code == 2);
  const auto unknown = run({ "simulate", "--out", "x.csv", "--bogus", "1" });
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(run({ "simulate", "--process", "gauss", "--out", "x.csv" }).code == 2);
  CHECK(run({ "estimate", "--input", "/nonexistent.csv", "--out", "y.csv" }).code == 2);
  CHECK(run({ "--help" }).code == 0);

  const fs::path bad = fs::temp_directory_path() / "covsmooth_cli_bad.csv";
  std::ofstream(bad) << "0.9,0.1\n1,2\n3,4\n";
  const auto r = run({ "estimate", "--input", bad.string(), "--out",
                       (fs::temp_directory_path() / "covsmooth_cli_bad_out.csv").string() });
  CHECK(r.code == 1);
  CHECK(r.err.find("row 1, column 2") != std::string::npos);
  fs::remove(bad);
}

TEST_CASE("bandwidth grid syntax")
{
  using covsmooth::cli::parse_h_grid;
  CHECK(parse_h_grid("0.3") == std::vector<double>{ 0.3 });
  CHECK(parse_h_grid("0.1,0.2") == std::vector<double>{ 0.1, 0.2 });
  CHECK(parse_h_grid("0.1:0.3:0.1") == std::vector<double>{ 0.1, 0.2, 0.3 });
  CHECK_THROWS(parse_h_grid("0.1:0.3"));
  CHECK_THROWS(parse_h_grid("0.2,0.1"));
  CHECK_THROWS(parse_h_grid("2"));
}
