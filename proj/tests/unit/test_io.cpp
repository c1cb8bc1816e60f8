#include "covsmooth/errors.hpp"
#include "covsmooth/io.hpp"
#include "covsmooth/processes.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace covsmooth;

namespace {

std::filesystem::path temp_file(const std::string& name)
{
  return std::filesystem::temp_directory_path() / ("covsmooth_io_" + name);
}

void expect_parse_error(const std::string& text,
                        GridSource source,
                        std::size_t row,
                        std::size_t column)
{
  std::istringstream in(text);
  try {
    read_samples(in, source);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == row);
    CHECK(e.column() == column);
  }
}

} // namespace

TEST_CASE("number formatting round-trips exactly")
{
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(gen) * std::pow(10.0, i % 40 - 20);
    CHECK(*parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(NAN) == "NA");
  CHECK_FALSE(parse_double("abc").has_value());
  CHECK_FALSE(parse_double("1.5x").has_value());
  CHECK_FALSE(parse_double("").has_value());
  CHECK(*parse_double(" +2.5 ") == 2.5);
}

TEST_CASE("reading samples under each grid policy")
{
  SUBCASE("no header, equidistant")
  {
    std::istringstream in("1,2\n3,4\n5,6\n");
    const auto d = read_samples(in, GridSource::parse("equidistant"));
    CHECK(d.samples.curves() == 3);
    CHECK(d.grid[0] == 0.25);
    CHECK(d.grid[1] == 0.75);
  }
  SUBCASE("header row")
  {
    std::istringstream in("0.1,0.9\r\n1,2\r\n3,5\r\n\r\n");
    const auto d = read_samples(in, GridSource::parse("header"));
    CHECK(d.samples.curves() == 2);
    CHECK(d.grid[0] == 0.1);
    CHECK(d.grid[1] == 0.9);
    CHECK(d.samples.values()(1, 1) == 5.0);
  }
  SUBCASE("grid file")
  {
    const auto path = temp_file("grid.csv");
    std::ofstream(path) << "0.2\n0.5\n0.7\n";
    std::istringstream in("1,2,3\n4,5,6\n");
    const auto d = read_samples(in, GridSource::parse(path.string()));
    CHECK(d.grid.size() == 3);
    CHECK(d.grid[1] == 0.5);
    std::istringstream bad("1,2\n4,5\n");
    CHECK_THROWS_AS(read_samples(bad, GridSource::parse(path.string())), ParseError);
    std::filesystem::remove(path);
  }
}

TEST_CASE("parse errors carry their location")
{
  expect_parse_error("0.9,0.1\n1,2\n3,4\n", GridSource::parse("header"), 1, 2);
  expect_parse_error("0.1,1.5\n1,2\n3,4\n", GridSource::parse("header"), 1, 2);
  expect_parse_error("0.1,0.5\n1,2\n3,4,5\n", GridSource::parse("header"), 3, 3);
  expect_parse_error("0.1,0.5\n1,2\n3\n", GridSource::parse("header"), 3, 2);
  expect_parse_error("1,2\n3,x\n", GridSource::parse("equidistant"), 2, 2);
  expect_parse_error("1,2\n3,inf\n", GridSource::parse("equidistant"), 2, 2);
  expect_parse_error("1,2\n", GridSource::parse("equidistant"), 2, 0);
}

TEST_CASE("samples round-trip through a file")
{
  const auto grid = make_equidistant_grid(7);
  const auto y = add_noise(simulate_ou(5, grid, 3, 2, RngSpec(1)), 0.75, RngSpec(2));
  const auto path = temp_file("samples.csv");
  write_samples(path, y, grid);
  const auto back = read_samples(path, GridSource::parse("header"));
  CHECK(back.grid == grid);
  CHECK(back.samples.values() == y.values());
  std::filesystem::remove(path);
}

TEST_CASE("surfaces round-trip byte for byte")
{
  const auto grid = make_equidistant_grid(50);
  const auto evals = triangle_eval_grid(grid);
  const auto surface = CovarianceSurface::from_kernel(
    evals, [](double s, double t) { return ou_kernel(s, t, 3, 2); });
  std::ostringstream first;
  write_surface(first, surface);
  std::istringstream in(first.str());
  const auto back = read_surface(in);
  std::ostringstream second;
  write_surface(second, back);
  CHECK(first.str() == second.str());
  const auto text = first.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1276);
}

TEST_CASE("holes are written as NA")
{
  const CovarianceSurface s(TriangleGrid({ { 0.1, 0.2 }, { 0.3, 0.4 } }), { 1.0, 0.0 }, { 1 });
  std::ostringstream out;
  write_surface(out, s);
  const auto text = out.str();
  std::size_t count = 0;
  for (std::size_t pos = text.find("NA"); pos != std::string::npos;
       pos = text.find("NA", pos + 1))
    ++count;
  CHECK(count == 1);
  std::istringstream in(text);
  const auto back = read_surface(in);
  CHECK(back.holes() == std::vector<std::size_t>{ 1 });
}

TEST_CASE("reports and standard deviation curves")
{
  ExperimentReport r;
  r.add({ "sweep", 10, 5, 0.3, 1u, 2u, "sup_error", 0.125 });
  r.add({ "sweep", 10, 5, std::nullopt, std::nullopt, std::nullopt, "best_h", 0.3 });
  std::ostringstream out;
  write_report(out, r);
  CHECK(out.str() ==
        "experiment,n,p,h,m,replication,metric,value\n"
        "sweep,10,5,0.29999999999999999,1,2,sup_error,0.125\n"
        "sweep,10,5,NA,NA,NA,best_h,0.29999999999999999\n");

  StdCurve c;
  c.points = { { 0.25, 0.5, false, false }, { 0.75, 0.0, false, true } };
  std::ostringstream sd;
  write_std_curve(sd, c);
  CHECK(sd.str() == "x,sd,clamped\n0.25,0.5,0\n0.75,NA,0\n");
}

TEST_CASE("missing files are reported with their path")
{
  try {
    read_samples(std::filesystem::path("/nonexistent/data.csv"), GridSource{});
    FAIL("expected failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent/data.csv") != std::string::npos);
  }
}
