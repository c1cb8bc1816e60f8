#include "covsmooth/io.hpp"

#include "covsmooth/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

namespace covsmooth {

namespace {

constexpr std::string_view kNA = "NA";

std::string_view trim(std::string_view s)
{
  const auto blank = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && blank(s.front()))
    s.remove_prefix(1);
  while (!s.empty() && blank(s.back()))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_row(std::string_view line)
{
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

/// Non-empty lines of the stream with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream& in)
{
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1 && line.starts_with("\xEF\xBB\xBF"))
      line.erase(0, 3);
    if (!trim(line).empty())
      lines.emplace_back(row, std::move(line));
  }
  return lines;
}

std::vector<double> parse_numeric_row(std::string_view line,
                                      std::size_t row,
                                      std::size_t expected,
                                      const std::string& name)
{
  const auto cells = split_row(line);
  if (expected > 0 && cells.size() != expected)
    throw ParseError(name + ": expected " + std::to_string(expected) +
                       " columns, found " + std::to_string(cells.size()),
                     row,
                     std::min(cells.size(), expected) + 1);
  std::vector<double> values(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto v = parse_double(cells[c]);
    if (!v || !std::isfinite(*v))
      throw ParseError(name + ": not a finite number: '" +
                         std::string(cells[c]) + "'",
                       row,
                       c + 1);
    values[c] = *v;
  }
  return values;
}

std::ifstream open_in(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for reading");
  return in;
}

template<class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  writer(out);
  out.flush();
  if (!out)
    throw std::runtime_error("write to '" + path.string() + "' failed");
}

} // namespace

GridSource GridSource::parse(std::string_view text)
{
  if (text == "header")
    return { Policy::Header, {} };
  if (text == "equidistant")
    return { Policy::Equidistant, {} };
  if (text.empty())
    throw std::invalid_argument("empty grid policy");
  return { Policy::File, std::filesystem::path(text) };
}

std::string format_double(double value)
{
  if (std::isnan(value))
    return std::string(kNA);
  char buf[40];
  const auto res = std::to_chars(
    buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (res.ec != std::errc())
    throw InternalError("number formatting failed");
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view cell)
{
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+')
    cell.remove_prefix(1);
  if (cell.empty())
    return std::nullopt;
  double value = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    return std::nullopt;
  return value;
}

SampleData read_samples(std::istream& in,
                        const GridSource& source,
                        const std::string& name)
{
  const auto lines = read_lines(in);
  std::size_t first = 0;
  std::optional<DesignGrid> grid;

  if (source.policy == GridSource::Policy::Header) {
    if (lines.empty())
      throw ParseError(name + ": empty file", 1, 0);
    const auto& [row, text] = lines.front();
    const auto header = parse_numeric_row(text, row, 0, name);
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] < 0.0 || header[c] > 1.0)
        throw ParseError(name + ": design point outside [0, 1]", row, c + 1);
      if (c > 0 && !(header[c] > header[c - 1]))
        throw ParseError(name + ": design points must be strictly increasing",
                         row,
                         c + 1);
    }
    if (header.size() < 2)
      throw ParseError(name + ": need at least 2 design points", row, 1);
    grid.emplace(header);
    first = 1;
  }

  const std::size_t n = lines.size() - first;
  if (n < 2)
    throw ParseError(name + ": need at least 2 curves",
                     lines.empty() ? 1 : lines.back().first + 1,
                     0);
  const std::size_t p = grid ? grid->size()
                             : split_row(lines[first].second).size();
  Eigen::MatrixXd values(static_cast<Eigen::Index>(n),
                         static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [row, text] = lines[first + i];
    const auto v = parse_numeric_row(text, row, p, name);
    for (std::size_t j = 0; j < p; ++j)
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
  }

  if (source.policy == GridSource::Policy::Equidistant)
    grid.emplace(make_equidistant_grid(p));
  else if (source.policy == GridSource::Policy::File) {
    grid.emplace(read_grid(source.grid_file));
    if (grid->size() != p)
      throw ParseError(name + ": grid file '" + source.grid_file.string() +
                         "' has " + std::to_string(grid->size()) +
                         " points but the data has " + std::to_string(p) +
                         " columns",
                       0,
                       0);
  }
  return { SampleMatrix(std::move(values)), std::move(*grid) };
}

SampleData read_samples(const std::filesystem::path& path,
                        const GridSource& source)
{
  auto in = open_in(path);
  return read_samples(in, source, path.string());
}

DesignGrid read_grid(const std::filesystem::path& path)
{
  auto in = open_in(path);
  const std::string name = path.string();
  std::vector<double> points;
  for (const auto& [row, text] : read_lines(in)) {
    const double v = parse_numeric_row(text, row, 1, name).front();
    if (v < 0.0 || v > 1.0)
      throw ParseError(name + ": design point outside [0, 1]", row, 1);
    if (!points.empty() && !(v > points.back()))
      throw ParseError(
        name + ": design points must be strictly increasing", row, 1);
    points.push_back(v);
  }
  if (points.size() < 2)
    throw ParseError(name + ": need at least 2 design points", 0, 0);
  return DesignGrid(std::move(points));
}

void write_samples(std::ostream& out,
                   const SampleMatrix& samples,
                   const DesignGrid& grid)
{
  if (samples.points() != grid.size())
    throw std::invalid_argument("samples do not match the design grid");
  for (std::size_t j = 0; j < grid.size(); ++j)
    out << (j ? "," : "") << format_double(grid[j]);
  out << '\n';
  const auto& v = samples.values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j)
      out << (j ? "," : "") << format_double(v(i, j));
    out << '\n';
  }
}

void write_samples(const std::filesystem::path& path,
                   const SampleMatrix& samples,
                   const DesignGrid& grid)
{
  write_file(path, [&](std::ostream& out) { write_samples(out, samples, grid); });
}

void write_surface(std::ostream& out, const CovarianceSurface& surface)
{
  out << "x,y,value\n";
  for (std::size_t i = 0; i < surface.size(); ++i) {
    const auto& e = surface.evals()[i];
    out << format_double(e.x) << ',' << format_double(e.y) << ','
        << (surface.is_hole(i) ? std::string(kNA)
                               : format_double(surface.value(i)))
        << '\n';
  }
}

void write_surface(const std::filesystem::path& path,
                   const CovarianceSurface& surface)
{
  write_file(path, [&](std::ostream& out) { write_surface(out, surface); });
}

CovarianceSurface read_surface(std::istream& in, const std::string& name)
{
  const auto lines = read_lines(in);
  if (lines.empty())
    throw ParseError(name + ": empty file", 1, 0);
  {
    const auto header = split_row(lines.front().second);
    if (header.size() != 3 || header[0] != "x" || header[1] != "y" ||
        header[2] != "value")
      throw ParseError(name + ": expected header 'x,y,value'",
                       lines.front().first,
                       1);
  }
  std::vector<EvalPoint> points;
  std::vector<double> values;
  std::vector<std::size_t> holes;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto& [row, text] = lines[l];
    const auto cells = split_row(text);
    if (cells.size() != 3)
      throw ParseError(name + ": expected 3 columns", row,
                       std::min<std::size_t>(cells.size(), 3) + 1);
    double xy[2];
    for (std::size_t c = 0; c < 2; ++c) {
      const auto v = parse_double(cells[c]);
      if (!v || !std::isfinite(*v))
        throw ParseError(name + ": not a finite number", row, c + 1);
      xy[c] = *v;
    }
    if (!(xy[0] <= xy[1]) || xy[0] < 0.0 || xy[1] > 1.0)
      throw ParseError(name + ": point outside the upper triangle", row, 1);
    points.push_back({ xy[0], xy[1] });
    if (cells[2] == kNA) {
      holes.push_back(values.size());
      values.push_back(std::nan(""));
    } else {
      const auto v = parse_double(cells[2]);
      if (!v || !std::isfinite(*v))
        throw ParseError(name + ": not a finite number", row, 3);
      values.push_back(*v);
    }
  }
  return CovarianceSurface(TriangleGrid(std::move(points)),
                           std::move(values),
                           std::move(holes));
}

CovarianceSurface read_surface(const std::filesystem::path& path)
{
  auto in = open_in(path);
  return read_surface(in, path.string());
}

void write_std_curve(std::ostream& out, const StdCurve& curve)
{
  out << "x,sd,clamped\n";
  for (const auto& pt : curve.points)
    out << format_double(pt.x) << ','
        << (pt.hole ? std::string(kNA) : format_double(pt.sd)) << ','
        << (pt.clamped ? 1 : 0) << '\n';
}

void write_std_curve(const std::filesystem::path& path, const StdCurve& curve)
{
  write_file(path, [&](std::ostream& out) { write_std_curve(out, curve); });
}

void write_report(std::ostream& out, const ExperimentReport& report)
{
  out << "experiment,n,p,h,m,replication,metric,value\n";
  for (const auto& r : report.rows) {
    out << r.experiment << ',' << r.n << ',' << r.p << ','
        << (r.h ? format_double(*r.h) : std::string(kNA)) << ',';
    if (r.m)
      out << *r.m;
    else
      out << kNA;
    out << ',';
    if (r.replication)
      out << *r.replication;
    else
      out << kNA;
    out << ',' << r.metric << ',' << format_double(r.value) << '\n';
  }
}

void write_report(const std::filesystem::path& path,
                  const ExperimentReport& report)
{
  write_file(path, [&](std::ostream& out) { write_report(out, report); });
}

void write_weights(std::ostream& out, const WeightField& field)
{
  out << "x,y,j,k,w\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    const auto& e = field.evals()[i];
    for (const auto& pw : field.at(i).pairs)
      out << format_double(e.x) << ',' << format_double(e.y) << ','
          << pw.j + 1 << ',' << pw.k + 1 << ',' << format_double(pw.w) << '\n';
  }
}

} // namespace covsmooth
