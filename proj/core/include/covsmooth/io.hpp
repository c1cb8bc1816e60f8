#pragma once

#include "covsmooth/design_grid.hpp"
#include "covsmooth/estimator.hpp"
#include "covsmooth/experiments.hpp"
#include "covsmooth/weights.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace covsmooth {

/// Where the design points of a sample file come from.
struct GridSource
{
  enum class Policy
  {
    Header,      ///< first row of the file lists the p design points
    Equidistant, ///< x_j = (j - 0.5) / p
    File         ///< single-column file of p design points
  };

  Policy policy = Policy::Header;
  std::filesystem::path grid_file;

  /// "header", "equidistant", or anything else as a grid file path.
  static GridSource parse(std::string_view text);
};

struct SampleData
{
  SampleMatrix samples;
  DesignGrid grid;
};

/// Shortest-safe decimal form: 17 significant digits, round-trips exactly.
std::string format_double(double value);

/// Parses a full cell as a finite or infinite double; std::nullopt when the
/// cell is not a number.
std::optional<double> parse_double(std::string_view cell);

/// Reads an n x p curve file. Ragged rows, non-numeric cells and a header
/// that is not strictly increasing in [0, 1] raise ParseError with the
/// 1-based row / column of the offending cell.
SampleData read_samples(std::istream& in,
                        const GridSource& source,
                        const std::string& name = "<stream>");
SampleData read_samples(const std::filesystem::path& path,
                        const GridSource& source);

/// Single column of design points.
DesignGrid read_grid(const std::filesystem::path& path);

/// Writes the design points as a header row followed by the curves.
void write_samples(std::ostream& out,
                   const SampleMatrix& samples,
                   const DesignGrid& grid);
void write_samples(const std::filesystem::path& path,
                   const SampleMatrix& samples,
                   const DesignGrid& grid);

/// Long format "x,y,value", one row per evaluation point; holes are "NA".
void write_surface(std::ostream& out, const CovarianceSurface& surface);
void write_surface(const std::filesystem::path& path,
                   const CovarianceSurface& surface);
CovarianceSurface read_surface(std::istream& in,
                               const std::string& name = "<stream>");
CovarianceSurface read_surface(const std::filesystem::path& path);

/// "x,sd,clamped"; holes are "NA".
void write_std_curve(std::ostream& out, const StdCurve& curve);
void write_std_curve(const std::filesystem::path& path, const StdCurve& curve);

/// "experiment,n,p,h,m,replication,metric,value"; missing fields are "NA".
void write_report(std::ostream& out, const ExperimentReport& report);
void write_report(const std::filesystem::path& path,
                  const ExperimentReport& report);

/// Debug dump "x,y,j,k,w" of every nonzero weight (j, k are 1-based).
void write_weights(std::ostream& out, const WeightField& field);

} // namespace covsmooth
