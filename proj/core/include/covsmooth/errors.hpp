#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace covsmooth {

// Invalid arguments are reported with std::invalid_argument. The types below
// cover the remaining failure kinds.

/// A requested evaluation point is not stored in a surface.
class NotFoundError : public std::out_of_range
{
public:
  using std::out_of_range::out_of_range;
};

/// An operation was applied to an object in a state it cannot handle
/// (for example a surface that still contains holes).
class InvalidStateError : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

/// An internal consistency check failed.
class InternalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Row and column are 1-based; 0 means "not applicable".
class ParseError : public std::runtime_error
{
public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
    : std::runtime_error(format(what, row, column))
    , row_(row)
    , column_(column)
  {
  }

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

private:
  static std::string format(const std::string& what,
                            std::size_t row,
                            std::size_t column)
  {
    std::string out = what;
    if (row > 0) {
      out += " (row " + std::to_string(row);
      if (column > 0)
        out += ", column " + std::to_string(column);
      out += ")";
    }
    return out;
  }

  std::size_t row_;
  std::size_t column_;
};

} // namespace covsmooth
