#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlpf/grid.hpp"

namespace nlpf {

/// Which nodes a field covers.
enum class FieldLayout { Interior, AllNodes };

/// CSV with header "x,value" (1D) or "x,y,value" (2D), one row per node,
/// y outer and x inner. Values use 17 significant digits, so a read of a
/// written file reproduces every double exactly.
void write_field(std::ostream& os, const Grid& grid, std::span<const double> field,
                 FieldLayout layout);
void write_field(const std::string& path, const Grid& grid, std::span<const double> field,
                 FieldLayout layout);

/// Reads a field written by write_field; throws on dimension, size or
/// coordinate mismatch with `grid`.
std::vector<double> read_field(std::istream& is, const Grid& grid, FieldLayout layout);
std::vector<double> read_field(const std::string& path, const Grid& grid, FieldLayout layout);

/// Header-driven read without a grid (for post-processing saved fields).
struct RawField {
  int dim = 1;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> values;
};
RawField read_raw_field(const std::string& path);

/// Reconstructs the (layer-free) grid of a raw interior field.
Grid grid_from_raw(const RawField& raw);

/// Legacy VTK STRUCTURED_POINTS with one SCALARS block per field; fields are
/// in `layout` order and the geometry follows it.
void write_vtk(const std::string& path, const Grid& grid,
               const std::vector<std::pair<std::string, std::vector<double>>>& fields,
               FieldLayout layout);

}  // namespace nlpf
