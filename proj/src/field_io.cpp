#include "nlpf/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "nlpf/error.hpp"

namespace nlpf {

namespace {

std::vector<int> layout_ids(const Grid& grid, FieldLayout layout) {
  if (layout == FieldLayout::Interior) return grid.interior_ids;
  std::vector<int> ids(grid.num_nodes());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  return ids;
}

void put(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

std::vector<double> split_numbers(const std::string& line, std::size_t line_no) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str()) {
      throw Error("field line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
    }
    out.push_back(v);
  }
  return out;
}

int header_dim(const std::string& header) {
  std::string h = header;
  if (!h.empty() && h.back() == '\r') h.pop_back();
  if (h == "x,value") return 1;
  if (h == "x,y,value") return 2;
  throw Error("field header must be 'x,value' or 'x,y,value', got '" + h + "'");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  return os;
}

}  // namespace

void write_field(std::ostream& os, const Grid& grid, std::span<const double> field,
                 FieldLayout layout) {
  const auto ids = layout_ids(grid, layout);
  if (field.size() != ids.size()) throw Error("write_field: field size does not match grid");
  os << (grid.dim == 1 ? "x,value\n" : "x,y,value\n");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    put(os, grid.coord(ids[i], 0));
    os << ',';
    if (grid.dim == 2) {
      put(os, grid.coord(ids[i], 1));
      os << ',';
    }
    put(os, field[i]);
    os << '\n';
  }
}

void write_field(const std::string& path, const Grid& grid, std::span<const double> field,
                 FieldLayout layout) {
  auto os = open_out(path);
  write_field(os, grid, field, layout);
  if (!os) throw Error("write failed for '" + path + "'");
}

std::vector<double> read_field(std::istream& is, const Grid& grid, FieldLayout layout) {
  const auto ids = layout_ids(grid, layout);
  std::string line;
  if (!std::getline(is, line)) throw Error("read_field: empty input");
  const int dim = header_dim(line);
  if (dim != grid.dim) {
    throw Error("read_field: file is " + std::to_string(dim) + "D, grid is " +
                std::to_string(grid.dim) + "D");
  }
  std::vector<double> out;
  out.reserve(ids.size());
  std::size_t line_no = 1;
  const double tol = 1e-9 * grid.h;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto nums = split_numbers(line, line_no);
    if (nums.size() != static_cast<std::size_t>(dim + 1)) {
      throw Error("field line " + std::to_string(line_no) + ": expected " +
                  std::to_string(dim + 1) + " columns");
    }
    if (out.size() >= ids.size()) throw Error("read_field: more rows than grid nodes");
    const int id = ids[out.size()];
    for (int a = 0; a < dim; ++a) {
      if (std::abs(nums[a] - grid.coord(id, a)) > tol) {
        throw Error("field line " + std::to_string(line_no) + ": coordinate does not match grid");
      }
    }
    out.push_back(nums[dim]);
  }
  if (out.size() != ids.size()) {
    throw Error("read_field: got " + std::to_string(out.size()) + " rows, grid has " +
                std::to_string(ids.size()) + " nodes");
  }
  return out;
}

std::vector<double> read_field(const std::string& path, const Grid& grid, FieldLayout layout) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open field file '" + path + "'");
  return read_field(is, grid, layout);
}

RawField read_raw_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open field file '" + path + "'");
  std::string line;
  if (!std::getline(is, line)) throw Error("'" + path + "' is empty");
  RawField raw;
  raw.dim = header_dim(line);
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto nums = split_numbers(line, line_no);
    if (nums.size() != static_cast<std::size_t>(raw.dim + 1)) {
      throw Error("field line " + std::to_string(line_no) + ": wrong column count");
    }
    raw.x.push_back(nums[0]);
    if (raw.dim == 2) raw.y.push_back(nums[1]);
    raw.values.push_back(nums[raw.dim]);
  }
  return raw;
}

Grid grid_from_raw(const RawField& raw) {
  const std::size_t n = raw.values.size();
  std::size_t per_axis = n;
  if (raw.dim == 2) {
    per_axis = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (per_axis * per_axis != n) throw Error("2D field is not square");
  }
  if (per_axis < 2) throw Error("field has fewer than two nodes per axis");
  const double span = raw.x[per_axis - 1] - raw.x[0];
  if (std::abs(raw.x[0]) > 1e-9 || std::abs(span - 1.0) > 1e-9) {
    throw Error("field does not cover the unit domain (interior layout expected)");
  }
  Grid g = build_grid(raw.dim, 1.0 / static_cast<double>(per_axis - 1), 0.0);
  if (g.num_interior() != n) throw Error("field size does not match a uniform grid");
  return g;
}

void write_vtk(const std::string& path, const Grid& grid,
               const std::vector<std::pair<std::string, std::vector<double>>>& fields,
               FieldLayout layout) {
  const auto ids = layout_ids(grid, layout);
  const bool interior = layout == FieldLayout::Interior;
  const int nx = interior ? grid.n_per_axis() : grid.nx;
  const int ny = grid.dim == 2 ? nx : 1;
  const double origin = interior ? 0.0 : -grid.layer * grid.h;
  auto os = open_out(path);
  os << "# vtk DataFile Version 3.0\nnlpf fields\nASCII\nDATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << nx << ' ' << ny << " 1\n";
  os << "ORIGIN ";
  put(os, origin);
  os << ' ';
  put(os, grid.dim == 2 ? origin : 0.0);
  os << " 0\nSPACING ";
  put(os, grid.h);
  os << ' ';
  put(os, grid.h);
  os << ' ';
  put(os, grid.h);
  os << "\nPOINT_DATA " << ids.size() << '\n';
  for (const auto& [name, values] : fields) {
    if (values.size() != ids.size()) throw Error("write_vtk: field '" + name + "' has wrong size");
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) {
      put(os, v);
      os << '\n';
    }
  }
  if (!os) throw Error("write failed for '" + path + "'");
}

}  // namespace nlpf
