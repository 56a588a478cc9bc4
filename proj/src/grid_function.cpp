#include "morreylab/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "morreylab/errors.hpp"

namespace morreylab {

GridFunction::GridFunction(GridLayout layout, std::vector<double> values, bool nonneg)
    : layout_(layout), values_(std::move(values)), nonneg_(nonneg) {
  if (layout_.dim < 1 || layout_.depth < 0) throw std::invalid_argument("bad grid layout");
  if (static_cast<std::int64_t>(values_.size()) != layout_.cells())
    throw std::invalid_argument("cell count does not match layout");
  if (nonneg_)
    for (double v : values_)
      if (!(v >= 0.0)) throw std::invalid_argument("nonneg grid function has a negative cell");
}

GridFunction GridFunction::constant(const GridLayout& layout, double c) {
  return GridFunction(layout, std::vector<double>(static_cast<std::size_t>(layout.cells()), c),
                      c >= 0.0);
}

GridFunction GridFunction::weight(GridLayout layout, std::vector<double> values) {
  GridFunction w(layout, std::move(values), true);
  if (!(w.max_value() > 0.0)) throw std::invalid_argument("weight must be positive somewhere");
  return w;
}

GridFunction GridFunction::of(const GridLayout& layout,
                              const std::function<double(std::int64_t)>& fn, bool nonneg) {
  std::vector<double> v(static_cast<std::size_t>(layout.cells()));
  for (std::int64_t i = 0; i < layout.cells(); ++i) v[static_cast<std::size_t>(i)] = fn(i);
  return GridFunction(layout, std::move(v), nonneg);
}

double GridFunction::integral() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * layout_.cell_volume();
}

double GridFunction::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double GridFunction::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

GridFunction GridFunction::cellwise(const std::function<double(double)>& fn, bool nonneg) const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) v[i] = fn(values_[i]);
  return GridFunction(layout_, std::move(v), nonneg);
}

GridFunction GridFunction::power_capped(double e, double cap) const {
  return cellwise(
      [e, cap](double v) {
        if (v == 0.0) return e < 0.0 ? cap : (e == 0.0 ? 1.0 : 0.0);
        const double r = std::pow(v, e);
        return std::isfinite(r) ? r : cap;
      },
      true);
}

GridFunction combine(const GridFunction& a, const GridFunction& b,
                     const std::function<double(double, double)>& fn, bool nonneg) {
  if (!a.layout_.compatible(b.layout_)) throw std::invalid_argument("incompatible grid layouts");
  std::vector<double> v(a.values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(a.values_[i], b.values_[i]);
  return GridFunction(a.layout_, std::move(v), nonneg);
}

GridFunction indicator(const GridLayout& layout, const DyadicCube& q) {
  std::vector<double> v(static_cast<std::size_t>(layout.cells()), 0.0);
  for_each_cell(layout, q, [&](std::int64_t i) { v[static_cast<std::size_t>(i)] = 1.0; });
  return GridFunction(layout, std::move(v), true);
}

GridFunction masked(const GridFunction& f, const DyadicCube& q) {
  std::vector<double> v(static_cast<std::size_t>(f.size()), 0.0);
  for_each_cell(f.layout(), q, [&](std::int64_t i) { v[static_cast<std::size_t>(i)] = f[i]; });
  return GridFunction(f.layout(), std::move(v), f.nonneg());
}

double cube_average(const GridFunction& f, const DyadicCube& q, const GridFunction* mu) {
  const auto& g = f.layout();
  if (q.level() > g.depth) throw std::invalid_argument("cube finer than the grid");
  if (mu == nullptr) {
    double s = 0.0;
    for_each_cell(g, q, [&](std::int64_t i) { s += f[i]; });
    return std::ldexp(s, -g.dim * (g.depth - q.level()));
  }
  if (!mu->layout().compatible(g)) throw std::invalid_argument("incompatible weight layout");
  double num = 0.0, den = 0.0;
  for_each_cell(g, q, [&](std::int64_t i) {
    num += f[i] * (*mu)[i];
    den += (*mu)[i];
  });
  if (den <= 0.0) fail(Errc::ZeroMeasure, "weighted average over a cube of measure zero");
  return num / den;
}

void write_grid(std::ostream& os, const GridFunction& f) {
  os << f.dim() << " " << f.depth() << "\n";
  char buf[40];
  const std::int64_t per_line = 8;
  for (std::int64_t i = 0; i < f.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", f[i]);
    os << buf << (((i + 1) % per_line == 0 || i + 1 == f.size()) ? "\n" : " ");
  }
}

void write_grid_file(const std::string& path, const GridFunction& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_grid(os, f);
}

GridFunction read_grid(std::istream& is, const RootBox& box) {
  int dim = 0, depth = -1;
  if (!(is >> dim >> depth)) throw std::runtime_error("bad grid header (expected: dim L)");
  if (dim < 1 || dim > 8 || depth < 0 || depth > 62 / dim)
    throw std::runtime_error("grid header out of range");
  GridLayout layout{dim, depth, box};
  std::vector<double> v(static_cast<std::size_t>(layout.cells()));
  for (auto& x : v)
    if (!(is >> x)) throw std::runtime_error("grid file ended before all cells were read");
  return GridFunction(layout, std::move(v));
}

GridFunction read_grid_file(const std::string& path, const RootBox& box) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_grid(is, box);
}

}  // namespace morreylab
