#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "morreylab/geometry.hpp"

namespace morreylab {

/// Piecewise-constant function on the finest dyadic cells, values in
/// lexicographic index order. Immutable after construction.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(GridLayout layout, std::vector<double> values, bool nonneg = false);

  static GridFunction constant(const GridLayout& layout, double c);
  static GridFunction zeros(const GridLayout& layout) { return constant(layout, 0.0); }
  /// Nonnegative, positive on at least one cell (throws otherwise).
  static GridFunction weight(GridLayout layout, std::vector<double> values);
  static GridFunction of(const GridLayout& layout, const std::function<double(std::int64_t)>& fn,
                         bool nonneg = false);

  const GridLayout& layout() const { return layout_; }
  int dim() const { return layout_.dim; }
  int depth() const { return layout_.depth; }
  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }
  bool nonneg() const { return nonneg_; }

  double operator[](std::int64_t i) const { return values_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return values_; }

  /// Exact integral over the root box: cell volume times the value sum.
  double integral() const;
  double min_value() const;
  double max_value() const;

  GridFunction cellwise(const std::function<double(double)>& fn, bool nonneg = false) const;
  /// Cellwise power; 0^e for negative e maps to `cap` so downstream scans can
  /// treat near-degenerate weights without NaN arithmetic.
  GridFunction power_capped(double e, double cap = 1e300) const;

  friend GridFunction combine(const GridFunction& a, const GridFunction& b,
                              const std::function<double(double, double)>& fn, bool nonneg);

 private:
  GridLayout layout_{};
  std::vector<double> values_;
  bool nonneg_ = false;
};

GridFunction combine(const GridFunction& a, const GridFunction& b,
                     const std::function<double(double, double)>& fn, bool nonneg = false);

/// 1_Q as a grid function.
GridFunction indicator(const GridLayout& layout, const DyadicCube& q);
/// f * 1_Q.
GridFunction masked(const GridFunction& f, const DyadicCube& q);

/// (1/|Q|) \int_Q f dx exactly, or the mu-average when a weight is given.
double cube_average(const GridFunction& f, const DyadicCube& q, const GridFunction* mu = nullptr);

// Text format: header "dim L" then 2^{nL} whitespace-separated cell values.
void write_grid(std::ostream& os, const GridFunction& f);
void write_grid_file(const std::string& path, const GridFunction& f);
GridFunction read_grid(std::istream& is, const RootBox& box = {});
GridFunction read_grid_file(const std::string& path, const RootBox& box = {});

}  // namespace morreylab
