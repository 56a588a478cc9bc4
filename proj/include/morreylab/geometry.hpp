#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace morreylab {

/// Affine placement of the computational box: offset + scale * [0,1)^n.
/// Averages and tree structure are placement-independent; coordinates matter
/// for power weights and for the ball cutoff of singular basis elements.
struct RootBox {
  std::vector<double> offset;  // size dim, or empty meaning all zeros
  double scale = 1.0;

  double offset_at(int axis) const {
    return offset.empty() ? 0.0 : offset[static_cast<std::size_t>(axis)];
  }
  bool same_as(const RootBox& o, int dim) const {
    if (scale != o.scale) return false;
    for (int a = 0; a < dim; ++a)
      if (offset_at(a) != o.offset_at(a)) return false;
    return true;
  }
};

// Flat index <-> per-axis coordinates at a given tree level. Flat order is
// lexicographic in the coordinate tuple (last axis fastest).
std::int64_t encode_coords(int dim, int level, const std::vector<std::int64_t>& m);
std::vector<std::int64_t> decode_coords(int dim, int level, std::int64_t flat);
std::int64_t parent_flat(int dim, int level, std::int64_t flat);
std::int64_t child_flat(int dim, int level, std::int64_t flat, int corner);

/// A cube 2^{-k}(m + [0,1)^n) of the dyadic tree rooted at the box.
/// Two dyadic cubes are disjoint or nested; a cube has exactly 2^n children.
class DyadicCube {
 public:
  DyadicCube() : dim_(1), level_(0), index_(1, 0) {}
  DyadicCube(int dim, int level, std::vector<std::int64_t> index);
  static DyadicCube root(int dim);
  static DyadicCube from_flat(int dim, int level, std::int64_t flat);

  int dim() const { return dim_; }
  int level() const { return level_; }
  const std::vector<std::int64_t>& index() const { return index_; }
  std::int64_t flat() const { return encode_coords(dim_, level_, index_); }

  DyadicCube parent() const;
  DyadicCube ancestor(int level) const;  // level <= level()
  std::vector<DyadicCube> children() const;
  DyadicCube child(int corner) const;

  bool contains(const DyadicCube& q) const;  // q subset of *this
  bool disjoint_from(const DyadicCube& q) const { return !contains(q) && !q.contains(*this); }

  double side(const RootBox& box) const { return std::ldexp(box.scale, -level_); }
  double volume(const RootBox& box) const { return std::pow(side(box), dim_); }
  double lower_coord(const RootBox& box, int axis) const {
    return box.offset_at(axis) + std::ldexp(box.scale, -level_) * static_cast<double>(index_[static_cast<std::size_t>(axis)]);
  }

  std::string str() const;  // "k:(i,j)"
  bool operator==(const DyadicCube& o) const {
    return dim_ == o.dim_ && level_ == o.level_ && index_ == o.index_;
  }

 private:
  int dim_;
  int level_;
  std::vector<std::int64_t> index_;
};

/// Returns the 2^n children of Q; their boxes partition Q.
std::vector<DyadicCube> dyadic_children(const DyadicCube& q);

/// Dimensions of a fully refined grid: cells are the level-`depth` cubes.
struct GridLayout {
  int dim = 1;
  int depth = 0;
  RootBox box{};

  std::int64_t cells() const { return std::int64_t{1} << (dim * depth); }
  std::int64_t cells_per_axis() const { return std::int64_t{1} << depth; }
  std::int64_t cubes_at(int level) const { return std::int64_t{1} << (dim * level); }
  double side_at(int level) const { return std::ldexp(box.scale, -level); }
  double cell_volume() const { return std::pow(side_at(depth), dim); }
  double cell_center(std::int64_t flat, int axis) const;

  bool compatible(const GridLayout& o) const {
    return dim == o.dim && depth == o.depth && box.same_as(o.box, dim);
  }
};

std::int64_t cube_cell_count(const GridLayout& g, const DyadicCube& q);

/// Calls fn(flat_cell_index) for every finest-level cell inside q, ascending.
template <class Fn>
void for_each_cell(const GridLayout& g, const DyadicCube& q, Fn&& fn) {
  const int shift = g.depth - q.level();
  const std::int64_t per_axis = std::int64_t{1} << shift;
  std::vector<std::int64_t> lo(static_cast<std::size_t>(g.dim));
  for (int a = 0; a < g.dim; ++a) lo[static_cast<std::size_t>(a)] = q.index()[static_cast<std::size_t>(a)] << shift;
  std::vector<std::int64_t> c(lo);
  while (true) {
    fn(encode_coords(g.dim, g.depth, c));
    int a = g.dim - 1;
    while (a >= 0) {
      if (++c[static_cast<std::size_t>(a)] < lo[static_cast<std::size_t>(a)] + per_axis) break;
      c[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)];
      --a;
    }
    if (a < 0) break;
  }
}

}  // namespace morreylab
