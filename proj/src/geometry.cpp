#include "morreylab/geometry.hpp"

#include <sstream>
#include <stdexcept>

namespace morreylab {

std::int64_t encode_coords(int dim, int level, const std::vector<std::int64_t>& m) {
  std::int64_t flat = 0;
  for (int a = 0; a < dim; ++a) flat = (flat << level) | m[static_cast<std::size_t>(a)];
  return flat;
}

std::vector<std::int64_t> decode_coords(int dim, int level, std::int64_t flat) {
  std::vector<std::int64_t> m(static_cast<std::size_t>(dim));
  const std::int64_t radix_mask = (std::int64_t{1} << level) - 1;
  for (int a = dim - 1; a >= 0; --a) {
    m[static_cast<std::size_t>(a)] = flat & radix_mask;
    flat >>= level;
  }
  return m;
}

std::int64_t parent_flat(int dim, int level, std::int64_t flat) {
  auto m = decode_coords(dim, level, flat);
  for (auto& v : m) v >>= 1;
  return encode_coords(dim, level - 1, m);
}

std::int64_t child_flat(int dim, int level, std::int64_t flat, int corner) {
  auto m = decode_coords(dim, level, flat);
  for (int a = 0; a < dim; ++a)
    m[static_cast<std::size_t>(a)] = 2 * m[static_cast<std::size_t>(a)] + ((corner >> (dim - 1 - a)) & 1);
  return encode_coords(dim, level + 1, m);
}

DyadicCube::DyadicCube(int dim, int level, std::vector<std::int64_t> index)
    : dim_(dim), level_(level), index_(std::move(index)) {
  if (dim_ < 1) throw std::invalid_argument("cube dimension must be positive");
  if (level_ < 0) throw std::invalid_argument("cube level must be nonnegative");
  if (static_cast<int>(index_.size()) != dim_)
    throw std::invalid_argument("cube index size must match dimension");
  const std::int64_t bound = std::int64_t{1} << level_;
  for (auto v : index_)
    if (v < 0 || v >= bound) throw std::invalid_argument("cube index out of range for level");
}

DyadicCube DyadicCube::root(int dim) {
  return DyadicCube(dim, 0, std::vector<std::int64_t>(static_cast<std::size_t>(dim), 0));
}

DyadicCube DyadicCube::from_flat(int dim, int level, std::int64_t flat) {
  return DyadicCube(dim, level, decode_coords(dim, level, flat));
}

DyadicCube DyadicCube::parent() const {
  if (level_ == 0) throw std::invalid_argument("root cube has no parent");
  return ancestor(level_ - 1);
}

DyadicCube DyadicCube::ancestor(int level) const {
  if (level < 0 || level > level_) throw std::invalid_argument("bad ancestor level");
  std::vector<std::int64_t> m(index_);
  for (auto& v : m) v >>= (level_ - level);
  return DyadicCube(dim_, level, std::move(m));
}

std::vector<DyadicCube> DyadicCube::children() const {
  std::vector<DyadicCube> out;
  const int count = 1 << dim_;
  out.reserve(static_cast<std::size_t>(count));
  for (int corner = 0; corner < count; ++corner) out.push_back(child(corner));
  return out;
}

DyadicCube DyadicCube::child(int corner) const {
  std::vector<std::int64_t> m(index_);
  for (int a = 0; a < dim_; ++a)
    m[static_cast<std::size_t>(a)] = 2 * m[static_cast<std::size_t>(a)] + ((corner >> (dim_ - 1 - a)) & 1);
  return DyadicCube(dim_, level_ + 1, std::move(m));
}

bool DyadicCube::contains(const DyadicCube& q) const {
  if (q.dim_ != dim_ || q.level_ < level_) return false;
  const int shift = q.level_ - level_;
  for (int a = 0; a < dim_; ++a)
    if ((q.index_[static_cast<std::size_t>(a)] >> shift) != index_[static_cast<std::size_t>(a)]) return false;
  return true;
}

std::string DyadicCube::str() const {
  std::ostringstream os;
  os << level_ << ":(";
  for (int a = 0; a < dim_; ++a) {
    if (a) os << ",";
    os << index_[static_cast<std::size_t>(a)];
  }
  os << ")";
  return os.str();
}

std::vector<DyadicCube> dyadic_children(const DyadicCube& q) { return q.children(); }

double GridLayout::cell_center(std::int64_t flat, int axis) const {
  const auto m = decode_coords(dim, depth, flat);
  return box.offset_at(axis) +
         side_at(depth) * (static_cast<double>(m[static_cast<std::size_t>(axis)]) + 0.5);
}

std::int64_t cube_cell_count(const GridLayout& g, const DyadicCube& q) {
  return std::int64_t{1} << (g.dim * (g.depth - q.level()));
}

}  // namespace morreylab
