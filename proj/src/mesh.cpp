#include "nsfv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nsfv/errors.hpp"

namespace nsfv {

Grid Grid::build(double L, double H, int n1, int n2) {
  if (!(L > 0.0) || !(H > 0.0)) {
    throw ConfigError("grid: half-extents must be positive");
  }
  if (n1 < 4 || n2 < 2) {
    std::ostringstream msg;
    msg << "grid: need n1 >= 4 and n2 >= 2, got " << n1 << "x" << n2;
    throw ConfigError(msg.str());
  }
  const double h1 = 2.0 * L / n1;
  const double h2 = 2.0 * H / n2;
  if (std::abs(h1 - h2) > 4.0 * std::numeric_limits<double>::epsilon() * std::max(h1, h2)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "grid: inconsistent aspect, 2L/n1 = " << h1 << " but 2H/n2 = " << h2;
    throw ConfigError(msg.str());
  }
  Grid g;
  g.n1_ = n1;
  g.n2_ = n2;
  g.h_ = h1;
  g.L_ = L;
  g.H_ = H;
  return g;
}

std::size_t Grid::face_count(int axis) const {
  return axis == 0 ? static_cast<std::size_t>(n1_) * n2_ : static_cast<std::size_t>(n1_) * (n2_ + 1);
}

std::size_t Grid::face_index(const FaceRef& f) const {
  return static_cast<std::size_t>(f.i) + static_cast<std::size_t>(n1_) * f.j;
}

FaceRef Grid::face(std::size_t cell, Side side) const {
  const int i = col(cell);
  const int j = row(cell);
  switch (side) {
    case Side::West:
      return {0, i, j, FaceKind::Interior};
    case Side::East:
      return {0, wrap(i + 1), j, FaceKind::Interior};
    case Side::South:
      return {1, i, j, j == 0 ? FaceKind::WallBottom : FaceKind::Interior};
    case Side::North:
    default:
      return {1, i, j + 1, j + 1 == n2_ ? FaceKind::WallTop : FaceKind::Interior};
  }
}

CellOrGhost Grid::neighbor(std::size_t cell, Side side) const {
  const int i = col(cell);
  const int j = row(cell);
  switch (side) {
    case Side::West:
      return {false, index(wrap(i - 1), j), FaceKind::Interior};
    case Side::East:
      return {false, index(wrap(i + 1), j), FaceKind::Interior};
    case Side::South:
      if (j == 0) return {true, 0, FaceKind::WallBottom};
      return {false, index(i, j - 1), FaceKind::Interior};
    case Side::North:
    default:
      if (j + 1 == n2_) return {true, 0, FaceKind::WallTop};
      return {false, index(i, j + 1), FaceKind::Interior};
  }
}

CellOrGhost Grid::neighbor(std::size_t cell, const FaceRef& f) const {
  const int i = col(cell);
  const int j = row(cell);
  if (f.axis == 0) {
    return neighbor(cell, f.i == i ? Side::West : Side::East);
  }
  return neighbor(cell, f.j == j ? Side::South : Side::North);
}

void Grid::for_each_face(const std::function<void(const FaceRef&)>& fn) const {
  for (int j = 0; j < n2_; ++j) {
    for (int i = 0; i < n1_; ++i) fn(FaceRef{0, i, j, FaceKind::Interior});
  }
  for (int j = 0; j <= n2_; ++j) {
    const FaceKind kind = j == 0 ? FaceKind::WallBottom : (j == n2_ ? FaceKind::WallTop : FaceKind::Interior);
    for (int i = 0; i < n1_; ++i) fn(FaceRef{1, i, j, kind});
  }
}

}  // namespace nsfv
