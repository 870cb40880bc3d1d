#pragma once

#include <cstddef>
#include <functional>

namespace nsfv {

// Uniform square-cell grid on [-L,L] x [-H,H], periodic in x1, walls at x2 = -H and x2 = +H.
//
// Cells are numbered row-major with x1 fastest: cell(i, j) = i + n1 * j.
// Faces are kept in two families, one per normal direction (the dual grids):
//   axis 0 faces (normal e1): n1 * n2 of them, face (i, j) is the west face of cell (i, j);
//                             face (0, j) joins cell (n1-1, j) with cell (0, j) through the periodic seam.
//   axis 1 faces (normal e2): n1 * (n2 + 1), face (i, j) is the south face of cell (i, j);
//                             j = 0 is the bottom wall, j = n2 the top wall.
// Ghost cells are never stored; boundary closures produce them on demand.

enum class FaceKind { Interior, WallBottom, WallTop };

enum class Side { West = 0, East = 1, South = 2, North = 3 };

struct FaceRef {
  int axis = 0;  // 0: normal e1, 1: normal e2
  int i = 0;
  int j = 0;
  FaceKind kind = FaceKind::Interior;
};

struct CellOrGhost {
  bool ghost = false;
  std::size_t cell = 0;              // valid when !ghost
  FaceKind wall = FaceKind::Interior;  // WallBottom / WallTop when ghost
};

class Grid {
 public:
  Grid() = default;

  /// Throws ConfigError unless 2L/n1 == 2H/n2, n1 >= 4 and n2 >= 2.
  static Grid build(double L, double H, int n1, int n2);

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  double h() const { return h_; }
  double L() const { return L_; }
  double H() const { return H_; }
  std::size_t cells() const { return static_cast<std::size_t>(n1_) * n2_; }
  double cell_area() const { return h_ * h_; }
  double area() const { return 4.0 * L_ * H_; }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(n1_) * j; }
  int col(std::size_t c) const { return static_cast<int>(c % n1_); }
  int row(std::size_t c) const { return static_cast<int>(c / n1_); }
  int wrap(int i) const { return ((i % n1_) + n1_) % n1_; }

  double x1(int i) const { return -L_ + (i + 0.5) * h_; }
  double x2(int j) const { return -H_ + (j + 0.5) * h_; }
  /// Face-center coordinate of the west face of column i.
  double x1_face(int i) const { return -L_ + i * h_; }
  double x2_face(int j) const { return -H_ + j * h_; }

  std::size_t face_count(int axis) const;
  std::size_t face_index(const FaceRef& f) const;
  FaceRef face(std::size_t cell, Side side) const;

  /// Neighbor across the given side of a cell (periodic in x1, ghost at walls).
  CellOrGhost neighbor(std::size_t cell, Side side) const;
  CellOrGhost neighbor(std::size_t cell, const FaceRef& face) const;

  /// Visits every face exactly once: axis 0 first, then axis 1, each row-major.
  void for_each_face(const std::function<void(const FaceRef&)>& fn) const;

  /// Outward normal sign (+1/-1) and axis of a cell side.
  static int axis_of(Side s) { return (s == Side::West || s == Side::East) ? 0 : 1; }
  static double normal_sign(Side s) { return (s == Side::East || s == Side::North) ? 1.0 : -1.0; }

  bool operator==(const Grid& o) const {
    return n1_ == o.n1_ && n2_ == o.n2_ && h_ == o.h_ && L_ == o.L_ && H_ == o.H_;
  }

 private:
  int n1_ = 0;
  int n2_ = 0;
  double h_ = 0.0;
  double L_ = 0.0;
  double H_ = 0.0;
};

}  // namespace nsfv
