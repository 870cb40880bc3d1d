#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nsfv/mesh.hpp"

namespace nsfv {

/// Piecewise-constant scalar, one value per cell in Grid order.
using CellField = std::vector<double>;

struct VectorField {
  CellField x1;
  CellField x2;

  static VectorField zeros(const Grid& g) { return {CellField(g.cells(), 0.0), CellField(g.cells(), 0.0)}; }
  CellField& operator[](int k) { return k == 0 ? x1 : x2; }
  const CellField& operator[](int k) const { return k == 0 ? x1 : x2; }
  bool operator==(const VectorField&) const = default;
};

/// Cell tensor, component (k, a) = derivative of v_k along x_a for gradients.
struct TensorField {
  CellField c11, c12, c21, c22;

  static TensorField zeros(const Grid& g) {
    const std::size_t n = g.cells();
    return {CellField(n, 0.0), CellField(n, 0.0), CellField(n, 0.0), CellField(n, 0.0)};
  }
  CellField& operator()(int k, int a) { return k == 0 ? (a == 0 ? c11 : c12) : (a == 0 ? c21 : c22); }
  const CellField& operator()(int k, int a) const { return k == 0 ? (a == 0 ? c11 : c12) : (a == 0 ? c21 : c22); }
};

/// One value per face, per normal direction. Values are components along +e_axis.
struct FaceField {
  std::vector<double> axis0;
  std::vector<double> axis1;

  static FaceField zeros(const Grid& g) {
    return {std::vector<double>(g.face_count(0), 0.0), std::vector<double>(g.face_count(1), 0.0)};
  }
  std::vector<double>& operator[](int axis) { return axis == 0 ? axis0 : axis1; }
  const std::vector<double>& operator[](int axis) const { return axis == 0 ? axis0 : axis1; }
};

/// Discrete phase variables (rho, u, theta) at one time level.
struct State {
  CellField rho;
  VectorField u;
  CellField theta;
  double t = 0.0;

  static State zeros(const Grid& g) {
    return {CellField(g.cells(), 0.0), VectorField::zeros(g), CellField(g.cells(), 0.0), 0.0};
  }
  std::size_t cells() const { return rho.size(); }
  bool operator==(const State&) const = default;
};

/// Unknowns per cell in the packed (interleaved) layout used by the nonlinear solver.
inline constexpr int kVars = 4;
enum Var : int { kRho = 0, kU1 = 1, kU2 = 2, kTheta = 3 };

void pack(const State& s, std::span<double> out);
State unpack(std::span<const double> x, double t);

/// Wall temperature traces sampled at the face centers of the bottom and top walls.
struct BoundaryClosure {
  std::vector<double> theta_bottom;
  std::vector<double> theta_top;
};

}  // namespace nsfv
