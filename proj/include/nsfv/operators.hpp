#pragma once

// Reference implementations of the discrete difference operators on the uniform grid.
//
// These follow the face-sum definitions literally (one face at a time, serial) and serve
// as the readable baseline that the fused kernels are checked against.
//
// Conventions on a face:
//   interior face: "in" is the west/south cell, "out" the east/north cell, n = +e_axis;
//   wall face:     "in" is the interior cell, "out" the ghost, n is the outward normal.
// FaceField values are components along +e_axis.

#include "nsfv/fields.hpp"
#include "nsfv/mesh.hpp"

namespace nsfv {

/// How a ghost value is formed behind a wall face.
enum class WallRule {
  Dirichlet,  // ghost = 2*trace - in, so the face average equals the trace
  NoSlip,     // ghost = -in, so the face average vanishes
  Copy,       // ghost = in, zero jump (used for the stress tensor's normal components)
};

struct Wall {
  WallRule rule = WallRule::Copy;
  const std::vector<double>* bottom = nullptr;
  const std::vector<double>* top = nullptr;

  static Wall copy() { return {}; }
  static Wall no_slip() { return {WallRule::NoSlip, nullptr, nullptr}; }
  static Wall dirichlet(const BoundaryClosure& c) { return {WallRule::Dirichlet, &c.theta_bottom, &c.theta_top}; }
};

double ghost_value(double inner, int column, FaceKind wall, const Wall& rule);

/// Value across a side of a cell: the neighbor cell, or the ghost at a wall.
double outer_value(const Grid& g, const CellField& f, std::size_t cell, Side side, const Wall& rule);

double jump(const Grid& g, const CellField& f, const FaceRef& face, const Wall& rule);
double average(const Grid& g, const CellField& f, const FaceRef& face, const Wall& rule);

/// Normal gradient [[f]]/h on each face (the dual-grid gradient), as a component along +e_axis.
FaceField grad_face(const Grid& g, const CellField& f, const Wall& rule);

/// Cell gradient from face averages: (1/h) sum n <f>.
VectorField grad_cell(const Grid& g, const CellField& f, const Wall& rule);

/// Cell gradient of a vector field, component (k, a) = d v_k / d x_a.
TensorField grad_cell(const Grid& g, const VectorField& v, const Wall& rule);

/// Symmetric part of grad_cell(v).
TensorField sym_grad(const Grid& g, const VectorField& v, const Wall& rule);

/// (1/h) sum n . <v>.
CellField div_cell(const Grid& g, const VectorField& v, const Wall& rule);

/// Row-wise divergence of a cell tensor, (1/h) sum <T> n.
VectorField div_cell(const Grid& g, const TensorField& t, const Wall& rule);

/// (1/h) sum n . w over the faces of each cell.
CellField div_faces(const Grid& g, const FaceField& w);

/// (1/h^2) sum [[f]] over the faces of each cell.
CellField laplacian(const Grid& g, const CellField& f, const Wall& rule);

/// r^up <u>.n with r^up = r_in when <u>.n >= 0.
double upwind(double r_in, double r_out, double un);

/// Up[r,u] - h^alpha [[r]] on interior faces, 0 on wall faces. Throws ConfigError unless -1 < alpha < 1.
double diffusive_upwind(double r_in, double r_out, double un, double h, double alpha, FaceKind kind);

/// Diffusive upwind flux on every face (component along +e_axis, zero on walls). u uses the no-slip average.
FaceField diffusive_upwind_flux(const Grid& g, const CellField& r, const VectorField& u, double alpha);

/// Validates alpha in (-1, 1).
void check_alpha(double alpha);

}  // namespace nsfv
