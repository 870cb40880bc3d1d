#include "nsfv/operators.hpp"

#include <cmath>
#include <sstream>

#include "nsfv/errors.hpp"

namespace nsfv {

namespace {

constexpr Side kSides[4] = {Side::West, Side::East, Side::South, Side::North};

// Cells on either side of a face. For wall faces only `in` is meaningful.
struct FaceCells {
  std::size_t in = 0;
  std::size_t out = 0;
};

FaceCells cells_of(const Grid& g, const FaceRef& f) {
  if (f.axis == 0) return {g.index(g.wrap(f.i - 1), f.j), g.index(f.i, f.j)};
  if (f.kind == FaceKind::WallBottom) return {g.index(f.i, 0), 0};
  if (f.kind == FaceKind::WallTop) return {g.index(f.i, g.n2() - 1), 0};
  return {g.index(f.i, f.j - 1), g.index(f.i, f.j)};
}

// Outward normal component along +e_axis for a wall face (-1 at the bottom, +1 at the top).
double wall_normal(FaceKind k) { return k == FaceKind::WallBottom ? -1.0 : 1.0; }

}  // namespace

void check_alpha(double alpha) {
  if (!(alpha > -1.0 && alpha < 1.0)) {
    std::ostringstream msg;
    msg << "alpha must lie in (-1, 1), got " << alpha;
    throw ConfigError(msg.str());
  }
}

double ghost_value(double inner, int column, FaceKind wall, const Wall& rule) {
  switch (rule.rule) {
    case WallRule::Dirichlet: {
      const auto& trace = wall == FaceKind::WallBottom ? *rule.bottom : *rule.top;
      return 2.0 * trace[static_cast<std::size_t>(column)] - inner;
    }
    case WallRule::NoSlip:
      return -inner;
    case WallRule::Copy:
    default:
      return inner;
  }
}

double outer_value(const Grid& g, const CellField& f, std::size_t cell, Side side, const Wall& rule) {
  const CellOrGhost nb = g.neighbor(cell, side);
  if (!nb.ghost) return f[nb.cell];
  return ghost_value(f[cell], g.col(cell), nb.wall, rule);
}

double jump(const Grid& g, const CellField& f, const FaceRef& face, const Wall& rule) {
  const FaceCells c = cells_of(g, face);
  if (face.kind == FaceKind::Interior) return f[c.out] - f[c.in];
  return ghost_value(f[c.in], face.i, face.kind, rule) - f[c.in];
}

double average(const Grid& g, const CellField& f, const FaceRef& face, const Wall& rule) {
  const FaceCells c = cells_of(g, face);
  if (face.kind == FaceKind::Interior) return 0.5 * (f[c.out] + f[c.in]);
  return 0.5 * (ghost_value(f[c.in], face.i, face.kind, rule) + f[c.in]);
}

FaceField grad_face(const Grid& g, const CellField& f, const Wall& rule) {
  FaceField out = FaceField::zeros(g);
  const double inv_h = 1.0 / g.h();
  g.for_each_face([&](const FaceRef& face) {
    const double jmp = jump(g, f, face, rule);
    const double sign = face.kind == FaceKind::Interior ? 1.0 : wall_normal(face.kind);
    out[face.axis][g.face_index(face)] = sign * jmp * inv_h;
  });
  return out;
}

VectorField grad_cell(const Grid& g, const CellField& f, const Wall& rule) {
  VectorField out = VectorField::zeros(g);
  const double inv_h = 1.0 / g.h();
  for (std::size_t c = 0; c < g.cells(); ++c) {
    double acc[2] = {0.0, 0.0};
    for (Side s : kSides) {
      const double avg = 0.5 * (f[c] + outer_value(g, f, c, s, rule));
      acc[Grid::axis_of(s)] += Grid::normal_sign(s) * avg;
    }
    out.x1[c] = acc[0] * inv_h;
    out.x2[c] = acc[1] * inv_h;
  }
  return out;
}

TensorField grad_cell(const Grid& g, const VectorField& v, const Wall& rule) {
  TensorField out = TensorField::zeros(g);
  for (int k = 0; k < 2; ++k) {
    const VectorField gk = grad_cell(g, v[k], rule);
    out(k, 0) = gk.x1;
    out(k, 1) = gk.x2;
  }
  return out;
}

TensorField sym_grad(const Grid& g, const VectorField& v, const Wall& rule) {
  TensorField gu = grad_cell(g, v, rule);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const double off = 0.5 * (gu.c12[c] + gu.c21[c]);
    gu.c12[c] = off;
    gu.c21[c] = off;
  }
  return gu;
}

CellField div_cell(const Grid& g, const VectorField& v, const Wall& rule) {
  CellField out(g.cells(), 0.0);
  const double inv_h = 1.0 / g.h();
  for (std::size_t c = 0; c < g.cells(); ++c) {
    double acc = 0.0;
    for (Side s : kSides) {
      const CellField& comp = v[Grid::axis_of(s)];
      acc += Grid::normal_sign(s) * 0.5 * (comp[c] + outer_value(g, comp, c, s, rule));
    }
    out[c] = acc * inv_h;
  }
  return out;
}

VectorField div_cell(const Grid& g, const TensorField& t, const Wall& rule) {
  VectorField out = VectorField::zeros(g);
  const double inv_h = 1.0 / g.h();
  for (int k = 0; k < 2; ++k) {
    for (std::size_t c = 0; c < g.cells(); ++c) {
      double acc = 0.0;
      for (Side s : kSides) {
        const CellField& comp = t(k, Grid::axis_of(s));
        acc += Grid::normal_sign(s) * 0.5 * (comp[c] + outer_value(g, comp, c, s, rule));
      }
      out[k][c] = acc * inv_h;
    }
  }
  return out;
}

CellField div_faces(const Grid& g, const FaceField& w) {
  CellField out(g.cells(), 0.0);
  const double inv_h = 1.0 / g.h();
  for (std::size_t c = 0; c < g.cells(); ++c) {
    double acc = 0.0;
    for (Side s : kSides) {
      const FaceRef f = g.face(c, s);
      acc += Grid::normal_sign(s) * w[f.axis][g.face_index(f)];
    }
    out[c] = acc * inv_h;
  }
  return out;
}

CellField laplacian(const Grid& g, const CellField& f, const Wall& rule) {
  CellField out(g.cells(), 0.0);
  const double inv_h2 = 1.0 / (g.h() * g.h());
  for (std::size_t c = 0; c < g.cells(); ++c) {
    double acc = 0.0;
    for (Side s : kSides) acc += outer_value(g, f, c, s, rule) - f[c];
    out[c] = acc * inv_h2;
  }
  return out;
}

double upwind(double r_in, double r_out, double un) { return (un >= 0.0 ? r_in : r_out) * un; }

double diffusive_upwind(double r_in, double r_out, double un, double h, double alpha, FaceKind kind) {
  check_alpha(alpha);
  if (kind != FaceKind::Interior) return 0.0;
  return upwind(r_in, r_out, un) - std::pow(h, alpha) * (r_out - r_in);
}

FaceField diffusive_upwind_flux(const Grid& g, const CellField& r, const VectorField& u, double alpha) {
  check_alpha(alpha);
  FaceField out = FaceField::zeros(g);
  const Wall ns = Wall::no_slip();
  g.for_each_face([&](const FaceRef& face) {
    if (face.kind != FaceKind::Interior) return;
    const FaceCells c = cells_of(g, face);
    const double un = average(g, u[face.axis], face, ns);
    out[face.axis][g.face_index(face)] = diffusive_upwind(r[c.in], r[c.out], un, g.h(), alpha, face.kind);
  });
  return out;
}

}  // namespace nsfv
