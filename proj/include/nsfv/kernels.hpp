#pragma once

// Fused, cell-parallel residual and analytic Jacobian of the implicit step on the packed
// layout x[4c + v], v in {rho, u1, u2, theta}. Every write is owned by one cell or one face
// (gather form), so results do not depend on the thread count.

#include <cstdint>
#include <span>
#include <vector>

#include "nsfv/mesh.hpp"
#include "nsfv/sparse.hpp"

namespace nsfv {

struct SchemeParams;

class StepKernels {
 public:
  explicit StepKernels(const Grid& g);

  const Grid& grid() const { return g_; }

  /// r = R(x; x0) with time step p.dt. Returns false if some rho or theta in x is nonpositive.
  bool residual(const SchemeParams& p, std::span<const double> x0, std::span<const double> x,
                std::span<double> r);

  /// dR/dx at x, upwind branches frozen at x. j must carry make_pattern()'s structure.
  void jacobian(const SchemeParams& p, std::span<const double> x, BlockMatrix& j) const;

  /// Block pattern of the 13-cell stencil (self, +-1 and +-2 in each direction, diagonals).
  BlockMatrix make_pattern() const;

 private:
  Grid g_;
  std::vector<double> tcell_;  // T = S - p I per cell: T11, T12, T21, T22
  std::vector<double> gcell_;  // grad_h u per cell: G11, G12, G21, G22
  std::vector<double> flux0_;  // 4 fluxes per axis-0 face
  std::vector<double> flux1_;  // 4 fluxes per axis-1 face, zero on walls
  // Position inside block row K of the neighbor at offset (di, dj): pos_[25 K + 5 (dj + 2) + di + 2].
  std::vector<std::uint8_t> pos_;
};

}  // namespace nsfv
