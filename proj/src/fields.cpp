#include "nsfv/fields.hpp"

#include "nsfv/errors.hpp"

namespace nsfv {

void pack(const State& s, std::span<double> out) {
  const std::size_t n = s.cells();
  if (out.size() != n * kVars) throw ConfigError("pack: buffer size does not match the state");
  for (std::size_t c = 0; c < n; ++c) {
    out[kVars * c + kRho] = s.rho[c];
    out[kVars * c + kU1] = s.u.x1[c];
    out[kVars * c + kU2] = s.u.x2[c];
    out[kVars * c + kTheta] = s.theta[c];
  }
}

State unpack(std::span<const double> x, double t) {
  if (x.size() % kVars != 0) throw ConfigError("unpack: buffer size is not a multiple of 4");
  const std::size_t n = x.size() / kVars;
  State s{CellField(n), {CellField(n), CellField(n)}, CellField(n), t};
  for (std::size_t c = 0; c < n; ++c) {
    s.rho[c] = x[kVars * c + kRho];
    s.u.x1[c] = x[kVars * c + kU1];
    s.u.x2[c] = x[kVars * c + kU2];
    s.theta[c] = x[kVars * c + kTheta];
  }
  return s;
}

}  // namespace nsfv
