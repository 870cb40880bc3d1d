#pragma once

// Per-step witnesses of the scheme's structure: positivity ranges, mass, the internal-energy
// budget, entropy production, ballistic energy, renormalized density and the windowed bounds.
// Everything here reads states and never changes them.

#include <functional>
#include <limits>
#include <vector>

#include "nsfv/fields.hpp"
#include "nsfv/mesh.hpp"
#include "nsfv/scheme.hpp"

namespace nsfv {

struct HypothesisBReport {
  double rho_min = std::numeric_limits<double>::infinity();
  double rho_max = -std::numeric_limits<double>::infinity();
  double theta_min = std::numeric_limits<double>::infinity();
  double theta_max = -std::numeric_limits<double>::infinity();
  double speed_max = 0.0;
  long long samples = 0;

  bool violation() const { return samples > 0 && (!(rho_min > 0.0) || !(theta_min > 0.0)); }
  void add(const State& s);
  void merge(const HypothesisBReport& o);
};

/// Extrema over levels [first, last] of a trajectory. Throws RangeError on an empty window.
HypothesisBReport check_hypothesis_B(const Trajectory& traj, std::size_t first, std::size_t last);

double mass_total(const Grid& g, const State& s);

/// |c_v D_t sum rho theta h^2 + 2 (kappa/h) sum_walls (theta_in - theta_B) h - sum (S - pI):grad_h u h^2|.
double energy_budget_residual(const Grid& g, const State& prev, const State& cand, const SchemeParams& p);

/// sum (1/theta) S:grad_h u h^2 + sum_interior faces kappa [[theta]]^2 / (theta_in theta_out).
double entropy_production(const Grid& g, const State& s, const SchemeParams& p);

/// Positive extension Theta(x1, x2) of the wall temperatures into the domain.
using ThetaExtension = std::function<double(double, double)>;

/// Column-wise linear blend of the bottom and top traces.
ThetaExtension affine_extension(const Grid& g, const BoundaryClosure& c);

/// Cell samples of Theta. Throws ConfigError if Theta misses a wall trace by more than 1e-10
/// or is not positive.
CellField sample_extension(const Grid& g, const BoundaryClosure& c, const ThetaExtension& theta);

/// Ballistic energy density 1/2 rho |u|^2 + rho e - Theta rho s per cell.
CellField ballistic_density(const State& s, const CellField& Theta, const GasLaw& law);

/// sum of ballistic_density h^2.
double ballistic_total(const Grid& g, const State& s, const CellField& Theta, const GasLaw& law);

/// D_t sum rho log rho h^2 + sum rho div_h u h^2 at the candidate; nonpositive up to solver error.
double renormalized_density_decay(const Grid& g, const State& prev, const State& cand, const SchemeParams& p);

/// |Omega| max rho max|log rho| / dt, the scale the decay contract is measured against.
double renormalized_decay_scale(const Grid& g, const State& prev, const State& cand, double dt);

/// Time integrals over levels with t_k in (T, T+1].
struct BoundWindow {
  double T = 0.0;
  double grad_theta_L2 = 0.0;       // int ||grad_E theta||^2
  double grad_u_L2 = 0.0;           // int ||grad_h u||^2
  double dt_weighted_Dt_L2 = 0.0;   // dt int ||D_t U||^2
  double jump_dissipation = 0.0;    // int sum_faces (h^alpha + |<u>.n|) |[[U]]|^2 h
  int levels = 0;
};

/// Accumulates one BoundWindow from consecutive step pairs; levels outside the window are ignored.
class BoundWindowAccumulator {
 public:
  BoundWindowAccumulator(const Grid& g, const SchemeParams& p, double T);

  void add(const State& prev, const State& cur);
  const BoundWindow& window() const { return w_; }

 private:
  Grid g_;
  SchemeParams p_;
  BoundWindow w_;
};

/// Window [T, T+1] of a recorded trajectory. Throws RangeError if it is not covered.
BoundWindow uniform_bound_window(const Grid& g, const Trajectory& traj, const SchemeParams& p, double T);

/// Everything the time series records for one accepted step.
struct StepMonitors {
  double mass = 0.0;
  double mass_drift = 0.0;  // relative to the initial mass
  double budget = 0.0;
  double sigma = 0.0;
  double ballistic = 0.0;
  double decay = 0.0;
  double decay_scale = 0.0;
  HypothesisBReport range;
};

/// Stateful observer: remembers the initial mass and the sampled Theta extension.
class Monitor {
 public:
  Monitor(const Grid& g, const SchemeParams& p, const State& initial);
  /// Resumed runs carry the initial mass in the checkpoint.
  Monitor(const Grid& g, const SchemeParams& p, double initial_mass);

  StepMonitors evaluate(const State& prev, const State& cur) const;
  const CellField& theta_extension() const { return Theta_; }
  double initial_mass() const { return mass0_; }

 private:
  Grid g_;
  SchemeParams p_;
  CellField Theta_;
  double mass0_;
};

}  // namespace nsfv
