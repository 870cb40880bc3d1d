#pragma once

// Mesh cascade: the same configuration run at h, h/2, h/4, ... with dt = h/2 each, consecutive
// levels compared in L^q((0,T) x Omega) after restricting the finer solution onto the coarser grid.

#include <string>
#include <vector>

#include "nsfv/experiments.hpp"
#include "nsfv/fields.hpp"
#include "nsfv/scheme.hpp"

namespace nsfv {

/// 2x2 cell averages of a state on a grid with even n1, n2. Total mass is preserved exactly.
State restrict_state(const Grid& fine, const State& s);

enum class CascadeStart { Initial, Stationary };

struct CascadeOptions {
  int coarse_n1 = 32;  // h0 = 2L / coarse_n1
  int levels = 3;
  double T = 5.0;
  double q = 2.0;
  double dt_over_h = 0.5;
  CascadeStart start = CascadeStart::Initial;
  SolverOptions solver;
};

struct CascadeLevel {
  int n1 = 0;
  int n2 = 0;
  double h = 0.0;
  double dt = 0.0;
  long long steps = 0;
};

/// Difference between level k (coarse) and k+1.
struct CascadeDifference {
  int level = 0;
  double h = 0.0;  // coarse spacing
  double d = 0.0;  // all four fields together
  double d_rho = 0.0, d_u1 = 0.0, d_u2 = 0.0, d_theta = 0.0;
  double order = 0.0;  // log2(d_{k-1}/d_k), NaN for the first difference
};

struct CascadeResult {
  double q = 2.0;
  double T = 0.0;
  std::vector<CascadeLevel> levels;
  std::vector<CascadeDifference> differences;
  bool complete = true;
  std::string failure;  // set when a level's step failed; the report is then partial
};

/// Throws ConfigError for fewer than two levels or odd dimensions.
CascadeResult run_cascade(const ExperimentConfig& cfg, const CascadeOptions& opts);

}  // namespace nsfv
