#pragma once

// Fully implicit finite volume step for (rho, u, theta) in strong form:
//
//   D_t rho + div_T F(rho, u) = 0
//   D_t (rho u) + div_T F(rho u, u) = div_h (S - p I) + rho (0, g)
//   c_v D_t (rho theta) + c_v div_T F(rho theta, u) - kappa Lap_h theta = (S - p I) : grad_h u
//
// with F = Up[r, u] - h^alpha [[r]] on interior faces and F = 0 on walls,
// S = 2 mu D_h u + lambda div_h u I. Everything on the right of D_t is evaluated at the new level.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nsfv/errors.hpp"
#include "nsfv/fields.hpp"
#include "nsfv/mesh.hpp"
#include "nsfv/sparse.hpp"
#include "nsfv/thermo.hpp"

namespace nsfv {

struct SchemeParams {
  double mu = 0.1;
  double lambda = 0.1;  // lambda = eta - mu in two dimensions
  double kappa = 0.01;
  GasLaw law;
  double alpha = 0.6;
  double dt = 0.0;
  double g = 0.0;  // gravity vector is (0, g)
  BoundaryClosure closure;

  double eta() const { return lambda + mu; }
  /// Throws ConfigError on invalid constants; returns soft warnings (dt/h outside [0.1, 2]).
  std::vector<std::string> validate(const Grid& grid) const;
};

enum class LinearSolverKind { Auto, Direct, Krylov };

struct SolverOptions {
  double newton_tol = 1e-8;  // on max |R|, rows in strong-form units
  int max_newton = 25;
  LinearSolverKind linear = LinearSolverKind::Auto;
  double damping = 0.5;      // backtracking factor
  double positivity_floor = 1e-10;
  int max_halvings = 3;
  KrylovOptions krylov{60, 600, 1e-4, 0.0};
  /// Largest grid (cells) that Auto sends to the direct solver; SparseLU fill grows fast on this stencil.
  std::size_t direct_max_cells = 64;

  void validate() const;
};

/// Packed residual [mass, momentum_1, momentum_2, energy] per cell, plus a positivity flag.
struct Residual {
  std::vector<double> values;
  bool positive = true;

  double max_abs() const { return norm_inf(values); }
};

/// Straightforward residual assembled from the reference operators (serial).
Residual residual_reference(const Grid& g, const State& prev, const State& cand, const SchemeParams& p);

/// Residual through the fused kernels.
Residual residual(const Grid& g, const State& prev, const State& cand, const SchemeParams& p);

class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, State last, double residual, int iterations)
      : std::runtime_error(what), last_(std::move(last)), residual_(residual), iterations_(iterations) {}
  const State& last_iterate() const { return last_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  State last_;
  double residual_;
  int iterations_;
};

struct StepStats {
  int newton_iterations = 0;
  int linear_iterations = 0;
  int backtracks = 0;
  double residual = 0.0;
  int substeps = 1;
};

/// Holds the Jacobian pattern, kernels and linear-solver workspaces across steps.
class Stepper {
 public:
  Stepper(const Grid& g, SchemeParams p, SolverOptions opts);
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  Stepper& operator=(Stepper&&) noexcept;

  /// One damped Newton solve from prev with the stored dt. Throws StepError.
  State step(const State& prev);
  /// Advances by dt, retrying with 2, 4, ... equal substeps (up to max_halvings) on failure.
  State advance(const State& prev);

  const StepStats& last_stats() const { return stats_; }
  const SchemeParams& params() const { return params_; }
  const SolverOptions& options() const { return opts_; }
  const Grid& grid() const { return grid_; }

 private:
  State solve(const State& prev, double dt, double t_new);

  struct Impl;
  Grid grid_;
  SchemeParams params_;
  SolverOptions opts_;
  StepStats stats_;
  std::unique_ptr<Impl> impl_;
};

State step(const Grid& g, const State& prev, const SchemeParams& p, const SolverOptions& opts);

struct StepEvent {
  long long index = 0;  // index of the new level, 1-based
  const State& prev;
  const State& cur;
  const StepStats& stats;
};

using StepObserver = std::function<void(const StepEvent&)>;

/// Number of steps of size dt from t0 to t_end (t_end is rounded to the time grid).
long long step_count(double t0, double t_end, double dt);

/// Steps from init to t_end; the level k sits at t0 + k dt. Returns the final state.
State run(const Grid& g, const State& init, const SchemeParams& p, const SolverOptions& opts, double t_end,
          const StepObserver& observer = {});

/// Sequence of levels U^0, U^1, ... on the uniform time grid t_k = t0 + k dt.
class Trajectory {
 public:
  Trajectory(State initial, double dt);

  void push(State s);
  std::size_t size() const { return levels_.size(); }
  const State& at(std::size_t k) const { return levels_.at(k); }
  double t0() const { return t0_; }
  double dt() const { return dt_; }
  double t_end() const { return t0_ + static_cast<double>(levels_.size() - 1) * dt_; }
  double time(std::size_t k) const { return t0_ + static_cast<double>(k) * dt_; }

  /// Right-continuous piecewise constant: U^k on (t_{k-1}, t_k].
  State interpolate_pc(double t) const;
  /// Piecewise linear between the knots.
  State interpolate_pl(double t) const;
  /// (U^k - U^{k-1})/dt on (t_{k-1}, t_k]; the rates are returned in State layout.
  State discrete_time_derivative(double t) const;

 private:
  // Index k with t in (t_{k-1}, t_k], knots matched to a relative 1e-9 of dt.
  std::size_t interval(double t, bool allow_t0) const;

  double t0_;
  double dt_;
  std::vector<State> levels_;
};

/// run() that records every level (small problems only).
Trajectory run_recorded(const Grid& g, const State& init, const SchemeParams& p, const SolverOptions& opts,
                        double t_end);

}  // namespace nsfv
