#pragma once

// Rayleigh-Benard problem family on [-2,2] x [-1,1]: presets, perturbations, initial and wall data.

#include <array>
#include <cstdint>
#include <string>

#include "nsfv/fields.hpp"
#include "nsfv/mesh.hpp"
#include "nsfv/scheme.hpp"

namespace nsfv {

/// P(x1) = sum_j a_j cos(b_j + 2 j pi x1), j = 1..10, with sum a_j = 1.
struct PerturbationSpec {
  std::array<double, 10> a{};
  std::array<double, 10> b{};
  std::uint64_t seed = 0;

  /// a_j uniform in [0,1] then normalized, b_j uniform in [-pi, pi]; mt19937_64.
  static PerturbationSpec from_seed(std::uint64_t seed);
};

double sample_perturbation(const PerturbationSpec& spec, double x1);

enum class BulkProfile {
  None,
  Bump,      // 100 cos^2(pi x2) on [-1/2, 1/2]
  Layered,   // the piecewise small-energy profile minus the affine part
};

struct ExperimentConfig {
  int id = 2;
  std::string variant;  // experiment 1 only: "-100", "-10", "-2", "-1.1", "-1" or "stable"
  double theta_L = 1.0;
  double theta_H = 15.0;
  double g = -10.0;
  double c = 0.01;
  std::uint64_t seed = 42;
  BulkProfile bulk = BulkProfile::None;
  bool boundary_perturbation = false;  // P~ = P/2 on the top wall

  int n1 = 64;
  int n2 = 32;
  double L = 2.0;
  double H = 1.0;

  double mu = 0.1;
  double lambda = 0.1;
  double kappa = 0.01;
  double gamma = 1.4;
  double alpha = 0.6;

  double S_theta() const { return 0.5 * (theta_L - theta_H); }
  double theta_M() const { return 0.5 * (theta_L + theta_H); }
};

/// Throws ConfigError for an unknown id or experiment-1 variant.
ExperimentConfig preset(int id, const std::string& variant = "");

Grid make_grid(const ExperimentConfig& cfg);

/// Bottom trace theta_H, top trace theta_L + P~(x1) at face centers.
BoundaryClosure make_closure(const ExperimentConfig& cfg, const Grid& g);

/// P^(x2) of the configured bulk profile.
double bulk_profile(const ExperimentConfig& cfg, double x2);

/// P~(x1), zero unless the boundary perturbation is on.
double boundary_perturbation(const ExperimentConfig& cfg, const PerturbationSpec& spec, double x1);

/// Cell-center samples of (rho_D, u_D, theta_D). Throws ConfigError if theta_D is not positive.
State build_initial_state(const ExperimentConfig& cfg, const Grid& g);

/// rho = 1.2, u = 0, theta = theta_M + S x2. Throws ConfigError unless g = S.
State stationary_state(const ExperimentConfig& cfg, const Grid& g);

/// Scheme constants of the configuration with the given time step.
SchemeParams make_params(const ExperimentConfig& cfg, const Grid& g, double dt);

/// Rayleigh number of the configuration with rho_M = 1.2 and L = 2.
double rayleigh(const ExperimentConfig& cfg);

}  // namespace nsfv
