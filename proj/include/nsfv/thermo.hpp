#pragma once

// Perfect-gas constitutive relations: p = rho*theta, e = c_v*theta, s = c_v*log(theta) - log(rho).

namespace nsfv {

struct GasLaw {
  double gamma = 1.4;

  /// Throws ConfigError unless gamma > 1.
  static GasLaw make(double gamma);
  double cv() const { return 1.0 / (gamma - 1.0); }
};

double pressure(double rho, double theta);
double internal_energy(double theta, const GasLaw& law);
double specific_entropy(double rho, double theta, const GasLaw& law);

/// Inverse of S = rho*s(rho, theta) for theta.
double temperature_from_rho_S(double rho, double S, const GasLaw& law);

/// 1/2 rho |u|^2 + c_v rho theta.
double total_energy(double rho, double u1, double u2, double theta, const GasLaw& law);

/// 1/2 rho |u|^2 + rho e - Theta rho s, Theta a positive temperature extension.
double ballistic_energy(double rho, double u1, double u2, double theta, double Theta, const GasLaw& law);

struct RayleighInputs {
  double g = 0.0;        // gravity; the magnitude is used
  double theta_low = 0.0;   // theta_L
  double theta_high = 0.0;  // theta_H
  double length = 2.0;   // characteristic length, raised to the power d = 2
  double mu = 0.0;
  double kappa = 0.0;
  double rho_mean = 1.2;
};

/// Ra = |g| beta L^2 (theta_H - theta_L) / (kappa nu), beta = 1/theta_M, nu = mu/rho_M.
double rayleigh_number(const RayleighInputs& in);

}  // namespace nsfv
