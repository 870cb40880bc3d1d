#include "nsfv/thermo.hpp"

#include <cmath>
#include <sstream>

#include "nsfv/errors.hpp"

namespace nsfv {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) {
    std::ostringstream msg;
    msg << what << " must be positive, got " << v;
    throw DomainError(msg.str());
  }
}

}  // namespace

GasLaw GasLaw::make(double gamma) {
  if (!(gamma > 1.0)) {
    std::ostringstream msg;
    msg << "gamma must exceed 1, got " << gamma;
    throw ConfigError(msg.str());
  }
  return GasLaw{gamma};
}

double pressure(double rho, double theta) {
  require_positive(rho, "density");
  require_positive(theta, "temperature");
  return rho * theta;
}

double internal_energy(double theta, const GasLaw& law) {
  require_positive(theta, "temperature");
  return law.cv() * theta;
}

double specific_entropy(double rho, double theta, const GasLaw& law) {
  require_positive(rho, "density");
  require_positive(theta, "temperature");
  return law.cv() * std::log(theta) - std::log(rho);
}

double temperature_from_rho_S(double rho, double S, const GasLaw& law) {
  require_positive(rho, "density");
  return std::exp((S / rho + std::log(rho)) / law.cv());
}

double total_energy(double rho, double u1, double u2, double theta, const GasLaw& law) {
  require_positive(rho, "density");
  require_positive(theta, "temperature");
  return 0.5 * rho * (u1 * u1 + u2 * u2) + law.cv() * rho * theta;
}

double ballistic_energy(double rho, double u1, double u2, double theta, double Theta, const GasLaw& law) {
  require_positive(Theta, "ballistic temperature");
  return total_energy(rho, u1, u2, theta, law) - Theta * rho * specific_entropy(rho, theta, law);
}

double rayleigh_number(const RayleighInputs& in) {
  require_positive(in.mu, "viscosity");
  require_positive(in.kappa, "heat conductivity");
  require_positive(in.rho_mean, "mean density");
  require_positive(in.length, "characteristic length");
  const double theta_mean = 0.5 * (in.theta_low + in.theta_high);
  require_positive(theta_mean, "mean temperature");
  const double beta = 1.0 / theta_mean;
  const double nu = in.mu / in.rho_mean;
  const double delta = in.theta_high - in.theta_low;
  return std::abs(in.g) * beta * in.length * in.length * delta / (in.kappa * nu);
}

}  // namespace nsfv
