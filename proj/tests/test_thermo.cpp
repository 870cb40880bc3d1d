#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nsfv/errors.hpp"
#include "nsfv/thermo.hpp"

using namespace nsfv;

namespace {

const GasLaw kAir = GasLaw::make(1.4);

RayleighInputs inputs(double g, double theta_L, double theta_H) {
  RayleighInputs in;
  in.g = g;
  in.theta_low = theta_L;
  in.theta_high = theta_H;
  in.length = 2.0;
  in.mu = 0.1;
  in.kappa = 0.01;
  in.rho_mean = 1.2;
  return in;
}

}  // namespace

TEST(GasLaw, HeatCapacity) {
  EXPECT_DOUBLE_EQ(kAir.cv(), 2.5);
  EXPECT_NEAR(kAir.cv() * (kAir.gamma - 1.0), 1.0, 1e-15);
  EXPECT_THROW(GasLaw::make(1.0), ConfigError);
  EXPECT_THROW(GasLaw::make(0.9), ConfigError);
}

TEST(Thermo, Pressure) {
  EXPECT_DOUBLE_EQ(pressure(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(pressure(1.2, 8), 9.6);
  EXPECT_DOUBLE_EQ(pressure(2, 0.5), 1.0);
  EXPECT_THROW(pressure(0, 1), DomainError);
  EXPECT_THROW(pressure(1, -1), DomainError);
}

TEST(Thermo, SpecificEntropy) {
  EXPECT_DOUBLE_EQ(specific_entropy(1, 1, kAir), 0.0);
  EXPECT_NEAR(specific_entropy(std::exp(-1.0), 1, kAir), 1.0, 1e-15);
  EXPECT_NEAR(specific_entropy(1.2, 8, kAir), 2.5 * std::log(8.0) - std::log(1.2), 1e-14);
  EXPECT_NEAR(specific_entropy(1.2, 8, kAir), 5.01628, 5e-6);
  EXPECT_THROW(specific_entropy(-1, 1, kAir), DomainError);
}

TEST(Thermo, TemperatureFromEntropyDensity) {
  EXPECT_DOUBLE_EQ(temperature_from_rho_S(1, 0, kAir), 1.0);
  EXPECT_NEAR(temperature_from_rho_S(1.2, 1.2 * specific_entropy(1.2, 8, kAir), kAir), 8.0, 1e-12);
  EXPECT_NEAR(temperature_from_rho_S(2, 2 * specific_entropy(2, 3, kAir), kAir), 3.0, 1e-12);
  EXPECT_THROW(temperature_from_rho_S(0, 1, kAir), DomainError);
}

TEST(Thermo, EntropyRoundTripOverTheBox) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 100.0);
  for (int k = 0; k < 2000; ++k) {
    const double rho = u(rng), theta = u(rng);
    const double back = temperature_from_rho_S(rho, rho * specific_entropy(rho, theta, kAir), kAir);
    EXPECT_NEAR(back / theta, 1.0, 1e-12) << rho << " " << theta;
  }
}

TEST(Thermo, TotalEnergy) {
  EXPECT_DOUBLE_EQ(total_energy(1, 0, 0, 1, kAir), 2.5);
  EXPECT_DOUBLE_EQ(total_energy(2, 1, 0, 1, kAir), 6.0);
  EXPECT_NEAR(total_energy(1, 0, 0, 1e-12, kAir), 0.0, 1e-11);
}

TEST(Thermo, BallisticEnergy) {
  EXPECT_DOUBLE_EQ(ballistic_energy(1, 0, 0, 1, 1, kAir), 2.5);
  EXPECT_DOUBLE_EQ(ballistic_energy(1, 0, 0, 1, 2, kAir), 2.5);
  const double r = std::exp(-1.0);
  EXPECT_NEAR(ballistic_energy(r, 0, 0, 1, 1, kAir), 2.5 * r - r, 1e-15);
  EXPECT_NEAR(ballistic_energy(r, 0, 0, 1, 1, kAir), 0.5518, 1e-4);
  EXPECT_THROW(ballistic_energy(1, 0, 0, 1, 0, kAir), DomainError);
}

TEST(Thermo, GibbsRelationByFiniteDifferences) {
  // theta ds/dtheta = de/dtheta and theta ds/drho = de/drho - p/rho^2, with e independent of rho.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.2, 20.0);
  const double d = 1e-6;
  for (int k = 0; k < 200; ++k) {
    const double rho = u(rng), theta = u(rng);
    const double ds_dtheta =
        (specific_entropy(rho, theta + d, kAir) - specific_entropy(rho, theta - d, kAir)) / (2 * d);
    const double de_dtheta = (internal_energy(theta + d, kAir) - internal_energy(theta - d, kAir)) / (2 * d);
    EXPECT_NEAR(theta * ds_dtheta / de_dtheta, 1.0, 1e-6);
    const double ds_drho = (specific_entropy(rho + d, theta, kAir) - specific_entropy(rho - d, theta, kAir)) / (2 * d);
    const double rhs = -pressure(rho, theta) / (rho * rho);
    EXPECT_NEAR(theta * ds_drho / rhs, 1.0, 1e-6);
  }
}

TEST(Rayleigh, ReferenceValues) {
  EXPECT_NEAR(rayleigh_number(inputs(10, 1, 15)), 8.4e4, 0.01 * 8.4e4);
  EXPECT_NEAR(rayleigh_number(inputs(100, 1, 201)), 9.5e5, 0.01 * 9.5e5);
  EXPECT_NEAR(rayleigh_number(inputs(1, 1, 3)), 4.8e3, 0.01 * 4.8e3);
}

TEST(Rayleigh, SignOfGravityIgnoredAndHomogeneousInG) {
  const double base = rayleigh_number(inputs(10, 1, 15));
  EXPECT_DOUBLE_EQ(rayleigh_number(inputs(-10, 1, 15)), base);
  for (double c : {0.5, 3.0, 17.0}) {
    EXPECT_NEAR(rayleigh_number(inputs(10 * c, 1, 15)) / base, c, 1e-14);
  }
}

TEST(Rayleigh, RejectsNonPositiveTransportCoefficients) {
  auto in = inputs(10, 1, 15);
  in.kappa = 0;
  EXPECT_THROW(rayleigh_number(in), DomainError);
  in = inputs(10, 1, 15);
  in.mu = -1;
  EXPECT_THROW(rayleigh_number(in), DomainError);
  in = inputs(10, 1, 15);
  in.rho_mean = 0;
  EXPECT_THROW(rayleigh_number(in), DomainError);
}
