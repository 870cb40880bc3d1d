#include "nsfv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nsfv/errors.hpp"
#include "nsfv/thermo.hpp"

namespace nsfv {

namespace {

constexpr double kPi = std::numbers::pi;

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

PerturbationSpec PerturbationSpec::from_seed(std::uint64_t seed) {
  PerturbationSpec s;
  s.seed = seed;
  std::mt19937_64 rng(seed);
  double total = 0.0;
  for (int j = 0; j < 10; ++j) {
    s.a[j] = unit(rng);
    s.b[j] = -kPi + 2.0 * kPi * unit(rng);
    total += s.a[j];
  }
  for (double& a : s.a) a /= total;
  return s;
}

double sample_perturbation(const PerturbationSpec& spec, double x1) {
  double p = 0.0;
  for (int j = 0; j < 10; ++j) p += spec.a[j] * std::cos(spec.b[j] + 2.0 * (j + 1) * kPi * x1);
  return p;
}

ExperimentConfig preset(int id, const std::string& variant) {
  ExperimentConfig cfg;
  cfg.id = id;
  switch (id) {
    case 1: {
      cfg.variant = variant.empty() ? "stable" : variant;
      double s = 0.0;
      if (cfg.variant == "stable") {
        s = -0.3;
        cfg.bulk = BulkProfile::Bump;
      } else if (cfg.variant == "-100" || cfg.variant == "-10" || cfg.variant == "-2" || cfg.variant == "-1.1" ||
                 cfg.variant == "-1") {
        s = std::stod(cfg.variant);
      } else {
        throw ConfigError("experiment 1: unknown variant '" + cfg.variant + "'");
      }
      cfg.theta_L = 1.0;
      cfg.theta_H = 1.0 - 2.0 * s;
      cfg.g = s;
      return cfg;
    }
    case 2:
      return cfg;
    case 3:
      cfg.bulk = BulkProfile::Bump;
      return cfg;
    case 4:
      cfg.bulk = BulkProfile::Layered;
      return cfg;
    case 5:
      cfg.boundary_perturbation = true;
      return cfg;
    default: {
      std::ostringstream m;
      m << "unknown experiment id " << id << " (expected 1..5)";
      throw ConfigError(m.str());
    }
  }
}

Grid make_grid(const ExperimentConfig& cfg) { return Grid::build(cfg.L, cfg.H, cfg.n1, cfg.n2); }

double bulk_profile(const ExperimentConfig& cfg, double x2) {
  switch (cfg.bulk) {
    case BulkProfile::Bump:
      if (x2 >= -0.5 && x2 <= 0.5) {
        const double c = std::cos(kPi * x2);
        return 100.0 * c * c;
      }
      return 0.0;
    case BulkProfile::Layered: {
      double v;
      if (x2 <= -0.9) {
        v = cfg.theta_H;
      } else if (x2 <= -0.8) {
        const double c = std::cos(5.0 * kPi * (x2 + 0.9));
        v = 0.5 + 14.5 * c * c;
      } else if (x2 <= 0.8) {
        const double c = std::cos(5.0 * kPi * (x2 - 0.8) / 16.0);
        v = 0.5 + 0.5 * c * c;
      } else {
        v = cfg.theta_L;
      }
      return v - (cfg.theta_M() + cfg.S_theta() * x2);
    }
    case BulkProfile::None:
    default:
      return 0.0;
  }
}

double boundary_perturbation(const ExperimentConfig& cfg, const PerturbationSpec& spec, double x1) {
  return cfg.boundary_perturbation ? 0.5 * sample_perturbation(spec, x1) : 0.0;
}

BoundaryClosure make_closure(const ExperimentConfig& cfg, const Grid& g) {
  const PerturbationSpec spec = PerturbationSpec::from_seed(cfg.seed);
  BoundaryClosure b;
  b.theta_bottom.assign(static_cast<std::size_t>(g.n1()), cfg.theta_H);
  b.theta_top.resize(static_cast<std::size_t>(g.n1()));
  for (int i = 0; i < g.n1(); ++i) {
    b.theta_top[static_cast<std::size_t>(i)] = cfg.theta_L + boundary_perturbation(cfg, spec, g.x1(i));
  }
  return b;
}

State build_initial_state(const ExperimentConfig& cfg, const Grid& g) {
  const PerturbationSpec spec = PerturbationSpec::from_seed(cfg.seed);
  State s = State::zeros(g);
  for (int j = 0; j < g.n2(); ++j) {
    const double x2 = g.x2(j);
    for (int i = 0; i < g.n1(); ++i) {
      const double x1 = g.x1(i);
      const std::size_t c = g.index(i, j);
      s.rho[c] = 1.2 + std::sin(kPi * x2 / 2.0);
      s.u.x1[c] = 0.0;
      s.u.x2[c] = cfg.c * std::sin(2.0 * kPi * x2);
      s.theta[c] = cfg.theta_M() + cfg.S_theta() * x2 + cfg.c * sample_perturbation(spec, x1) * std::sin(kPi * x2) +
                   boundary_perturbation(cfg, spec, x1) * std::sin(kPi * (x2 + 1.0) / 4.0) + bulk_profile(cfg, x2);
      if (!(s.theta[c] > 0.0)) {
        std::ostringstream m;
        m << "initial temperature is not positive at (" << x1 << ", " << x2 << ")";
        throw ConfigError(m.str());
      }
    }
  }
  return s;
}

State stationary_state(const ExperimentConfig& cfg, const Grid& g) {
  if (std::abs(cfg.g - cfg.S_theta()) > 1e-12 * std::max(1.0, std::abs(cfg.g))) {
    throw ConfigError("stationary state needs g = S_theta");
  }
  State s = State::zeros(g);
  for (int j = 0; j < g.n2(); ++j) {
    for (int i = 0; i < g.n1(); ++i) {
      const std::size_t c = g.index(i, j);
      s.rho[c] = 1.2;
      s.theta[c] = cfg.theta_M() + cfg.S_theta() * g.x2(j);
    }
  }
  return s;
}

SchemeParams make_params(const ExperimentConfig& cfg, const Grid& g, double dt) {
  SchemeParams p;
  p.mu = cfg.mu;
  p.lambda = cfg.lambda;
  p.kappa = cfg.kappa;
  p.law = GasLaw::make(cfg.gamma);
  p.alpha = cfg.alpha;
  p.dt = dt;
  p.g = cfg.g;
  p.closure = make_closure(cfg, g);
  return p;
}

double rayleigh(const ExperimentConfig& cfg) {
  RayleighInputs in;
  in.g = cfg.g;
  in.theta_low = cfg.theta_L;
  in.theta_high = cfg.theta_H;
  in.length = 2.0;
  in.mu = cfg.mu;
  in.kappa = cfg.kappa;
  in.rho_mean = 1.2;
  return rayleigh_number(in);
}

}  // namespace nsfv
