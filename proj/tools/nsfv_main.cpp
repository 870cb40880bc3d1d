// nsfv: run, resume, analyze, cascade and export Rayleigh-Benard archives.
//
// Exit status: 0 ok, 2 configuration error, 3 solver failure, 4 I/O failure.

#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "nsfv/driver.hpp"
#include "nsfv/errors.hpp"

namespace fs = std::filesystem;
using namespace nsfv;

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kSolver = 3;
constexpr int kIo = 4;

void print_summary(const RunSummary& s) {
  std::cout << "steps " << s.steps << ", t = " << s.t << "\n"
            << "rho in [" << s.range.rho_min << ", " << s.range.rho_max << "], theta in [" << s.range.theta_min
            << ", " << s.range.theta_max << "], |u| <= " << s.range.speed_max << "\n"
            << "max mass drift " << s.max_mass_drift << ", max budget residual " << s.max_budget
            << ", min sigma " << s.min_sigma << ", max decay/scale " << s.max_decay_ratio << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Implicit finite volume Navier-Stokes-Fourier solver for Rayleigh-Benard convection"};
  app.require_subcommand(1);

  std::string config, out, archive, stats = "all";
  std::optional<double> t_end;
  std::optional<std::uint64_t> seed;
  std::optional<long long> M0, Mref;
  bool force = false;
  long long progress = 0;
  int bins = 50;

  auto* run = app.add_subcommand("run", "run a configuration into an archive directory");
  run->add_option("--config", config, "JSON configuration")->required();
  run->add_option("--out", out, "archive directory")->required();
  run->add_option("--t-end", t_end, "override run.t_end");
  run->add_option("--seed", seed, "override the perturbation seed");
  run->add_flag("--force", force, "replace an archive that holds a different configuration");
  run->add_option("--progress", progress, "print a progress line every N steps");

  auto* resume = app.add_subcommand("resume", "continue an archive from its latest checkpoint");
  resume->add_option("--archive", archive, "archive directory")->required();
  resume->add_option("--t-end", t_end, "new end time");
  resume->add_option("--progress", progress, "print a progress line every N steps");

  auto* analyze = app.add_subcommand("analyze", "temporal statistics of an archive's snapshots");
  analyze->add_option("--archive", archive, "archive directory")->required();
  analyze->add_option("--stats", stats, "all | means | defects | measures")
      ->check(CLI::IsMember({"all", "means", "defects", "measures"}));
  analyze->add_option("--M0", M0, "samples 1..M0 are excluded");
  analyze->add_option("--Mref", Mref, "last sample (default: last snapshot present)");
  analyze->add_option("--bins", bins, "histogram bins");

  int levels = 3;
  double T = 5.0;
  double q = 2.0;
  int coarse_n1 = 32;
  bool stationary = false;
  std::string cascade_out = "cascade.csv";
  auto* cascade = app.add_subcommand("cascade", "mesh cascade of a configuration");
  cascade->add_option("--config", config, "JSON configuration")->required();
  cascade->add_option("--levels", levels, "number of meshes");
  cascade->add_option("--T", T, "comparison time");
  cascade->add_option("--q", q, "L^q exponent");
  cascade->add_option("--coarse-n1", coarse_n1, "cells along x1 on the coarsest mesh");
  cascade->add_flag("--stationary", stationary, "start every level from the stationary state");
  cascade->add_option("--out", cascade_out, "report CSV");

  long long every = 0;
  auto* exp = app.add_subcommand("export-plot-data", "collect an archive's plot inputs into one directory");
  exp->add_option("--archive", archive, "archive directory")->required();
  exp->add_option("--out", out, "output directory")->required();
  exp->add_option("--every", every, "also convert every N-th snapshot to VTK");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    RunOptions ro;
    ro.force = force;
    ro.log = &std::cerr;
    ro.progress_every = progress;
    if (*run) {
      RunConfig cfg = load_config(config);
      if (t_end) cfg.plan.t_end = *t_end;
      if (seed) cfg.experiment.seed = *seed;
      cfg = parse_config(to_json_text(cfg));  // revalidate the overrides
      print_summary(run_archive(cfg, out, ro));
    } else if (*resume) {
      print_summary(resume_archive(archive, t_end, ro));
    } else if (*analyze) {
      AnalyzeOptions ao;
      ao.stats = stats;
      ao.M0 = M0;
      ao.Mref = Mref;
      ao.bins = bins;
      analyze_archive(archive, ao, &std::cerr);
    } else if (*cascade) {
      const RunConfig cfg = load_config(config);
      CascadeOptions co;
      co.coarse_n1 = coarse_n1;
      co.levels = levels;
      co.T = T;
      co.q = q;
      co.dt_over_h = cfg.plan.dt_over_h;
      co.start = stationary ? CascadeStart::Stationary : CascadeStart::Initial;
      co.solver = cfg.solver;
      const CascadeResult r = run_cascade(cfg.experiment, co);
      write_cascade_csv(cascade_out, r);
      for (const auto& d : r.differences) {
        std::cout << "h " << d.h << "  d_n " << d.d << "  order " << d.order << "\n";
      }
      if (!r.complete) {
        std::cerr << "cascade stopped: " << r.failure << "\n";
        return kSolver;
      }
    } else if (*exp) {
      export_plot_data(archive, out, every);
    }
  } catch (const StepError& e) {
    std::cerr << "solver failure: " << e.what() << " (iterations " << e.iterations() << ", max |R| "
              << e.residual() << ", t = " << e.last_iterate().t << ")\n";
    return kSolver;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
