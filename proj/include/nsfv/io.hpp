#pragma once

// Configuration documents, archive file formats and checkpoints.
//
// Archive layout (see README):
//   config.json      resolved configuration, every key spelled out
//   metadata.json    config echo plus seed, perturbation coefficients, solver options, code version
//   series.csv       one row per series_every steps
//   snapshots/       snap_<m>.bin at t = m * sample_cadence, vtk/ field files
//   checkpoints/     ckpt_<step>.bin
//   stats/           written by `analyze`

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nsfv/experiments.hpp"
#include "nsfv/fields.hpp"
#include "nsfv/mesh.hpp"
#include "nsfv/monitors.hpp"
#include "nsfv/scheme.hpp"

namespace nsfv {

inline constexpr const char* kCodeVersion = "nsfv 1.0.0";

struct RunPlan {
  double t_end = 10.0;
  double dt_over_h = 0.5;
  std::optional<double> dt;         // absolute step, overrides dt_over_h
  long long series_every = 1;       // steps between series rows
  double sample_cadence = 2.0;      // binary snapshots at t = m * cadence
  double vtk_cadence = 0.0;         // 0: only the final state
  double checkpoint_cadence = 10.0; // in time units, rounded to whole steps
  long long M0 = 0;                 // first sample index excluded from the running statistics
};

struct RunConfig {
  ExperimentConfig experiment;
  SolverOptions solver;
  RunPlan plan;

  double dt(const Grid& g) const { return plan.dt ? *plan.dt : plan.dt_over_h * g.h(); }
  long long steps_per_sample(const Grid& g) const;
};

/// Parses a JSON document: an optional "experiment" (and "variant") selects the preset, every
/// other key overrides it. Unknown keys, wrong types and physically invalid values throw
/// ConfigError naming the key path. A metadata.json document is accepted as well.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved document; parse_config(to_json_text(c)) reproduces c.
std::string to_json_text(const RunConfig& c);

/// Metadata document: config echo, perturbation coefficients, grid, dt, warnings, code version.
std::string metadata_json_text(const RunConfig& c, const std::vector<std::string>& warnings);

// ---------------------------------------------------------------------------------------------

/// %.17g, the shortest fixed format that round-trips every double.
std::string format_double(double v);

struct SeriesRow {
  long long step = 0;
  double t = 0.0;
  double l1_m1 = 0.0, l1_m2 = 0.0, l1_E = 0.0, l1_rho_e = 0.0, l1_S = 0.0, l1_BE = 0.0;
  StepMonitors mon;
  StepStats stats;
};

/// Column names in file order; the header comment repeats them with units.
const std::vector<std::string>& series_columns();
std::string series_header();
std::string series_line(const SeriesRow& r);
SeriesRow make_series_row(const Grid& g, const State& s, const CellField& Theta, const GasLaw& law,
                          const StepMonitors& mon, const StepStats& stats, long long step);

/// Parsed series file: column names and numeric rows.
struct SeriesTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Throws ConfigError for an unknown column.
  std::vector<double> column(const std::string& name) const;
};
SeriesTable read_series(const std::filesystem::path& path);

/// Drops rows with step > last_step, keeping the header (used on resume).
void truncate_series(const std::filesystem::path& path, long long last_step);

// ---------------------------------------------------------------------------------------------

/// Binary snapshot: bitwise round trip of the state and its grid.
void write_snapshot(const std::filesystem::path& path, const Grid& g, const State& s, long long index);
struct Snapshot {
  Grid grid;
  State state;
  long long index = 0;
};
Snapshot read_snapshot(const std::filesystem::path& path);

struct VtkField {
  std::string name;
  int components = 1;          // 1 for SCALARS, 3 for VECTORS
  std::vector<double> values;  // cell-major, components interleaved
};

/// Legacy STRUCTURED_POINTS ASCII with CELL_DATA.
void write_vtk(const std::filesystem::path& path, const Grid& g, const std::vector<VtkField>& fields,
               const std::string& title = "nsfv");
/// rho, u (as a 3-vector) and theta of a state.
std::vector<VtkField> state_vtk_fields(const State& s);

struct VtkFile {
  int n1 = 0, n2 = 0;
  double origin[2] = {0.0, 0.0};
  double spacing = 0.0;
  std::vector<VtkField> fields;

  const VtkField& field(const std::string& name) const;
};
/// Reads the files write_vtk produces. Throws IoError with the line number on malformed input.
VtkFile read_vtk(const std::filesystem::path& path);

// ---------------------------------------------------------------------------------------------

struct Checkpoint {
  Grid grid;
  SchemeParams params;
  long long step = 0;
  State state;
  double initial_mass = 0.0;
  long long last_sample = 0;           // index of the last snapshot written
  HypothesisBReport range;             // positivity extrema since t0
  std::vector<double> running_stats;   // RunningStats::serialize()
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::filesystem::path& path);

std::string text_of(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nsfv
