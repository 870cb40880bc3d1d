#pragma once

// Archive-level workflows shared by the command line tool and the acceptance suite.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "nsfv/convergence.hpp"
#include "nsfv/diagnostics.hpp"
#include "nsfv/io.hpp"
#include "nsfv/monitors.hpp"

namespace nsfv {

/// Extremes of the per-step monitors over everything written to an archive's series.
struct RunSummary {
  long long steps = 0;
  double t = 0.0;
  bool complete = false;
  HypothesisBReport range;
  double max_mass_drift = 0.0;
  double max_budget = 0.0;
  double min_sigma = 0.0;
  double max_decay_ratio = 0.0;  // max of decay / decay_scale
  int max_substeps = 1;
};

struct RunOptions {
  bool force = false;               // overwrite an archive that holds a different configuration
  std::ostream* log = nullptr;      // progress lines, may be null
  long long progress_every = 0;     // steps between progress lines, 0 = off
};

/// Runs cfg into dir. An existing archive with the same configuration is continued from its
/// latest checkpoint (or left alone when already complete). Throws StepError on solver failure
/// after flushing everything written so far.
RunSummary run_archive(const RunConfig& cfg, const std::filesystem::path& dir, const RunOptions& opts = {});

/// Continues an archive from its latest checkpoint, optionally to a new end time.
RunSummary resume_archive(const std::filesystem::path& dir, std::optional<double> t_end,
                          const RunOptions& opts = {});

/// Recomputes the summary from series.csv.
RunSummary summarize_series(const std::filesystem::path& dir);

struct AnalyzeOptions {
  std::string stats = "all";  // all | means | defects | measures
  std::optional<long long> M0;
  std::optional<long long> Mref;
  int bins = 50;
};

/// Thrown when the archive lacks the snapshots a request needs (maps to exit status 2).
class MissingSnapshots : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Writes the requested statistics into dir/stats.
void analyze_archive(const std::filesystem::path& dir, const AnalyzeOptions& opts, std::ostream* log = nullptr);

/// Reads one quantity at samples M0+1..Mref from the binary snapshots.
std::vector<CellField> load_quantity_series(const std::filesystem::path& dir, Quantity q, long long M0,
                                            long long Mref);

/// Highest m such that snapshots 0..m all exist.
long long last_contiguous_sample(const std::filesystem::path& dir);

std::filesystem::path snapshot_path(const std::filesystem::path& dir, long long m);

void write_cascade_csv(const std::filesystem::path& path, const CascadeResult& r);

/// Copies series and statistics into out and converts the selected snapshots to VTK; writes a
/// manifest.json grouping the files by figure family.
void export_plot_data(const std::filesystem::path& archive, const std::filesystem::path& out, long long every = 0);

}  // namespace nsfv
