#include "nsfv/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "nsfv/errors.hpp"

namespace nsfv {

namespace fs = std::filesystem;

namespace {

std::string numbered(const char* prefix, long long k, int width, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*lld%s", prefix, width, k, ext);
  return buf;
}

fs::path checkpoint_path(const fs::path& dir, long long step) {
  return dir / "checkpoints" / numbered("ckpt_", step, 8, ".bin");
}

std::optional<long long> latest_checkpoint(const fs::path& dir) {
  const fs::path cdir = dir / "checkpoints";
  if (!fs::is_directory(cdir)) return std::nullopt;
  std::optional<long long> best;
  for (const auto& e : fs::directory_iterator(cdir)) {
    const std::string name = e.path().filename().string();
    long long step = 0;
    char tail[8] = {};
    if (std::sscanf(name.c_str(), "ckpt_%lld.%3s", &step, tail) == 2 && std::string(tail) == "bin") {
      if (!best || step > *best) best = step;
    }
  }
  return best;
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  for (const char* sub : {"", "snapshots", "snapshots/vtk", "checkpoints", "stats"}) {
    fs::create_directories(dir / sub, ec);
    if (ec) throw IoError("cannot create " + (dir / sub).string() + ": " + ec.message());
  }
}

void log_line(const RunOptions& o, const std::string& s) {
  if (o.log) *o.log << s << '\n' << std::flush;
}

long long whole(double span, double dt) { return static_cast<long long>(std::llround(span / dt)); }

// Steps the archive from `from` (or from the initial data) to the configured end time.
RunSummary execute(const RunConfig& cfg, const fs::path& dir, const std::optional<Checkpoint>& from,
                   const RunOptions& o) {
  const Grid g = make_grid(cfg.experiment);
  const double dt = cfg.dt(g);
  const SchemeParams p = make_params(cfg.experiment, g, dt);
  const std::vector<std::string> warnings = p.validate(g);
  const long long sps = cfg.steps_per_sample(g);
  const long long cps = sps * whole(cfg.plan.checkpoint_cadence, cfg.plan.sample_cadence);
  const long long vps = cfg.plan.vtk_cadence > 0.0 ? whole(cfg.plan.vtk_cadence, dt) : 0;
  const long long total = step_count(0.0, cfg.plan.t_end, dt);
  const fs::path series_path = dir / "series.csv";

  State cur;
  long long k0 = 0;
  double mass0 = 0.0;
  HypothesisBReport range;
  long long last_sample = 0;
  RunningStats stats(g.cells(), cfg.plan.sample_cadence, cfg.plan.M0);

  if (from) {
    const Checkpoint& c = *from;
    if (!(c.grid == g) || c.params.dt != dt || c.params.alpha != p.alpha || c.params.g != p.g ||
        c.params.closure.theta_top != p.closure.theta_top) {
      throw ConfigError("checkpoint does not match the archive configuration");
    }
    cur = c.state;
    k0 = c.step;
    mass0 = c.initial_mass;
    range = c.range;
    last_sample = c.last_sample;
    stats = RunningStats::deserialize(c.running_stats);
    truncate_series(series_path, k0);
    log_line(o, "resuming at step " + std::to_string(k0) + ", t = " + format_double(cur.t));
  } else {
    make_dirs(dir);
    write_text(dir / "config.json", to_json_text(cfg));
    write_text(dir / "metadata.json", metadata_json_text(cfg, warnings));
    write_text(series_path, series_header());
    cur = build_initial_state(cfg.experiment, g);
    mass0 = mass_total(g, cur);
    range.add(cur);
    write_snapshot(snapshot_path(dir, 0), g, cur, 0);
    write_vtk(dir / "snapshots" / "vtk" / numbered("state_", 0, 8, ".vtk"), g, state_vtk_fields(cur));
    for (const auto& w : warnings) log_line(o, "warning: " + w);
  }

  const Monitor mon(g, p, mass0);
  Stepper stepper(g, p, cfg.solver);
  std::ofstream series(series_path, std::ios::app);
  if (!series) throw IoError("cannot append to " + series_path.string());

  auto checkpoint = [&](long long k) {
    series.flush();
    if (!series) throw IoError("write failed for " + series_path.string());
    Checkpoint c{g, p, k, cur, mass0, last_sample, range, stats.serialize()};
    write_checkpoint(checkpoint_path(dir, k), c);
  };
  if (!from) checkpoint(0);

  for (long long k = k0 + 1; k <= total; ++k) {
    State next;
    try {
      next = stepper.advance(cur);
    } catch (const StepError&) {
      series.flush();
      throw;
    }
    next.t = static_cast<double>(k) * dt;
    const StepMonitors m = mon.evaluate(cur, next);
    range.merge(m.range);
    if (k % cfg.plan.series_every == 0) {
      series << series_line(make_series_row(g, next, mon.theta_extension(), p.law, m, stepper.last_stats(), k));
    }
    if (k % sps == 0) {
      const long long idx = k / sps;
      write_snapshot(snapshot_path(dir, idx), g, next, idx);
      if (idx > cfg.plan.M0) stats.update(sample_fields(next, mon.theta_extension(), p.law), next.t);
      last_sample = idx;
    }
    if (vps > 0 && k % vps == 0) {
      write_vtk(dir / "snapshots" / "vtk" / numbered("state_", k, 8, ".vtk"), g, state_vtk_fields(next));
    }
    cur = std::move(next);
    if (k % cps == 0 || k == total) checkpoint(k);
    if (o.progress_every > 0 && k % o.progress_every == 0) {
      std::ostringstream s;
      s << "step " << k << "/" << total << " t = " << cur.t << " newton " << stepper.last_stats().newton_iterations
        << " rho [" << m.range.rho_min << ", " << m.range.rho_max << "] theta [" << m.range.theta_min << ", "
        << m.range.theta_max << "]";
      log_line(o, s.str());
    }
  }
  if (total > k0 || !from) {
    write_vtk(dir / "snapshots" / "vtk" / "final.vtk", g, state_vtk_fields(cur));
  }
  RunSummary s = summarize_series(dir);
  s.complete = true;
  return s;
}

}  // namespace

fs::path snapshot_path(const fs::path& dir, long long m) {
  return dir / "snapshots" / numbered("snap_", m, 6, ".bin");
}

long long last_contiguous_sample(const fs::path& dir) {
  long long m = -1;
  while (fs::exists(snapshot_path(dir, m + 1))) ++m;
  return m;
}

RunSummary summarize_series(const fs::path& dir) {
  const SeriesTable t = read_series(dir / "series.csv");
  RunSummary s;
  if (t.rows.empty()) return s;
  const auto step = t.column("step");
  const auto time = t.column("t");
  const auto drift = t.column("mass_drift");
  const auto budget = t.column("budget");
  const auto sigma = t.column("sigma");
  const auto decay = t.column("decay");
  const auto scale = t.column("decay_scale");
  const auto rmin = t.column("rho_min");
  const auto rmax = t.column("rho_max");
  const auto tmin = t.column("theta_min");
  const auto tmax = t.column("theta_max");
  const auto vmax = t.column("speed_max");
  const auto sub = t.column("substeps");
  s.steps = static_cast<long long>(step.back());
  s.t = time.back();
  s.min_sigma = sigma.front();
  s.max_decay_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    s.max_mass_drift = std::max(s.max_mass_drift, drift[k]);
    s.max_budget = std::max(s.max_budget, budget[k]);
    s.min_sigma = std::min(s.min_sigma, sigma[k]);
    s.max_decay_ratio = std::max(s.max_decay_ratio, decay[k] / scale[k]);
    s.range.rho_min = std::min(s.range.rho_min, rmin[k]);
    s.range.rho_max = std::max(s.range.rho_max, rmax[k]);
    s.range.theta_min = std::min(s.range.theta_min, tmin[k]);
    s.range.theta_max = std::max(s.range.theta_max, tmax[k]);
    s.range.speed_max = std::max(s.range.speed_max, vmax[k]);
    s.max_substeps = std::max(s.max_substeps, static_cast<int>(sub[k]));
    ++s.range.samples;
  }
  return s;
}

RunSummary run_archive(const RunConfig& cfg, const fs::path& dir, const RunOptions& opts) {
  const fs::path cfg_path = dir / "config.json";
  if (fs::exists(cfg_path)) {
    const bool same = text_of(cfg_path) == to_json_text(cfg);
    if (!same && !opts.force) {
      throw ConfigError("archive " + dir.string() + " holds a different configuration (use --force to replace it)");
    }
    if (same) {
      const auto last = latest_checkpoint(dir);
      if (last) {
        const Grid g = make_grid(cfg.experiment);
        if (*last >= step_count(0.0, cfg.plan.t_end, cfg.dt(g))) {
          log_line(opts, "archive is complete");
          RunSummary s = summarize_series(dir);
          s.complete = true;
          return s;
        }
        return execute(cfg, dir, read_checkpoint(checkpoint_path(dir, *last)), opts);
      }
    }
    // Replace only what this tool writes.
    for (const char* sub : {"snapshots", "checkpoints", "stats"}) fs::remove_all(dir / sub);
    for (const char* f : {"config.json", "metadata.json", "series.csv"}) fs::remove(dir / f);
  }
  return execute(cfg, dir, std::nullopt, opts);
}

RunSummary resume_archive(const fs::path& dir, std::optional<double> t_end, const RunOptions& opts) {
  RunConfig cfg = load_config(dir / "config.json");
  const auto last = latest_checkpoint(dir);
  if (!last) throw IoError("archive " + dir.string() + " has no checkpoint");
  if (t_end) {
    if (!(*t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
    cfg.plan.t_end = *t_end;
    write_text(dir / "config.json", to_json_text(cfg));
    write_text(dir / "metadata.json", metadata_json_text(cfg, {}));
  }
  Checkpoint c = read_checkpoint(checkpoint_path(dir, *last));
  const Grid g = make_grid(cfg.experiment);
  if (c.step > step_count(0.0, cfg.plan.t_end, cfg.dt(g))) {
    throw ConfigError("archive already extends past t_end = " + format_double(cfg.plan.t_end));
  }
  return execute(cfg, dir, c, opts);
}

// ---------------------------------------------------------------------------------------------
// analyze

std::vector<CellField> load_quantity_series(const fs::path& dir, Quantity q, long long M0, long long Mref) {
  const RunConfig cfg = load_config(dir / "config.json");
  const Grid g = make_grid(cfg.experiment);
  const SchemeParams p = make_params(cfg.experiment, g, cfg.dt(g));
  const CellField Theta = sample_extension(g, p.closure, affine_extension(g, p.closure));
  std::vector<CellField> out;
  for (long long m = M0 + 1; m <= Mref; ++m) {
    const Snapshot s = read_snapshot(snapshot_path(dir, m));
    out.push_back(sample_fields(s.state, Theta, p.law)[q]);
  }
  return out;
}

namespace {

void write_histogram(const fs::path& path, const HistogramMeasure& h, const std::string& what, long long M0,
                     long long Mref) {
  std::string s = "# measure of " + what + " over samples " + std::to_string(M0 + 1) + ".." + std::to_string(Mref) +
                  "; bins " + std::to_string(h.bins()) + " on [" + format_double(h.a) + ", " + format_double(h.b) +
                  "]; underflow " + std::to_string(h.underflow) + ", overflow " + std::to_string(h.overflow) + "\n";
  s += "bin_left,bin_right,mass\n";
  for (int k = 0; k < h.bins(); ++k) {
    s += format_double(h.left(k)) + "," + format_double(h.right(k)) + "," + format_double(h.mass(k)) + "\n";
  }
  write_text(path, s);
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : "nan"; }

}  // namespace

void analyze_archive(const fs::path& dir, const AnalyzeOptions& opts, std::ostream* log) {
  if (opts.stats != "all" && opts.stats != "means" && opts.stats != "defects" && opts.stats != "measures") {
    throw ConfigError("--stats must be all, means, defects or measures");
  }
  const RunConfig cfg = load_config(dir / "config.json");
  const Grid g = make_grid(cfg.experiment);
  const SchemeParams p = make_params(cfg.experiment, g, cfg.dt(g));
  const CellField Theta = sample_extension(g, p.closure, affine_extension(g, p.closure));
  const double cadence = cfg.plan.sample_cadence;

  const long long present = last_contiguous_sample(dir);
  const long long M0 = opts.M0.value_or(cfg.plan.M0);
  const long long Mref = opts.Mref.value_or(present);
  if (M0 < 0 || Mref <= M0 || Mref > present) {
    std::ostringstream m;
    m << "analysis needs snapshots " << M0 + 1 << ".." << Mref << " (" << std::max(0LL, Mref - M0)
      << " samples); the archive has 0.." << present;
    throw MissingSnapshots(m.str());
  }
  const long long need = std::max<long long>(Mref - M0, 0);
  const bool all = opts.stats == "all";
  if ((all || opts.stats == "measures") && need < 8) {
    throw MissingSnapshots("measures need at least 8 samples, the window has " + std::to_string(need));
  }
  fs::create_directories(dir / "stats");
  if (log) *log << "analyzing samples " << M0 + 1 << ".." << Mref << "\n";

  // One pass over the snapshots: per-quantity series plus running defects.
  std::array<std::vector<CellField>, kQuantities> series;
  std::vector<DefectFields> defects;
  RunningStats acc(g.cells(), cadence, M0);
  for (long long m = M0 + 1; m <= Mref; ++m) {
    const Snapshot snap = read_snapshot(snapshot_path(dir, m));
    if (!(snap.grid == g)) throw IoError(snapshot_path(dir, m).string() + ": grid differs from the config");
    const SampleFields f = sample_fields(snap.state, Theta, p.law);
    acc.update(f, static_cast<double>(m) * cadence);
    if (all || opts.stats == "defects") defects.push_back(reynolds_defect(acc.mean(), p.law));
    for (int q = 0; q < kQuantities; ++q) series[static_cast<std::size_t>(q)].push_back(f.q[static_cast<std::size_t>(q)]);
  }
  const std::string window = "# samples " + std::to_string(M0 + 1) + ".." + std::to_string(Mref) + " at T_m = m * " +
                             format_double(cadence) + "\n";
  auto T_of = [&](std::size_t k) { return static_cast<double>(M0 + 1 + static_cast<long long>(k)) * cadence; };

  if (all || opts.stats == "means") {
    std::vector<VtkField> fields;
    std::array<std::vector<double>, kQuantities> e1, e2, e3;
    for (int q = 0; q < kQuantities; ++q) {
      const auto& u = series[static_cast<std::size_t>(q)];
      const auto means = running_means(u);
      fields.push_back({std::string("mean_") + quantity_name(static_cast<Quantity>(q)), 1, means.back()});
      fields.push_back({std::string("dev_") + quantity_name(static_cast<Quantity>(q)), 1,
                        deviation(u, u.size() - 1, means.back())});
      e1[static_cast<std::size_t>(q)] = error_e1(g, u);
      e2[static_cast<std::size_t>(q)] = error_e2(g, u);
      e3[static_cast<std::size_t>(q)] = error_e3(g, u);
    }
    write_vtk(dir / "stats" / "means.vtk", g, fields, "temporal means and deviations");

    std::string err = window + "M,T_M";
    std::string ov = window + "M,T_M";
    for (int q = 0; q < kQuantities; ++q) {
      const std::string n = quantity_name(static_cast<Quantity>(q));
      err += ",E1_" + n + ",E2_" + n + ",E3_" + n;
      ov += ",ov_l1_" + n + ",ov_int_" + n;
    }
    err += "\n";
    ov += "\n";
    std::array<double, kQuantities> l1_sum{}, int_sum{};
    for (std::size_t k = 0; k < series[0].size(); ++k) {
      const long long M = M0 + 1 + static_cast<long long>(k);
      err += std::to_string(M) + "," + format_double(T_of(k));
      ov += std::to_string(M) + "," + format_double(T_of(k));
      for (std::size_t q = 0; q < kQuantities; ++q) {
        err += "," + format_double(e1[q][k]) + "," + format_double(e2[q][k]) + "," + format_double(e3[q][k]);
        l1_sum[q] += l1_norm(g, series[q][k]);
        int_sum[q] += integral(g, series[q][k]);
        const double n = static_cast<double>(k + 1);
        ov += "," + format_double(l1_sum[q] / n) + "," + format_double(int_sum[q] / n);
      }
      err += "\n";
      ov += "\n";
    }
    write_text(dir / "stats" / "errors.csv", err);
    write_text(dir / "stats" / "ov_norms.csv", ov);
  }

  if (all || opts.stats == "defects") {
    std::string s = window + "M,T_M";
    for (int c = 0; c < kDefectComponents; ++c) {
      const std::string n = defect_name(static_cast<DefectComponent>(c));
      s += ",l1_" + n + ",linf_" + n + ",E4_l1_" + n + ",E4_linf_" + n;
    }
    s += "\n";
    std::array<std::vector<double>, kDefectComponents> e4l1, e4linf;
    for (int c = 0; c < kDefectComponents; ++c) {
      e4l1[static_cast<std::size_t>(c)] = defect_error(g, defects, static_cast<DefectComponent>(c), Norm::L1);
      e4linf[static_cast<std::size_t>(c)] = defect_error(g, defects, static_cast<DefectComponent>(c), Norm::Linf);
    }
    for (std::size_t k = 0; k < defects.size(); ++k) {
      s += std::to_string(M0 + 1 + static_cast<long long>(k)) + "," + format_double(T_of(k));
      for (int c = 0; c < kDefectComponents; ++c) {
        const CellField& f = component(defects[k], static_cast<DefectComponent>(c));
        s += "," + format_double(l1_norm(g, f)) + "," + format_double(linf_norm(f)) + "," +
             format_double(e4l1[static_cast<std::size_t>(c)][k]) + "," +
             format_double(e4linf[static_cast<std::size_t>(c)][k]);
      }
      s += "\n";
    }
    write_text(dir / "stats" / "defects.csv", s);
    std::vector<VtkField> fields;
    for (int c = 0; c < kDefectComponents; ++c) {
      fields.push_back({defect_name(static_cast<DefectComponent>(c)), 1,
                        component(defects.back(), static_cast<DefectComponent>(c))});
    }
    write_vtk(dir / "stats" / "defects.vtk", g, fields, "Reynolds stress and energy fluctuation");
  }

  if (all || opts.stats == "measures") {
    std::string moments = window + "functional,quantity,probe,n,mean,variance,skewness,excess_kurtosis\n";
    auto emit = [&](const std::string& fn, Quantity q, const std::string& probe, const std::vector<double>& v) {
      const HistogramMeasure h = HistogramMeasure::from_samples(v, opts.bins);
      std::string file = "hist_" + fn + "_" + quantity_name(q) + (probe.empty() ? "" : "_" + probe) + ".csv";
      write_histogram(dir / "stats" / file, h, fn + "(" + quantity_name(q) + ")" + (probe.empty() ? "" : " at " + probe),
                      M0, Mref);
      const MomentReport r = moment_report(v);
      moments += fn + "," + quantity_name(q) + "," + (probe.empty() ? "-" : probe) + "," + std::to_string(r.n) + "," +
                 format_double(r.mean) + "," + format_double(r.variance) + "," + opt_text(r.skewness) + "," +
                 opt_text(r.excess_kurtosis) + "\n";
    };
    auto values = [&](Quantity q, const auto& f) {
      std::vector<double> v;
      for (const CellField& u : series[static_cast<std::size_t>(q)]) v.push_back(f(u));
      return v;
    };
    for (Quantity q : {Quantity::M1, Quantity::M2, Quantity::E, Quantity::BE, Quantity::Theta, Quantity::S}) {
      emit("F1", q, "", values(q, [&](const CellField& u) { return functional_f1(g, u); }));
    }
    for (Quantity q : {Quantity::U1, Quantity::U2, Quantity::BE, Quantity::S}) {
      emit("F2", q, "", values(q, [&](const CellField& u) { return functional_f2(g, u); }));
    }
    for (const Probe& pr : kProbes) {
      for (Quantity q : {Quantity::M1, Quantity::M2, Quantity::E, Quantity::BE}) {
        emit("F3", q, pr.name, values(q, [&](const CellField& u) { return functional_f3(g, u, pr.x1, pr.x2); }));
      }
    }
    write_text(dir / "stats" / "moments.csv", moments);
  }
}

// ---------------------------------------------------------------------------------------------

void write_cascade_csv(const fs::path& path, const CascadeResult& r) {
  std::string s = "# mesh cascade, L^" + format_double(r.q) + "((0," + format_double(r.T) +
                  ") x Omega) differences between consecutive levels after restriction";
  s += r.complete ? "\n" : "; partial: " + r.failure + "\n";
  s += "level,h,d_n,order,d_rho,d_u1,d_u2,d_theta\n";
  for (const auto& d : r.differences) {
    s += std::to_string(d.level) + "," + format_double(d.h) + "," + format_double(d.d) + "," +
         (std::isnan(d.order) ? std::string("nan") : format_double(d.order)) + "," + format_double(d.d_rho) + "," +
         format_double(d.d_u1) + "," + format_double(d.d_u2) + "," + format_double(d.d_theta) + "\n";
  }
  write_text(path, s);
}

void export_plot_data(const fs::path& archive, const fs::path& out, long long every) {
  if (!fs::exists(archive / "series.csv")) throw IoError(archive.string() + " is not an archive (no series.csv)");
  std::error_code ec;
  fs::create_directories(out / "fields", ec);
  if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["archive"] = fs::absolute(archive).lexically_normal().string();
  auto copy = [&](const fs::path& from, const std::string& name) {
    fs::copy_file(from, out / name, fs::copy_options::overwrite_existing, ec);
    if (ec) throw IoError("cannot copy " + from.string() + ": " + ec.message());
  };
  copy(archive / "series.csv", "series.csv");
  copy(archive / "metadata.json", "metadata.json");
  manifest["time_series"] = {"series.csv"};

  const RunConfig cfg = load_config(archive / "config.json");
  const long long last = last_contiguous_sample(archive);
  std::vector<std::string> fields;
  for (long long m = 0; m <= last; ++m) {
    if (m != last && (every <= 0 || m % every != 0)) continue;
    const Snapshot s = read_snapshot(snapshot_path(archive, m));
    const std::string name = "fields/" + numbered("snap_", m, 6, ".vtk");
    write_vtk(out / name, s.grid, state_vtk_fields(s.state), "t = " + format_double(s.state.t));
    fields.push_back(name);
  }
  manifest["field_snapshots"] = fields;

  std::vector<std::string> means, defects, hists, other;
  if (fs::is_directory(archive / "stats")) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(archive / "stats")) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    fs::create_directories(out / "stats");
    for (const auto& f : files) {
      const std::string name = "stats/" + f.filename().string();
      copy(f, name);
      const std::string base = f.filename().string();
      if (base.rfind("hist_", 0) == 0 || base == "moments.csv") {
        hists.push_back(name);
      } else if (base.rfind("defects", 0) == 0) {
        defects.push_back(name);
      } else if (base.rfind("means", 0) == 0 || base == "errors.csv" || base == "ov_norms.csv") {
        means.push_back(name);
      } else {
        other.push_back(name);
      }
    }
  }
  manifest["means_and_deviations"] = means;
  manifest["defects"] = defects;
  manifest["measures"] = hists;
  if (fs::exists(archive / "cascade.csv")) {
    copy(archive / "cascade.csv", "cascade.csv");
    other.push_back("cascade.csv");
  }
  manifest["other"] = other;
  manifest["sample_cadence"] = cfg.plan.sample_cadence;
  write_text(out / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace nsfv
