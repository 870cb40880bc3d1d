#include "nsfv/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nsfv/diagnostics.hpp"
#include "nsfv/errors.hpp"

namespace nsfv {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string text_of(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------------------------
// Series

const std::vector<std::string>& series_columns() {
  static const std::vector<std::string> cols = {
      "step",      "t",         "l1_m1",     "l1_m2",     "l1_E",       "l1_rho_e",  "l1_S",
      "l1_BE",     "mass",      "mass_drift", "budget",   "sigma",      "ballistic", "decay",
      "decay_scale", "rho_min", "rho_max",   "theta_min", "theta_max",  "speed_max", "newton",
      "linear",    "backtracks", "residual", "substeps"};
  return cols;
}

std::string series_header() {
  std::string h =
      "# l1_* = sum |U| h^2 for m1, m2, E, rho e, S = rho s, BE; mass = sum rho h^2; mass_drift relative to t0;\n"
      "# budget = internal-energy identity residual; sigma = entropy production; ballistic = sum BE h^2;\n"
      "# decay = renormalized density D (<= 0 up to solver error), decay_scale its reference;\n"
      "# extrema are over the level; newton/linear/backtracks/residual/substeps describe the solve\n";
  const auto& cols = series_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) {
    h += cols[k];
    h += k + 1 < cols.size() ? "," : "\n";
  }
  return h;
}

std::string series_line(const SeriesRow& r) {
  const double v[] = {r.t,
                      r.l1_m1,
                      r.l1_m2,
                      r.l1_E,
                      r.l1_rho_e,
                      r.l1_S,
                      r.l1_BE,
                      r.mon.mass,
                      r.mon.mass_drift,
                      r.mon.budget,
                      r.mon.sigma,
                      r.mon.ballistic,
                      r.mon.decay,
                      r.mon.decay_scale,
                      r.mon.range.rho_min,
                      r.mon.range.rho_max,
                      r.mon.range.theta_min,
                      r.mon.range.theta_max,
                      r.mon.range.speed_max};
  std::string line = std::to_string(r.step);
  for (double x : v) {
    line += ',';
    line += format_double(x);
  }
  line += ',' + std::to_string(r.stats.newton_iterations) + ',' + std::to_string(r.stats.linear_iterations) + ',' +
          std::to_string(r.stats.backtracks) + ',' + format_double(r.stats.residual) + ',' +
          std::to_string(r.stats.substeps) + '\n';
  return line;
}

SeriesRow make_series_row(const Grid& g, const State& s, const CellField& Theta, const GasLaw& law,
                          const StepMonitors& mon, const StepStats& stats, long long step) {
  const SampleFields f = sample_fields(s, Theta, law);
  CellField rho_e(s.cells());
  for (std::size_t c = 0; c < s.cells(); ++c) rho_e[c] = law.cv() * s.rho[c] * s.theta[c];
  SeriesRow r;
  r.step = step;
  r.t = s.t;
  r.l1_m1 = l1_norm(g, f[Quantity::M1]);
  r.l1_m2 = l1_norm(g, f[Quantity::M2]);
  r.l1_E = l1_norm(g, f[Quantity::E]);
  r.l1_rho_e = l1_norm(g, rho_e);
  r.l1_S = l1_norm(g, f[Quantity::S]);
  r.l1_BE = l1_norm(g, f[Quantity::BE]);
  r.mon = mon;
  r.stats = stats;
  return r;
}

std::vector<double> SeriesTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] == name) {
      std::vector<double> out;
      out.reserve(rows.size());
      for (const auto& r : rows) out.push_back(r[k]);
      return out;
    }
  }
  throw ConfigError("series has no column '" + name + "'");
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

SeriesTable read_series(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read series " + path.string());
  SeriesTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (t.columns.empty()) {
      t.columns = split(line, ',');
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != t.columns.size()) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(t.columns.size()) + " columns");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0') {
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": not a number '" + c + "'");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw IoError(path.string() + ": no header row");
  return t;
}

void truncate_series(const fs::path& path, long long last_step) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read series " + path.string());
  std::string out;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#' || !header) {
      if (line[0] != '#') header = true;
      out += line + '\n';
      continue;
    }
    const long long step = std::strtoll(line.c_str(), nullptr, 10);
    if (step <= last_step) out += line + '\n';
  }
  in.close();
  write_text(path, out);
}

// ---------------------------------------------------------------------------------------------
// Little-endian binary records

namespace {

class BinWriter {
 public:
  explicit BinWriter(const fs::path& p) : path_(p), out_(p, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot write " + p.string());
  }
  void bytes(const char* s, std::size_t n) { out_.write(s, static_cast<std::streamsize>(n)); }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    out_.write(reinterpret_cast<const char*>(b), 8);
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f64s(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("write failed for " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

class BinReader {
 public:
  explicit BinReader(const fs::path& p) : path_(p), data_(text_of(p)) {}
  void expect(const char* magic) {
    const std::size_t n = std::strlen(magic);
    need(n);
    if (data_.compare(pos_, n, magic) != 0) fail("bad magic, expected " + std::string(magic));
    pos_ += n;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + k])) << (8 * k);
    pos_ += 8;
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::vector<double> f64s(std::size_t expected = SIZE_MAX) {
    const std::uint64_t n = u64();
    if (expected != SIZE_MAX && n != expected) fail("array length " + std::to_string(n) + ", expected " + std::to_string(expected));
    if (n > (data_.size() - pos_) / 8) fail("array length " + std::to_string(n) + " exceeds the file");
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  void done() {
    if (pos_ != data_.size()) fail("trailing bytes");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(path_.string() + ": " + what + " at byte offset " + std::to_string(pos_));
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail("unexpected end of file");
  }
  fs::path path_;
  std::string data_;
  std::size_t pos_ = 0;
};

constexpr std::uint64_t kFormatVersion = 1;

void put_grid(BinWriter& w, const Grid& g) {
  w.i64(g.n1());
  w.i64(g.n2());
  w.f64(g.L());
  w.f64(g.H());
}

Grid get_grid(BinReader& r) {
  const auto n1 = r.i64();
  const auto n2 = r.i64();
  const double L = r.f64();
  const double H = r.f64();
  if (n1 < 4 || n2 < 2 || n1 > (1 << 20) || n2 > (1 << 20)) r.fail("implausible grid dimensions");
  try {
    return Grid::build(L, H, static_cast<int>(n1), static_cast<int>(n2));
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
}

void put_state(BinWriter& w, const State& s) {
  w.f64(s.t);
  w.f64s(s.rho);
  w.f64s(s.u.x1);
  w.f64s(s.u.x2);
  w.f64s(s.theta);
}

State get_state(BinReader& r, std::size_t cells) {
  State s;
  s.t = r.f64();
  s.rho = r.f64s(cells);
  s.u.x1 = r.f64s(cells);
  s.u.x2 = r.f64s(cells);
  s.theta = r.f64s(cells);
  return s;
}

}  // namespace

void write_snapshot(const fs::path& path, const Grid& g, const State& s, long long index) {
  BinWriter w(path);
  w.bytes("NSFVSNAP", 8);
  w.u64(kFormatVersion);
  put_grid(w, g);
  w.i64(index);
  put_state(w, s);
  w.finish();
}

Snapshot read_snapshot(const fs::path& path) {
  BinReader r(path);
  r.expect("NSFVSNAP");
  if (r.u64() != kFormatVersion) r.fail("unsupported snapshot version");
  Snapshot s;
  s.grid = get_grid(r);
  s.index = r.i64();
  s.state = get_state(r, s.grid.cells());
  r.done();
  return s;
}

void write_checkpoint(const fs::path& path, const Checkpoint& c) {
  // Written to a temporary name first so a crash never leaves a torn checkpoint behind.
  fs::path tmp = path;
  tmp += ".tmp";
  {
    BinWriter w(tmp);
    w.bytes("NSFVCKPT", 8);
    w.u64(kFormatVersion);
    put_grid(w, c.grid);
    const SchemeParams& p = c.params;
    for (double v : {p.mu, p.lambda, p.kappa, p.law.gamma, p.alpha, p.dt, p.g}) w.f64(v);
    w.f64s(p.closure.theta_bottom);
    w.f64s(p.closure.theta_top);
    w.i64(c.step);
    put_state(w, c.state);
    w.f64(c.initial_mass);
    w.i64(c.last_sample);
    for (double v : {c.range.rho_min, c.range.rho_max, c.range.theta_min, c.range.theta_max, c.range.speed_max}) {
      w.f64(v);
    }
    w.i64(c.range.samples);
    w.f64s(c.running_stats);
    w.finish();
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place at " + path.string() + ": " + ec.message());
}

Checkpoint read_checkpoint(const fs::path& path) {
  BinReader r(path);
  r.expect("NSFVCKPT");
  if (r.u64() != kFormatVersion) r.fail("unsupported checkpoint version");
  Checkpoint c;
  c.grid = get_grid(r);
  SchemeParams& p = c.params;
  p.mu = r.f64();
  p.lambda = r.f64();
  p.kappa = r.f64();
  p.law.gamma = r.f64();
  p.alpha = r.f64();
  p.dt = r.f64();
  p.g = r.f64();
  const auto n1 = static_cast<std::size_t>(c.grid.n1());
  p.closure.theta_bottom = r.f64s(n1);
  p.closure.theta_top = r.f64s(n1);
  c.step = r.i64();
  c.state = get_state(r, c.grid.cells());
  c.initial_mass = r.f64();
  c.last_sample = r.i64();
  c.range.rho_min = r.f64();
  c.range.rho_max = r.f64();
  c.range.theta_min = r.f64();
  c.range.theta_max = r.f64();
  c.range.speed_max = r.f64();
  c.range.samples = r.i64();
  c.running_stats = r.f64s();
  r.done();
  return c;
}

// ---------------------------------------------------------------------------------------------
// VTK legacy

void write_vtk(const fs::path& path, const Grid& g, const std::vector<VtkField>& fields, const std::string& title) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << g.n1() + 1 << ' ' << g.n2() + 1 << " 1\n";
  out << "ORIGIN " << format_double(-g.L()) << ' ' << format_double(-g.H()) << " 0\n";
  out << "SPACING " << format_double(g.h()) << ' ' << format_double(g.h()) << " 1\n";
  out << "CELL_DATA " << g.cells() << '\n';
  for (const VtkField& f : fields) {
    if (f.values.size() != g.cells() * static_cast<std::size_t>(f.components)) {
      throw ConfigError("vtk field '" + f.name + "' has the wrong size");
    }
    if (f.components == 1) {
      out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : f.values) out << format_double(v) << '\n';
    } else {
      out << "VECTORS " << f.name << " double\n";
      for (std::size_t c = 0; c < g.cells(); ++c) {
        out << format_double(f.values[3 * c]) << ' ' << format_double(f.values[3 * c + 1]) << ' '
            << format_double(f.values[3 * c + 2]) << '\n';
      }
    }
  }
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<VtkField> state_vtk_fields(const State& s) {
  std::vector<VtkField> out;
  out.push_back({"rho", 1, s.rho});
  VtkField u{"u", 3, std::vector<double>(3 * s.cells(), 0.0)};
  for (std::size_t c = 0; c < s.cells(); ++c) {
    u.values[3 * c] = s.u.x1[c];
    u.values[3 * c + 1] = s.u.x2[c];
  }
  out.push_back(std::move(u));
  out.push_back({"theta", 1, s.theta});
  return out;
}

const VtkField& VtkFile::field(const std::string& name) const {
  for (const auto& f : fields) {
    if (f.name == name) return f;
  }
  throw ConfigError("vtk file has no field '" + name + "'");
}

VtkFile read_vtk(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  int lineno = 0;
  auto fail = [&](const std::string& what) -> void {
    throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + what);
  };
  std::string line;
  auto next = [&]() {
    if (!std::getline(in, line)) fail("unexpected end of file");
    ++lineno;
  };
  next();
  if (line.rfind("# vtk DataFile", 0) != 0) fail("not a legacy VTK file");
  next();  // title
  next();
  if (line != "ASCII") fail("only ASCII files are supported");
  next();
  if (line != "DATASET STRUCTURED_POINTS") fail("expected STRUCTURED_POINTS");

  VtkFile f;
  int d3 = 0;
  double sy = 0.0;
  std::size_t cells = 0;
  next();
  if (std::sscanf(line.c_str(), "DIMENSIONS %d %d %d", &f.n1, &f.n2, &d3) != 3) fail("bad DIMENSIONS");
  f.n1 -= 1;
  f.n2 -= 1;
  next();
  if (std::sscanf(line.c_str(), "ORIGIN %lf %lf", &f.origin[0], &f.origin[1]) != 2) fail("bad ORIGIN");
  next();
  if (std::sscanf(line.c_str(), "SPACING %lf %lf", &f.spacing, &sy) != 2) fail("bad SPACING");
  next();
  if (std::sscanf(line.c_str(), "CELL_DATA %zu", &cells) != 1) fail("bad CELL_DATA");
  if (f.n1 < 1 || f.n2 < 1 || cells != static_cast<std::size_t>(f.n1) * static_cast<std::size_t>(f.n2)) {
    fail("CELL_DATA does not match DIMENSIONS");
  }

  auto number = [&](std::istringstream& ss) {
    std::string tok;
    if (!(ss >> tok)) fail("missing value");
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (*end != '\0') fail("not a number '" + tok + "'");
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream head(line);
    std::string kind, name, type;
    head >> kind >> name >> type;
    VtkField fld;
    fld.name = name;
    if (kind == "SCALARS") {
      next();
      if (line != "LOOKUP_TABLE default") fail("expected LOOKUP_TABLE default");
      fld.components = 1;
    } else if (kind == "VECTORS") {
      fld.components = 3;
    } else {
      fail("unexpected section '" + kind + "'");
    }
    fld.values.reserve(cells * static_cast<std::size_t>(fld.components));
    for (std::size_t c = 0; c < cells; ++c) {
      next();
      std::istringstream ss(line);
      for (int k = 0; k < fld.components; ++k) fld.values.push_back(number(ss));
    }
    f.fields.push_back(std::move(fld));
  }
  return f;
}

}  // namespace nsfv
