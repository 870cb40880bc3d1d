#include "nsfv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsfv/errors.hpp"

namespace nsfv {

namespace {

constexpr const char* kNames[kQuantities] = {"rho", "m1", "m2", "S", "u1", "u2", "theta", "E", "BE"};
constexpr const char* kDefectNames[kDefectComponents] = {"R11", "R12", "R22", "Efluc", "trR", "lambda1",
                                                         "lambda2"};

// Neumaier's variant of Kahan summation.
inline void neumaier(double& sum, double& comp, double v) {
  const double t = sum + v;
  if (std::abs(sum) >= std::abs(v)) {
    comp += (sum - t) + v;
  } else {
    comp += (v - t) + sum;
  }
  sum = t;
}

void require_samples(const std::vector<CellField>& u) {
  if (u.empty()) throw RangeError("no samples in the window");
}

std::vector<double> distances_to_last(const Grid& g, const std::vector<CellField>& f) {
  std::vector<double> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = l1_distance(g, f[k], f.back());
  return out;
}

}  // namespace

const char* quantity_name(Quantity q) { return kNames[static_cast<int>(q)]; }

Quantity quantity_from_name(const std::string& name) {
  for (int k = 0; k < kQuantities; ++k) {
    if (name == kNames[k]) return static_cast<Quantity>(k);
  }
  throw ConfigError("unknown quantity '" + name + "'");
}

SampleFields sample_fields(const State& s, const CellField& Theta, const GasLaw& law) {
  const std::size_t n = s.cells();
  SampleFields out;
  for (auto& f : out.q) f.resize(n);
  out.f11.resize(n);
  out.f12.resize(n);
  out.f22.resize(n);
  const double cv = law.cv();
  for (std::size_t c = 0; c < n; ++c) {
    const double r = s.rho[c];
    const double u1 = s.u.x1[c];
    const double u2 = s.u.x2[c];
    const double th = s.theta[c];
    const double entropy = r * (cv * std::log(th) - std::log(r));
    const double energy = 0.5 * r * (u1 * u1 + u2 * u2) + cv * r * th;
    const double p = r * th;
    out[Quantity::Rho][c] = r;
    out[Quantity::M1][c] = r * u1;
    out[Quantity::M2][c] = r * u2;
    out[Quantity::S][c] = entropy;
    out[Quantity::U1][c] = u1;
    out[Quantity::U2][c] = u2;
    out[Quantity::Theta][c] = th;
    out[Quantity::E][c] = energy;
    out[Quantity::BE][c] = energy - Theta[c] * entropy;
    out.f11[c] = r * u1 * u1 + p;
    out.f12[c] = r * u1 * u2;
    out.f22[c] = r * u2 * u2 + p;
  }
  return out;
}

double l1_norm(const Grid& g, const CellField& f) {
  double s = 0.0;
  for (double v : f) s += std::abs(v);
  return s * g.cell_area();
}

double linf_norm(const CellField& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

double integral(const Grid& g, const CellField& f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * g.cell_area();
}

double l1_distance(const Grid& g, const CellField& a, const CellField& b) {
  if (a.size() != b.size()) throw ConfigError("fields live on different grids");
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += std::abs(a[c] - b[c]);
  return s * g.cell_area();
}

RunningStats::RunningStats(std::size_t cells, double cadence, long long M0)
    : cells_(cells), cadence_(cadence), M0_(M0), last_(M0), sum_(kFields * cells, 0.0), comp_(kFields * cells, 0.0) {
  if (!(cadence > 0.0)) throw ConfigError("cadence must be positive");
  if (M0 < 0) throw ConfigError("M0 must be nonnegative");
}

void RunningStats::update(const SampleFields& s, double t) {
  const long long m = last_ + 1;
  const double expected = static_cast<double>(m) * cadence_;
  if (std::abs(t - expected) > 1e-9 * cadence_) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "snapshot at t = " << t << " is off the sampling grid; expected T_" << m << " = " << expected;
    throw RangeError(msg.str());
  }
  if (s.q[0].size() != cells_) throw ConfigError("snapshot has the wrong number of cells");
  auto add = [&](int f, const CellField& v) {
    double* sum = &sum_[static_cast<std::size_t>(f) * cells_];
    double* comp = &comp_[static_cast<std::size_t>(f) * cells_];
    for (std::size_t c = 0; c < cells_; ++c) neumaier(sum[c], comp[c], v[c]);
  };
  for (int k = 0; k < kQuantities; ++k) add(k, s.q[static_cast<std::size_t>(k)]);
  add(kQuantities, s.f11);
  add(kQuantities + 1, s.f12);
  add(kQuantities + 2, s.f22);
  last_ = m;
}

SampleFields RunningStats::mean() const {
  if (count() == 0) throw RangeError("running statistics have no samples yet");
  const double inv = 1.0 / static_cast<double>(count());
  auto get = [&](int f) {
    CellField out(cells_);
    const std::size_t o = static_cast<std::size_t>(f) * cells_;
    for (std::size_t c = 0; c < cells_; ++c) out[c] = (sum_[o + c] + comp_[o + c]) * inv;
    return out;
  };
  SampleFields m;
  for (int k = 0; k < kQuantities; ++k) m.q[static_cast<std::size_t>(k)] = get(k);
  m.f11 = get(kQuantities);
  m.f12 = get(kQuantities + 1);
  m.f22 = get(kQuantities + 2);
  return m;
}

std::vector<double> RunningStats::serialize() const {
  std::vector<double> out;
  out.reserve(4 + 2 * sum_.size());
  out.push_back(static_cast<double>(cells_));
  out.push_back(cadence_);
  out.push_back(static_cast<double>(M0_));
  out.push_back(static_cast<double>(last_));
  out.insert(out.end(), sum_.begin(), sum_.end());
  out.insert(out.end(), comp_.begin(), comp_.end());
  return out;
}

RunningStats RunningStats::deserialize(const std::vector<double>& data) {
  if (data.size() < 4) throw IoError("running statistics record is truncated");
  const auto cells = static_cast<std::size_t>(data[0]);
  RunningStats r(cells, data[1], static_cast<long long>(data[2]));
  r.last_ = static_cast<long long>(data[3]);
  const std::size_t n = kFields * cells;
  if (data.size() != 4 + 2 * n) throw IoError("running statistics record has the wrong length");
  std::copy(data.begin() + 4, data.begin() + 4 + static_cast<std::ptrdiff_t>(n), r.sum_.begin());
  std::copy(data.begin() + 4 + static_cast<std::ptrdiff_t>(n), data.end(), r.comp_.begin());
  return r;
}

std::vector<CellField> running_means(const std::vector<CellField>& u) {
  require_samples(u);
  const std::size_t n = u.front().size();
  std::vector<double> sum(n, 0.0), comp(n, 0.0);
  std::vector<CellField> out;
  out.reserve(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    CellField m(n);
    const double inv = 1.0 / static_cast<double>(k + 1);
    for (std::size_t c = 0; c < n; ++c) {
      neumaier(sum[c], comp[c], u[k][c]);
      m[c] = (sum[c] + comp[c]) * inv;
    }
    out.push_back(std::move(m));
  }
  return out;
}

CellField deviation(const std::vector<CellField>& u, std::size_t k, const CellField& mean) {
  if (k >= u.size()) throw RangeError("deviation window exceeds the samples");
  const std::size_t n = mean.size();
  std::vector<double> sum(n, 0.0), comp(n, 0.0);
  for (std::size_t m = 0; m <= k; ++m) {
    for (std::size_t c = 0; c < n; ++c) neumaier(sum[c], comp[c], std::abs(u[m][c] - mean[c]));
  }
  CellField out(n);
  const double inv = 1.0 / static_cast<double>(k + 1);
  for (std::size_t c = 0; c < n; ++c) out[c] = (sum[c] + comp[c]) * inv;
  return out;
}

std::vector<double> error_e1(const Grid& g, const std::vector<CellField>& u) {
  require_samples(u);
  return distances_to_last(g, u);
}

std::vector<double> error_e2(const Grid& g, const std::vector<CellField>& u) {
  return distances_to_last(g, running_means(u));
}

std::vector<double> error_e3(const Grid& g, const std::vector<CellField>& u) {
  const std::vector<CellField> means = running_means(u);
  std::vector<CellField> devs;
  devs.reserve(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) devs.push_back(deviation(u, k, means[k]));
  return distances_to_last(g, devs);
}

std::vector<double> error_exact_e1(const Grid& g, const std::vector<CellField>& u, const CellField& exact) {
  require_samples(u);
  std::vector<double> out(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = l1_distance(g, u[k], exact);
  return out;
}

std::vector<double> error_exact_e2(const Grid& g, const std::vector<CellField>& u, const CellField& exact) {
  const std::vector<CellField> means = running_means(u);
  std::vector<double> out(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) out[k] = l1_distance(g, means[k], exact);
  return out;
}

std::array<double, 2> symmetric_eigenvalues(double a, double b, double c) {
  const double m = 0.5 * (a + c);
  const double r = std::hypot(0.5 * (a - c), b);
  return {m - r, m + r};
}

DefectFields reynolds_defect(const SampleFields& mean, const GasLaw& law) {
  const std::size_t n = mean.f11.size();
  DefectFields d;
  for (CellField* f : {&d.r11, &d.r12, &d.r22, &d.energy, &d.trace, &d.lambda1, &d.lambda2}) f->resize(n);
  const double cv = law.cv();
  for (std::size_t c = 0; c < n; ++c) {
    const double r = mean[Quantity::Rho][c];
    if (!(r > 0.0)) throw DomainError("mean density is not positive");
    const double m1 = mean[Quantity::M1][c];
    const double m2 = mean[Quantity::M2][c];
    const double th = temperature_from_rho_S(r, mean[Quantity::S][c], law);
    const double p = r * th;
    d.r11[c] = mean.f11[c] - (m1 * m1 / r + p);
    d.r12[c] = mean.f12[c] - m1 * m2 / r;
    d.r22[c] = mean.f22[c] - (m2 * m2 / r + p);
    d.energy[c] = mean[Quantity::E][c] - (0.5 * (m1 * m1 + m2 * m2) / r + cv * r * th);
    const auto ev = symmetric_eigenvalues(d.r11[c], d.r12[c], d.r22[c]);
    d.trace[c] = d.r11[c] + d.r22[c];
    d.lambda1[c] = ev[0];
    d.lambda2[c] = ev[1];
  }
  return d;
}

const char* defect_name(DefectComponent d) { return kDefectNames[static_cast<int>(d)]; }

const CellField& component(const DefectFields& d, DefectComponent c) {
  switch (c) {
    case DefectComponent::R11: return d.r11;
    case DefectComponent::R12: return d.r12;
    case DefectComponent::R22: return d.r22;
    case DefectComponent::Energy: return d.energy;
    case DefectComponent::Trace: return d.trace;
    case DefectComponent::Lambda1: return d.lambda1;
    case DefectComponent::Lambda2:
    default: return d.lambda2;
  }
}

std::vector<double> defect_error(const Grid& g, const std::vector<DefectFields>& d, DefectComponent c, Norm n) {
  if (d.empty()) throw RangeError("no defect snapshots");
  const CellField& last = component(d.back(), c);
  std::vector<double> out(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    const CellField& f = component(d[k], c);
    if (n == Norm::L1) {
      out[k] = l1_distance(g, f, last);
    } else {
      double m = 0.0;
      for (std::size_t q = 0; q < f.size(); ++q) m = std::max(m, std::abs(f[q] - last[q]));
      out[k] = m;
    }
  }
  return out;
}

HistogramMeasure::HistogramMeasure(double lo, double hi, int bins) : a(lo), b(hi) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  if (!(hi > lo)) throw ConfigError("histogram range must have b > a");
  counts.assign(static_cast<std::size_t>(bins), 0);
}

HistogramMeasure HistogramMeasure::from_samples(const std::vector<double>& v, int bins) {
  if (v.empty()) throw RangeError("histogram of an empty series");
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double a = *lo;
  double b = *hi;
  if (!(b > a)) {
    const double w = 0.5 * std::max(1.0, std::abs(a));
    a -= w;
    b += w;
  }
  HistogramMeasure h(a, b, bins);
  for (double x : v) h.add(x);
  return h;
}

void HistogramMeasure::add(double v) {
  ++total;
  if (v < a) {
    ++underflow;
  } else if (v > b) {
    ++overflow;
  } else {
    // The right end belongs to the last bin.
    auto k = static_cast<long long>((v - a) / (b - a) * static_cast<double>(bins()));
    k = std::clamp(k, 0LL, static_cast<long long>(bins() - 1));
    ++counts[static_cast<std::size_t>(k)];
  }
}

double HistogramMeasure::mass(int k) const {
  return total == 0 ? 0.0 : static_cast<double>(counts.at(static_cast<std::size_t>(k))) / static_cast<double>(total);
}

double functional_f1(const Grid& g, const CellField& u) { return l1_norm(g, u); }

double functional_f2(const Grid& g, const CellField& u) { return integral(g, u); }

double functional_f3(const Grid& g, const CellField& u, double x1, double x2) {
  // Vertex (I, J) sits at (-L + I h, -H + J h); the square [x-h, x+h]^2 around it holds 4 cells.
  const int I = static_cast<int>(std::lround((x1 + g.L()) / g.h()));
  const int J = std::clamp(static_cast<int>(std::lround((x2 + g.H()) / g.h())), 1, g.n2() - 1);
  double s = 0.0;
  for (int dj = -1; dj <= 0; ++dj) {
    for (int di = -1; di <= 0; ++di) s += u[g.index(g.wrap(I + di), J + dj)];
  }
  return 0.25 * s;
}

MomentReport moment_report(const std::vector<double>& v) {
  if (v.size() < 8) throw DomainError("moment report needs at least 8 samples");
  MomentReport r;
  r.n = v.size();
  const double n = static_cast<double>(r.n);
  double s = 0.0;
  for (double x : v) s += x;
  r.mean = s / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - r.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  r.variance = m2 * n / (n - 1.0);
  if (m2 > 1e-300 && m2 > 1e-28 * r.mean * r.mean) {
    const double g1 = m3 / std::pow(m2, 1.5);
    const double g2 = m4 / (m2 * m2) - 3.0;
    r.skewness = std::sqrt(n * (n - 1.0)) / (n - 2.0) * g1;
    r.excess_kurtosis = (n - 1.0) / ((n - 2.0) * (n - 3.0)) * ((n + 1.0) * g2 + 6.0);
  }
  return r;
}

}  // namespace nsfv
