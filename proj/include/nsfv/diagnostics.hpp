#pragma once

// Long-time statistics over sampled levels T_m = m * cadence: temporal means and deviations,
// the error families against a reference time or an exact state, Reynolds stress and energy
// fluctuation, time "measures" (histograms) and moment reports.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nsfv/fields.hpp"
#include "nsfv/mesh.hpp"
#include "nsfv/thermo.hpp"

namespace nsfv {

enum class Quantity : int { Rho, M1, M2, S, U1, U2, Theta, E, BE };
inline constexpr int kQuantities = 9;

const char* quantity_name(Quantity q);
/// Throws ConfigError for an unknown name.
Quantity quantity_from_name(const std::string& name);

/// Per-cell sample of every recorded quantity plus the momentum flux m (x) m / rho + p I.
struct SampleFields {
  std::array<CellField, kQuantities> q;
  CellField f11, f12, f22;

  const CellField& operator[](Quantity k) const { return q[static_cast<std::size_t>(k)]; }
  CellField& operator[](Quantity k) { return q[static_cast<std::size_t>(k)]; }
};

/// Theta is the ballistic temperature extension sampled at cells.
SampleFields sample_fields(const State& s, const CellField& Theta, const GasLaw& law);

double l1_norm(const Grid& g, const CellField& f);
double linf_norm(const CellField& f);
double integral(const Grid& g, const CellField& f);
/// l1_norm of a - b.
double l1_distance(const Grid& g, const CellField& a, const CellField& b);

/// Streaming means over samples m = M0+1, M0+2, ... taken at t = m * cadence.
/// Per-cell compensated sums make the result insensitive to rounding order.
class RunningStats {
 public:
  RunningStats(std::size_t cells, double cadence, long long M0);

  /// Throws RangeError unless t = (last + 1) * cadence to 1e-9 relative.
  void update(const SampleFields& s, double t);

  long long count() const { return last_ - M0_; }
  long long last_index() const { return last_; }
  long long M0() const { return M0_; }
  double cadence() const { return cadence_; }
  /// Means of every recorded field. Throws RangeError before the first sample.
  SampleFields mean() const;

  /// Raw accumulator state for checkpoints.
  std::vector<double> serialize() const;
  static RunningStats deserialize(const std::vector<double>& data);

 private:
  static constexpr int kFields = kQuantities + 3;
  std::size_t cells_;
  double cadence_;
  long long M0_;
  long long last_;
  std::vector<double> sum_;   // kFields * cells
  std::vector<double> comp_;  // Neumaier compensation
};

/// Ov U(T_M) for every M in a sample series u[k] = U(T_{M0+1+k}); out[k] averages u[0..k].
std::vector<CellField> running_means(const std::vector<CellField>& u);
/// Dev(U, T_M) = mean over the window of |U - Ov U(T_M)|, for the window u[0..k].
CellField deviation(const std::vector<CellField>& u, std::size_t k, const CellField& mean);

/// E1(U, T_M) = ||U(T_M) - U(T_Mref)||_1 with Mref the last sample; one entry per M.
std::vector<double> error_e1(const Grid& g, const std::vector<CellField>& u);
/// E2: the same for the running means.
std::vector<double> error_e2(const Grid& g, const std::vector<CellField>& u);
/// E3: the same for the deviations (quadratic in the sample count).
std::vector<double> error_e3(const Grid& g, const std::vector<CellField>& u);
/// E~1(U, T_M) = ||U(T_M) - U_s||_1.
std::vector<double> error_exact_e1(const Grid& g, const std::vector<CellField>& u, const CellField& exact);
/// E~2(U, T_M) = ||Ov U(T_M) - U_s||_1.
std::vector<double> error_exact_e2(const Grid& g, const std::vector<CellField>& u, const CellField& exact);

struct DefectFields {
  CellField r11, r12, r22;  // Reynolds stress
  CellField energy;         // energy fluctuation
  CellField trace, lambda1, lambda2;
};

/// Closed-form eigenvalues (lambda1 <= lambda2) of [[a, b], [b, c]].
std::array<double, 2> symmetric_eigenvalues(double a, double b, double c);

/// Defects of the means. Throws DomainError if the mean density is not positive somewhere.
DefectFields reynolds_defect(const SampleFields& mean, const GasLaw& law);

enum class DefectComponent : int { R11, R12, R22, Energy, Trace, Lambda1, Lambda2 };
inline constexpr int kDefectComponents = 7;
const char* defect_name(DefectComponent d);
const CellField& component(const DefectFields& d, DefectComponent c);

enum class Norm { L1, Linf };
/// E4(D, T_M) = ||D(T_M) - D(T_Mref)|| with Mref the last entry.
std::vector<double> defect_error(const Grid& g, const std::vector<DefectFields>& d, DefectComponent c, Norm n);

/// Counting measure of sampled values on a uniform partition of [a, b].
struct HistogramMeasure {
  double a = 0.0;
  double b = 1.0;
  std::vector<long long> counts;
  long long underflow = 0;
  long long overflow = 0;
  long long total = 0;

  HistogramMeasure(double a, double b, int bins);
  /// Bins over the observed [min, max]; a constant series gets a unit-wide range around it.
  static HistogramMeasure from_samples(const std::vector<double>& v, int bins = 50);

  void add(double v);
  int bins() const { return static_cast<int>(counts.size()); }
  double left(int k) const { return a + (b - a) * k / bins(); }
  double right(int k) const { return a + (b - a) * (k + 1) / bins(); }
  /// counts[k] / total, the measure of bin k.
  double mass(int k) const;
};

/// F1 = ||U||_1, F2 = integral of U, F3 = mean over the 4 cells around the vertex nearest to P.
double functional_f1(const Grid& g, const CellField& u);
double functional_f2(const Grid& g, const CellField& u);
double functional_f3(const Grid& g, const CellField& u, double x1, double x2);

struct Probe {
  const char* name;
  double x1;
  double x2;
};
inline constexpr std::array<Probe, 6> kProbes{{{"P1", -1.4, -0.8},
                                               {"P2", -1.4, 0.0},
                                               {"P3", -1.4, 0.8},
                                               {"P4", -0.8, -0.8},
                                               {"P5", -0.8, 0.0},
                                               {"P6", -0.8, 0.8}}};

struct MomentReport {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;                 // unbiased
  std::optional<double> skewness;        // adjusted Fisher-Pearson, empty for zero variance
  std::optional<double> excess_kurtosis; // unbiased estimator, empty for zero variance
};

/// Throws DomainError for fewer than 8 samples.
MomentReport moment_report(const std::vector<double>& v);

}  // namespace nsfv
