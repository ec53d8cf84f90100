#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "splitring/numeric.hpp"
#include "splitring/ring_model.hpp"
#include "splitring/sfwm.hpp"

namespace splitring {

/// One resonance: either a single dip or a pair of split dips.
struct ResonanceInfo {
  double center_lambda = 0.0;
  std::vector<double> minima_lambdas;  // ascending, one or two entries
  std::vector<double> depth_fwd;       // |B2->|^2 at each minimum
  double splitting = 0.0;              // distance between the two minima
  std::optional<double> asymmetry;     // |d1 - d2| / (d1 + d2), split dips only
};

struct ResonanceSearch {
  std::size_t grid_points = 4001;
  double refine_tol = 1e-15;  // m
  Ordering ordering = Ordering::EndOfRing;
};

/// Local minima of the forward transmission over [lo, hi], refined by
/// golden-section search and grouped into resonances: minima closer than a
/// quarter of the free spectral range belong to one split resonance.
/// Throws NoResonanceFound when the transmission varies by less than 1e-6.
std::vector<ResonanceInfo> find_resonances(const RingParams& params,
                                           std::pair<double, double> lambda_window,
                                           const ResonanceSearch& search = {});

/// Window of one free spectral range centred on the phase resonance nearest
/// `lambda_center`.
std::pair<double, double> fsr_window(const RingParams& params, double lambda_center);

struct CouplingOptimum {
  double t = 0.0;
  double value = 0.0;
  double lambda = 0.0;
};

struct CouplingSearch {
  std::size_t coarse_points = 201;
  double t_tol = 1e-6;
  double lambda_center = 1.55e-6;
  std::size_t scan_points = 2001;  // per-coupling wavelength scan
};

/// Coupling that maximises `objective` at each coupling's resonance operating
/// point. Coarse grid then golden-section refinement; among maxima equal to
/// within 1e-12 relative the smallest t wins.
CouplingOptimum optimize_coupling(const RingParams& params_template, Objective objective,
                                  std::pair<double, double> t_range,
                                  const CouplingSearch& search = {});

/// Objective value at the resonance operating point of one coupling.
double coupling_objective(const RingParams& params_template, Objective objective, double t,
                          const CouplingSearch& search = {});

// ---------------------------------------------------------------------------
// Spectrum fitting

struct MeasuredSpectrum {
  std::vector<double> lambda;
  std::vector<double> power;

  /// Requires matching lengths, finite values and strictly ascending lambda.
  void validate(std::size_t min_rows = 50) const;
};

/// Reads `lambda_m,power` CSV. Lines starting with '#' and blank lines are
/// skipped; the header is required. Throws Config on malformed input.
MeasuredSpectrum read_spectrum_csv(std::istream& is);

enum class FitParam { T, Alpha, Xi, Zeta, NE, Tau };

std::string_view to_string(FitParam p);
std::optional<FitParam> fit_param_from_string(std::string_view name);

struct FitOptions {
  Ordering ordering = Ordering::EndOfRing;
  std::size_t starts = 8;
  SimplexOptions simplex{};
  // RMS residual below which further objective changes count as stalled.
  double residual_floor = 1e-13;
};

struct FitResult {
  RingParams params;
  double residual = 0.0;  // RMS of model - normalised data
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t best_start = 0;
};

/// Least-squares fit of the forward transmission to `data` (normalised to a
/// peak of 1) over the parameters in `free`, the rest taken from `initial`.
/// Runs `starts` deterministic simplex descents from perturbations of
/// `initial`; the lowest objective wins, ties to the lowest start index.
/// Throws NoResonanceFound on flat data. A result with converged == false is
/// returned rather than thrown so callers can keep the best-so-far values.
FitResult fit_spectrum(const MeasuredSpectrum& data, const RingParams& initial,
                       const std::set<FitParam>& free, const FitOptions& options = {});

void write_fit_result(std::ostream& os, const FitResult& fit);

// ---------------------------------------------------------------------------
// Generic sweeps

enum class SweepAxis { T, Alpha, Xi, Zeta, Lambda };
enum class Metric { Transmission, Eta, JHeraldReduced, JHmReduced, MParam, Splitting };

std::string_view to_string(SweepAxis a);
std::string_view to_string(Metric m);
std::optional<SweepAxis> sweep_axis_from_string(std::string_view name);
std::optional<Metric> metric_from_string(std::string_view name);

struct SweepRow {
  double value = 0.0;
  std::vector<std::pair<Metric, double>> metrics;  // in request order
  std::optional<std::string> error;
};

struct SweepOptions {
  double lambda_center = 1.55e-6;
  Ordering ordering = Ordering::MidRing;  // for transmission
};

/// One row per grid value. For the wavelength axis every metric is taken at
/// that wavelength; for parameter axes heralding metrics come from the
/// resonance operating point (as in rate_vs_efficiency_curve) and the
/// transmission is evaluated at that operating wavelength.
std::vector<SweepRow> sweep_engine(const RingParams& params_template, SweepAxis axis,
                                   const std::vector<double>& grid,
                                   const std::vector<Metric>& metrics,
                                   const SweepOptions& options = {});

void write_sweep_csv(std::ostream& os, SweepAxis axis, const std::vector<Metric>& metrics,
                     const std::vector<SweepRow>& rows);

}  // namespace splitring
