#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "splitring/response.hpp"
#include "splitring/ring_model.hpp"

namespace splitring {

inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kSpeedOfLight = 299792458.0;             // m/s

/// Material and waveguide constants entering the pair-generation rate.
struct SfwmParams {
  double chi3 = 2.8e-19;      // m^2/V^2
  double a_eff = 0.1e-12;     // m^2
  double n_p = 2.4;           // pump effective index
  double lambda_p = 1.55e-6;  // m

  void validate() const;
};

double beta_coefficient(const SfwmParams& p, double ring_radius);

struct PairRates {
  double fwd = 0.0;
  double bwd = 0.0;
  double total() const { return fwd + bwd; }
};

/// J = beta^2 P^2 per direction.
PairRates pair_generation_rate(double p_fwd, double p_bwd, double beta);

/// Photon-number transfer matrices of one ring pass, taken as the elementwise
/// squared magnitudes of the ring->ring and ring->bus blocks of the
/// photon-propagation matrix (mid-ring ordering, pair-breaking backscatter).
struct PhotonTransfer {
  Eigen::Matrix2d ring_ring;
  Eigen::Matrix2d bus_ring;
  Eigen::Matrix2d one_plus_ring;  // |I + U_RR|^2 elementwise
};

PhotonTransfer photon_transfer_at_phase(const RingParams& params, double theta);

struct Survival {
  double fwd = 0.0;
  double bwd = 0.0;
};

/// Proportion of generated photons that leave through the bus, per direction,
/// for a source (1, q^2) in the ring: Pr = H (I - G)^-1 (1, q^2).
Survival survival_proportions(const RingParams& params, double lambda, double q);
Survival survival_proportions_at_phase(const RingParams& params, double theta, double q);

struct HeraldingReport {
  double beta = 1.0;
  double p_fwd = 0.0;
  double p_bwd = 0.0;
  double j_4wm_fwd = 0.0;
  double j_4wm_bwd = 0.0;
  double q = 0.0;
  double pr_fwd = 0.0;
  double pr_bwd = 0.0;
  double j_hm = 0.0;
  double j_herald = 0.0;
  double eta = 0.0;
  double m_param = 0.0;
};

/// Pump fields from the mid-ring steady state, survival proportions, rates
/// and M at one wavelength. Rates are in units of beta^2 when `sfwm` is empty.
HeraldingReport heralding_report(const RingParams& params,
                                 const std::optional<SfwmParams>& sfwm, double lambda,
                                 const BusInput& input = {});
HeraldingReport heralding_report_at_phase(const RingParams& params,
                                          const std::optional<SfwmParams>& sfwm,
                                          double theta, const BusInput& input = {});

/// M = H (I - G - H) / [(I - G)^2 |I + U_RR|^2], forward component for the
/// source (1, q^2) with q from the pump solution for `input`.
double vernon_M(const RingParams& params, double lambda, const BusInput& input = {});
double vernon_M_at_phase(const RingParams& params, double theta, double q);

/// Quantity maximised when choosing a coupling or an operating wavelength.
enum class Objective { HeraldRate, HeraldMode, Efficiency };

std::string_view to_string(Objective o);

/// Reduced-unit (beta = 1) heralding quantities without M; the cheap path
/// used by wavelength and coupling scans.
struct HeraldSample {
  double eta = 0.0;
  double j_hm = 0.0;
  double j_herald = 0.0;
};

HeraldSample herald_sample_at_phase(const RingParams& params, double theta,
                                    const BusInput& input = {});

/// Value of `objective` in a sample; Efficiency reports eta.
double objective_value(const HeraldSample& s, Objective objective);

struct OperatingPoint {
  double lambda = 0.0;
  HeraldingReport report;
};

/// Wavelength within the free spectral range around `lambda_center` that
/// maximises the heralding rate (or the heralding-mode rate for
/// Objective::HeraldMode), from a dense phase scan plus golden-section
/// refinement. Efficiency is reported at the heralding-rate optimum.
OperatingPoint resonance_operating_point(const RingParams& params,
                                         const std::optional<SfwmParams>& sfwm,
                                         double lambda_center = 1.55e-6,
                                         const BusInput& input = {},
                                         std::size_t scan_points = 2001,
                                         Objective objective = Objective::HeraldRate);

struct CurveRow {
  double t = 0.0;
  double lambda = 0.0;
  double eta = 0.0;
  double j_herald_reduced = 0.0;
  double j_hm_reduced = 0.0;
  double m_param = 0.0;
  std::optional<std::string> error;
};

std::vector<CurveRow> rate_vs_efficiency_curve(const RingParams& params_template,
                                               const std::vector<double>& t_grid,
                                               const std::optional<SfwmParams>& sfwm,
                                               double lambda_center = 1.55e-6);

void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& rows);

}  // namespace splitring
