#include "splitring/sfwm.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/LU>

#include "splitring/csv.hpp"
#include "splitring/error.hpp"
#include "splitring/numeric.hpp"
#include "splitring/parallel.hpp"

namespace splitring {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix2d abs2(const Matrix2& m) { return m.cwiseAbs2(); }

Eigen::Matrix2d inverse_checked(const Eigen::Matrix2d& m, const char* what) {
  const double det = m.determinant();
  const double scale = m.cwiseAbs().maxCoeff();
  if (!(std::abs(det) > 1e-14 * scale * scale)) {
    throw Error(ErrorKind::SingularSystem, std::string(what) + " is singular");
  }
  return m.inverse();
}

Eigen::Vector2d source(double q) { return Eigen::Vector2d(1.0, q * q); }

double lambda_from_phase(const RingParams& params, double theta) {
  const double k = 4.0 * kPi * kPi * params.n_e * params.r;
  return k / (theta - params.tau);
}

}  // namespace

void SfwmParams::validate() const {
  auto positive = [](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << name << " = " << v << " must be positive";
      throw Error(ErrorKind::InvalidParam, os.str());
    }
  };
  positive("chi3", chi3);
  positive("a_eff", a_eff);
  positive("n_p", n_p);
  positive("lambda_p", lambda_p);
}

double beta_coefficient(const SfwmParams& p, double ring_radius) {
  // chi3 = 0 is a meaningful (linear) medium here, so only the other fields
  // are checked.
  if (!(p.a_eff > 0.0 && p.n_p > 0.0 && p.lambda_p > 0.0 && ring_radius > 0.0)) {
    throw Error(ErrorKind::InvalidParam, "beta needs positive a_eff, n_p, lambda_p, r");
  }
  return 3.0 * kPi * kPi * kVacuumPermittivity * kSpeedOfLight * p.chi3 * ring_radius /
         (2.0 * p.n_p * p.n_p * p.lambda_p * p.a_eff);
}

PairRates pair_generation_rate(double p_fwd, double p_bwd, double beta) {
  if (p_fwd < 0.0 || p_bwd < 0.0) {
    throw Error(ErrorKind::InvalidParam, "pump powers must be non-negative");
  }
  const double b2 = beta * beta;
  return {b2 * p_fwd * p_fwd, b2 * p_bwd * p_bwd};
}

PhotonTransfer photon_transfer_at_phase(const RingParams& params, double theta) {
  const Matrix6 v = compose_at_phase(params, Ordering::MidRing, theta, /*photon=*/true);
  const Matrix2 v_rr = block_extract(v, ModePair::Ring, ModePair::Ring);
  PhotonTransfer out;
  out.ring_ring = abs2(v_rr);
  out.bus_ring = abs2(block_extract(v, ModePair::Bus, ModePair::Ring));
  out.one_plus_ring = abs2(Matrix2::Identity() + v_rr);
  return out;
}

Survival survival_proportions_at_phase(const RingParams& params, double theta, double q) {
  if (!(q >= 0.0) || !std::isfinite(q)) {
    throw Error(ErrorKind::InvalidParam, "power ratio q must be finite and >= 0");
  }
  const PhotonTransfer pt = photon_transfer_at_phase(params, theta);
  const Eigen::Matrix2d trapped =
      inverse_checked(Eigen::Matrix2d::Identity() - pt.ring_ring, "I - |U_RR|^2");
  const Eigen::Vector2d pr = pt.bus_ring * trapped * source(q);
  return {pr(0), pr(1)};
}

Survival survival_proportions(const RingParams& params, double lambda, double q) {
  return survival_proportions_at_phase(params, round_trip_phase(lambda, params), q);
}

double vernon_M_at_phase(const RingParams& params, double theta, double q) {
  const PhotonTransfer pt = photon_transfer_at_phase(params, theta);
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d trapped = id - pt.ring_ring;
  const Eigen::Matrix2d numerator = pt.bus_ring * (trapped - pt.bus_ring);
  const Eigen::Matrix2d denominator = trapped * trapped * pt.one_plus_ring;
  const Eigen::Vector2d m =
      numerator * inverse_checked(denominator, "M denominator") * source(q);
  return m(0);
}

namespace {

double power_ratio(double p_fwd, double p_bwd) {
  if (p_fwd == 0.0) {
    if (p_bwd == 0.0) return 0.0;  // no pump at all
    throw Error(ErrorKind::DivisionByZero,
                "forward pump power is zero; backward/forward ratio undefined");
  }
  return p_bwd / p_fwd;
}

}  // namespace

double vernon_M(const RingParams& params, double lambda, const BusInput& input) {
  const double theta = round_trip_phase(lambda, params);
  const SteadyState s = solve_steady_state_at_phase(params, Ordering::MidRing, theta, input);
  return vernon_M_at_phase(params, theta, power_ratio(s.p_fwd, s.p_bwd));
}

std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::HeraldRate: return "herald-rate";
    case Objective::HeraldMode: return "herald-mode";
    case Objective::Efficiency: return "efficiency";
  }
  return "unknown";
}

HeraldSample herald_sample_at_phase(const RingParams& params, double theta,
                                    const BusInput& input) {
  const SteadyState s = solve_steady_state_at_phase(params, Ordering::MidRing, theta, input);
  const double q = power_ratio(s.p_fwd, s.p_bwd);
  const double eta = survival_proportions_at_phase(params, theta, q).fwd;
  const double j4 = s.p_fwd * s.p_fwd;
  return {eta, j4 * eta, j4 * eta * eta};
}

double objective_value(const HeraldSample& s, Objective objective) {
  switch (objective) {
    case Objective::HeraldRate: return s.j_herald;
    case Objective::HeraldMode: return s.j_hm;
    case Objective::Efficiency: return s.eta;
  }
  return 0.0;
}

HeraldingReport heralding_report_at_phase(const RingParams& params,
                                          const std::optional<SfwmParams>& sfwm,
                                          double theta, const BusInput& input) {
  const SteadyState s = solve_steady_state_at_phase(params, Ordering::MidRing, theta, input);
  HeraldingReport rep;
  rep.beta = sfwm ? beta_coefficient(*sfwm, params.r) : 1.0;
  rep.p_fwd = s.p_fwd;
  rep.p_bwd = s.p_bwd;
  const PairRates j = pair_generation_rate(s.p_fwd, s.p_bwd, rep.beta);
  rep.j_4wm_fwd = j.fwd;
  rep.j_4wm_bwd = j.bwd;
  rep.q = power_ratio(s.p_fwd, s.p_bwd);
  const Survival pr = survival_proportions_at_phase(params, theta, rep.q);
  rep.pr_fwd = pr.fwd;
  rep.pr_bwd = pr.bwd;
  rep.eta = pr.fwd;
  rep.j_hm = rep.j_4wm_fwd * rep.eta;
  rep.j_herald = rep.j_4wm_fwd * rep.eta * rep.eta;
  rep.m_param = vernon_M_at_phase(params, theta, rep.q);
  return rep;
}

HeraldingReport heralding_report(const RingParams& params,
                                 const std::optional<SfwmParams>& sfwm, double lambda,
                                 const BusInput& input) {
  return heralding_report_at_phase(params, sfwm, round_trip_phase(lambda, params), input);
}

OperatingPoint resonance_operating_point(const RingParams& params,
                                         const std::optional<SfwmParams>& sfwm,
                                         double lambda_center, const BusInput& input,
                                         std::size_t scan_points, Objective objective) {
  params.validate();
  if (scan_points < 3) scan_points = 3;
  const double center = nearest_phase_resonance(lambda_center, params);
  const double theta0 = round_trip_phase(center, params);

  const Objective scan_for =
      objective == Objective::HeraldMode ? Objective::HeraldMode : Objective::HeraldRate;
  auto rate = [&](double theta) {
    try {
      return objective_value(herald_sample_at_phase(params, theta, input), scan_for);
    } catch (const Error&) {
      return -1.0;
    }
  };

  const double step = 2.0 * kPi / static_cast<double>(scan_points - 1);
  std::vector<double> values(scan_points);
  for (std::size_t i = 0; i < scan_points; ++i) {
    values[i] = rate(theta0 - kPi + step * static_cast<double>(i));
  }
  // Lowest index wins ties so the result is reproducible.
  std::size_t best = 0;
  for (std::size_t i = 1; i < scan_points; ++i) {
    if (values[i] > values[best]) best = i;
  }
  if (values[best] < 0.0) {
    throw Error(ErrorKind::SingularSystem, "heralding rate undefined across the scan");
  }
  const double mid = theta0 - kPi + step * static_cast<double>(best);
  const ScalarOptimum opt = golden_section_max(rate, mid - step, mid + step, 1e-13);
  const double theta = opt.value >= values[best] ? opt.x : mid;

  OperatingPoint op;
  op.lambda = lambda_from_phase(params, theta);
  op.report = heralding_report_at_phase(params, sfwm, theta, input);
  return op;
}

std::vector<CurveRow> rate_vs_efficiency_curve(const RingParams& params_template,
                                               const std::vector<double>& t_grid,
                                               const std::optional<SfwmParams>& sfwm,
                                               double lambda_center) {
  std::vector<CurveRow> rows(t_grid.size());
  parallel_for(t_grid.size(), [&](std::size_t i) {
    CurveRow& row = rows[i];
    row.t = t_grid[i];
    try {
      if (!(row.t > 0.0 && row.t <= 1.0)) {
        throw Error(ErrorKind::InvalidParam, "t grid values must lie in (0, 1]");
      }
      RingParams p = params_template;
      p.t = row.t;
      const OperatingPoint op = resonance_operating_point(p, sfwm, lambda_center);
      const double b2 = op.report.beta * op.report.beta;
      row.lambda = op.lambda;
      row.eta = op.report.eta;
      row.j_herald_reduced = op.report.j_herald / b2;
      row.j_hm_reduced = op.report.j_hm / b2;
      row.m_param = op.report.m_param;
    } catch (const Error& e) {
      row.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
  });
  return rows;
}

void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& rows) {
  os << "t,eta,j_herald_reduced,j_hm_reduced,m_param\n";
  const double nan = std::nan("");
  for (const auto& row : rows) {
    const bool bad = row.error.has_value();
    os << csv::join({csv::format(row.t), csv::format(bad ? nan : row.eta),
                     csv::format(bad ? nan : row.j_herald_reduced),
                     csv::format(bad ? nan : row.j_hm_reduced),
                     csv::format(bad ? nan : row.m_param)})
       << '\n';
  }
}

}  // namespace splitring
