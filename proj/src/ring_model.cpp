#include "splitring/ring_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "splitring/error.hpp"

namespace splitring {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

void require_unit_interval(const char* name, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << name << " = " << v << " outside [0, 1]";
    throw Error(ErrorKind::InvalidParam, os.str());
  }
}

void require_finite(const char* name, double v) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << name << " is not finite";
    throw Error(ErrorKind::InvalidParam, os.str());
  }
}

void require_positive(const char* name, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " = " << v << " must be positive";
    throw Error(ErrorKind::InvalidParam, os.str());
  }
}

double complement(double x) { return std::sqrt(std::max(0.0, 1.0 - x * x)); }

}  // namespace

void RingParams::validate() const {
  require_unit_interval("t", t);
  require_unit_interval("alpha", alpha);
  require_unit_interval("xi", xi);
  require_finite("phi", phi);
  require_finite("zeta", zeta);
  require_finite("tau", tau);
  require_positive("n_e", n_e);
  require_positive("r", r);
}

std::string_view to_string(Placement p) {
  return p == Placement::InRing ? "in-ring" : "in-coupler";
}

std::string_view to_string(Ordering o) {
  return o == Ordering::EndOfRing ? "end-of-ring" : "mid-ring";
}

double round_trip_phase(double lambda, const RingParams& params) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorKind::InvalidParam, "wavelength must be positive");
  }
  return 4.0 * kPi * kPi * params.n_e * params.r / lambda + params.tau;
}

double free_spectral_range(double lambda, const RingParams& params) {
  // theta(l) - theta(l + fsr) = 2 pi  =>  K/l - K/(l + fsr) = 2 pi
  const double k = 4.0 * kPi * kPi * params.n_e * params.r;
  const double step = 2.0 * kPi;
  // Solve K fsr = 2 pi l (l + fsr) for fsr.
  return step * lambda * lambda / (k - step * lambda);
}

double nearest_phase_resonance(double lambda, const RingParams& params) {
  const double k = 4.0 * kPi * kPi * params.n_e * params.r;
  const double m = std::round((round_trip_phase(lambda, params)) / (2.0 * kPi));
  return k / (2.0 * kPi * m - params.tau);
}

Matrix2 coupler_block(double t, double phi) {
  const Complex e = std::exp(-2.0 * kI * phi);
  const double s = complement(t);
  Matrix2 m;
  m << e * t, s,
       -e * s, t;
  return m;
}

Matrix2 loss_block(double alpha, double theta) {
  const Complex em = std::exp(-kI * theta);
  const Complex ep = std::exp(kI * theta);
  const double s = complement(alpha);
  Matrix2 m;
  m << em * alpha, ep * s,
       -em * s, ep * alpha;
  return m;
}

Matrix2 ring_backscatter_block(double xi, double zeta) {
  const double s = complement(xi);
  Matrix2 m;
  m << xi, std::exp(kI * zeta) * s,
       -std::exp(-kI * zeta) * s, xi;
  return m;
}

Matrix2 coupler_backscatter_block(double xi, double zeta) {
  const Complex em = std::exp(-0.5 * kI * zeta);
  const Complex ep = std::exp(0.5 * kI * zeta);
  const double s = complement(xi);
  Matrix2 m;
  m << em * xi, ep * s,
       -em * s, ep * xi;
  return m;
}

Matrix2 photon_backscatter_block(double xi, double zeta) {
  const Complex em = std::exp(-0.5 * kI * zeta);
  const double s = complement(xi);
  Matrix2 m;
  m << em * xi, 0.0,
       -em * s, 1.0;
  return m;
}

Matrix6 build_process(ProcessKind kind, const RingParams& params, double theta) {
  params.validate();
  if (!std::isfinite(theta)) {
    throw Error(ErrorKind::InvalidParam, "round-trip phase is not finite");
  }
  Matrix6 u = Matrix6::Identity();
  switch (kind) {
    case ProcessKind::Coupler: {
      const Matrix2 tb = coupler_block(params.t, params.phi);
      embed_pair(u, Mode::BusFwd, Mode::RingFwd, tb);
      embed_pair(u, Mode::BusBwd, Mode::RingBwd, tb);
      break;
    }
    case ProcessKind::Loss: {
      const Matrix2 a = loss_block(params.alpha, theta);
      embed_pair(u, Mode::RingFwd, Mode::LossFwd, a);
      embed_pair(u, Mode::RingBwd, Mode::LossBwd, a);
      break;
    }
    case ProcessKind::BackRing:
      embed_pair(u, Mode::RingFwd, Mode::RingBwd,
                 ring_backscatter_block(params.xi, params.zeta));
      break;
    case ProcessKind::BackCoupler:
    case ProcessKind::BackPhoton: {
      const Matrix2 c = kind == ProcessKind::BackCoupler
                            ? coupler_backscatter_block(params.xi, params.zeta)
                            : photon_backscatter_block(params.xi, params.zeta);
      embed_pair(u, Mode::RingFwd, Mode::RingBwd, c);
      embed_pair(u, Mode::BusFwd, Mode::BusBwd, c);
      embed_pair(u, Mode::LossFwd, Mode::LossBwd, c);
      break;
    }
  }
  return u;
}

namespace {

// Principal square root of the loss process. The process is a direct sum of
// identical 2x2 blocks on the (R->, L->) and (R<-, L<-) pairs plus identity on
// the bus, so its root is the blockwise root.
Matrix6 half_loss(const RingParams& params, double theta) {
  const Matrix2 root = principal_sqrt_unitary(loss_block(params.alpha, theta));
  Matrix6 u = Matrix6::Identity();
  embed_pair(u, Mode::RingFwd, Mode::LossFwd, root);
  embed_pair(u, Mode::RingBwd, Mode::LossBwd, root);
  return u;
}

}  // namespace

Matrix6 compose_at_phase(const RingParams& params, Ordering ordering, double theta,
                         bool photon) {
  const Matrix6 cpl = build_process(ProcessKind::Coupler, params, theta);
  const Matrix6 loss = build_process(ProcessKind::Loss, params, theta);

  if (params.placement == Placement::InRing) {
    const Matrix6 back = build_process(ProcessKind::BackRing, params, theta);
    if (ordering == Ordering::EndOfRing) return cpl * back * loss;
    const Matrix6 loss_half = half_loss(params, theta);
    Matrix6 back_half = Matrix6::Identity();
    embed_pair(back_half, Mode::RingFwd, Mode::RingBwd,
               principal_sqrt_unitary(ring_backscatter_block(params.xi, params.zeta)));
    return loss_half * back_half * cpl * back_half * loss_half;
  }

  const Matrix6 back = build_process(
      photon ? ProcessKind::BackPhoton : ProcessKind::BackCoupler, params, theta);
  if (ordering == Ordering::EndOfRing) return cpl * back * loss;
  const Matrix6 loss_half = half_loss(params, theta);
  return loss_half * cpl * back * loss_half;
}

Matrix6 compose_total(const RingParams& params, Ordering ordering, double lambda) {
  return compose_at_phase(params, ordering, round_trip_phase(lambda, params));
}

}  // namespace splitring
