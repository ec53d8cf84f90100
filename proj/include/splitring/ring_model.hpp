#pragma once

#include <string_view>

#include "splitring/linalg.hpp"

namespace splitring {

/// Where the backscatter process sits in the scattering chain.
enum class Placement { InRing, InCoupler };

/// Where the ring field is sampled. EndOfRing composes coupler, backscatter
/// and loss in sequence; MidRing splits the ring propagation in half so that
/// the solved ring field is the half-way (average) field.
enum class Ordering { EndOfRing, MidRing };

enum class ProcessKind { Coupler, Loss, BackRing, BackCoupler, BackPhoton };

struct RingParams {
  double t = 0.98;      // bus-ring coupling magnitude (1 = uncoupled)
  double phi = 0.0;     // coupling phase, rad
  double alpha = 0.98;  // round-trip loss coefficient (1 = lossless)
  double xi = 1.0;      // backscatter magnitude (1 = none)
  double zeta = 0.0;    // backscatter phase, rad
  double tau = 0.0;     // loss-induced phase offset, rad
  double n_e = 2.4;     // effective index
  double r = 15e-6;     // ring radius, m
  Placement placement = Placement::InCoupler;

  /// Throws InvalidParam naming the offending field.
  void validate() const;
};

std::string_view to_string(Placement p);
std::string_view to_string(Ordering o);

/// Phase accrued over one trip around the ring.
double round_trip_phase(double lambda, const RingParams& params);

/// Wavelength spacing between adjacent resonances near `lambda`, from the
/// exact 2*pi step of the round-trip phase.
double free_spectral_range(double lambda, const RingParams& params);

/// Wavelength nearest `lambda` at which the round-trip phase is a multiple
/// of 2*pi.
double nearest_phase_resonance(double lambda, const RingParams& params);

// Two-mode sub-matrices.
Matrix2 coupler_block(double t, double phi);
Matrix2 loss_block(double alpha, double theta);
Matrix2 ring_backscatter_block(double xi, double zeta);
Matrix2 coupler_backscatter_block(double xi, double zeta);
/// Coupler backscatter seen by a generated photon: light scattered from the
/// backward into the forward mode no longer belongs to the pair, so that
/// path is removed. Not unitary.
Matrix2 photon_backscatter_block(double xi, double zeta);

Matrix6 build_process(ProcessKind kind, const RingParams& params, double theta);

/// Total interaction matrix at a given round-trip phase. With `photon` set
/// the in-coupler backscatter uses the photon-survival variant.
Matrix6 compose_at_phase(const RingParams& params, Ordering ordering, double theta,
                         bool photon = false);

Matrix6 compose_total(const RingParams& params, Ordering ordering, double lambda);

}  // namespace splitring
