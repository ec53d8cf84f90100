#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "splitring/linalg.hpp"
#include "splitring/ring_model.hpp"

namespace splitring {

/// Bus-waveguide input amplitudes. The default is unit forward input.
struct BusInput {
  Complex fwd{1.0, 0.0};
  Complex bwd{0.0, 0.0};

  Vector2 vec() const { return Vector2(fwd, bwd); }
  double power() const { return std::norm(fwd) + std::norm(bwd); }
};

/// Solved fields at one wavelength. Ring fields are end-of-ring or ring
/// average depending on the ordering used; p_* are |ring field|^2.
struct SteadyState {
  Complex b2_fwd, b2_bwd;
  Complex r_fwd, r_bwd;
  Complex l_fwd, l_bwd;
  double p_fwd = 0.0;
  double p_bwd = 0.0;

  double output_power() const {
    return std::norm(b2_fwd) + std::norm(b2_bwd) + std::norm(l_fwd) + std::norm(l_bwd);
  }
};

/// Steady state of an already composed interaction matrix: the ring field is
/// the fixed point R = U_RR R + U_RB B1.
SteadyState solve_steady_state(const Matrix6& u, const BusInput& input = {});

SteadyState solve_steady_state(const RingParams& params, Ordering ordering,
                               double lambda, const BusInput& input = {});

SteadyState solve_steady_state_at_phase(const RingParams& params, Ordering ordering,
                                        double theta, const BusInput& input = {});

/// Printed closed-form forward transmission for unit forward input: the
/// in-ring expression for Placement::InRing and the in-coupler expression
/// otherwise. The coupler phase does not appear in these expressions. Kept
/// as a cross-check only; the matrix fixed point is authoritative.
Complex closed_form_transmission(const RingParams& params, double lambda);
Complex closed_form_transmission_at_phase(const RingParams& params, double theta);

/// Sums ring circulations R_{n+1} = U_RR R_n + U_RB B1 from R_0 = 0 until the
/// relative step falls below `tol`. Throws NoConvergence after `max_iter`.
SteadyState roundtrip_sum_oracle(const RingParams& params, Ordering ordering,
                                 double lambda, const BusInput& input, double tol,
                                 std::size_t max_iter = 1'000'000);
SteadyState roundtrip_sum_oracle(const Matrix6& u, const BusInput& input, double tol,
                                 std::size_t max_iter = 1'000'000);

struct SpectrumRow {
  double lambda = 0.0;
  double t_fwd = 0.0;  // |B2->|^2
  double t_bwd = 0.0;  // |B2<-|^2
  double r_fwd_mag = 0.0;
  double r_bwd_mag = 0.0;
  std::optional<std::string> error;  // set when the solve failed at this point
};

/// One row per wavelength; failures are recorded per row. Evaluated across
/// the configured worker count, results independent of scheduling.
std::vector<SpectrumRow> spectrum_sweep(const RingParams& params, Ordering ordering,
                                        const std::vector<double>& lambda_grid,
                                        const BusInput& input = {});

/// `points` wavelengths at the cell centres of one free spectral range,
/// evenly spaced in phase and centred on the phase resonance nearest
/// `lambda_center` (odd `points` samples the resonance itself).
std::vector<double> fsr_grid(const RingParams& params, double lambda_center,
                             std::size_t points = 2001);

void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumRow>& rows);

}  // namespace splitring
