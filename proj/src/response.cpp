#include "splitring/response.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "splitring/csv.hpp"
#include "splitring/error.hpp"
#include "splitring/parallel.hpp"

namespace splitring {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

SteadyState outputs_from_ring(const Matrix6& u, const Vector2& ring, const Vector2& bus) {
  const Vector2 b2 = block_extract(u, ModePair::Bus, ModePair::Ring) * ring +
                     block_extract(u, ModePair::Bus, ModePair::Bus) * bus;
  const Vector2 l2 = block_extract(u, ModePair::Loss, ModePair::Ring) * ring +
                     block_extract(u, ModePair::Loss, ModePair::Bus) * bus;
  SteadyState s;
  s.b2_fwd = b2(0);
  s.b2_bwd = b2(1);
  s.r_fwd = ring(0);
  s.r_bwd = ring(1);
  s.l_fwd = l2(0);
  s.l_bwd = l2(1);
  s.p_fwd = std::norm(ring(0));
  s.p_bwd = std::norm(ring(1));
  return s;
}

double spectral_radius(const Matrix2& m) {
  const Complex tr = m.trace();
  const Complex det = m.determinant();
  const Complex disc = std::sqrt(tr * tr - 4.0 * det);
  return std::max(std::abs(0.5 * (tr + disc)), std::abs(0.5 * (tr - disc)));
}

}  // namespace

SteadyState solve_steady_state(const Matrix6& u, const BusInput& input) {
  const Vector2 bus = input.vec();
  const Matrix2 u_rr = block_extract(u, ModePair::Ring, ModePair::Ring);
  const Matrix2 u_rb = block_extract(u, ModePair::Ring, ModePair::Bus);
  const Vector2 ring = solve_2x2(Matrix2::Identity() - u_rr, u_rb * bus);
  return outputs_from_ring(u, ring, bus);
}

SteadyState solve_steady_state(const RingParams& params, Ordering ordering,
                               double lambda, const BusInput& input) {
  return solve_steady_state(compose_total(params, ordering, lambda), input);
}

SteadyState solve_steady_state_at_phase(const RingParams& params, Ordering ordering,
                                        double theta, const BusInput& input) {
  return solve_steady_state(compose_at_phase(params, ordering, theta), input);
}

Complex closed_form_transmission_at_phase(const RingParams& params, double theta) {
  params.validate();
  if (params.t == 0.0) {
    throw Error(ErrorKind::InvalidParam, "closed-form transmission needs t > 0");
  }
  const double t = params.t;
  const Complex x = std::exp(Complex(0.0, -theta));
  const Complex k = t * params.alpha * x;
  if (params.placement == Placement::InRing) {
    const double xi = params.xi;
    return 1.0 / t - (1.0 / t + params.alpha * xi * x) * (t * t - 1.0) /
                         (1.0 + 2.0 * k * xi + k * k);
  }
  const Complex xi = std::polar(params.xi, params.zeta);
  return xi / t - (xi - k) * (t - 1.0 / t) / (k * k - k * (xi + std::conj(xi)) + 1.0);
}

Complex closed_form_transmission(const RingParams& params, double lambda) {
  return closed_form_transmission_at_phase(params, round_trip_phase(lambda, params));
}

SteadyState roundtrip_sum_oracle(const Matrix6& u, const BusInput& input, double tol,
                                 std::size_t max_iter) {
  const Vector2 bus = input.vec();
  const Matrix2 u_rr = block_extract(u, ModePair::Ring, ModePair::Ring);
  const Vector2 source = block_extract(u, ModePair::Ring, ModePair::Bus) * bus;
  if (spectral_radius(u_rr) >= 1.0 - 1e-15) {
    throw Error(ErrorKind::NoConvergence,
                "ring round trip has unit spectral radius; circulation never decays");
  }
  Vector2 ring = Vector2::Zero();
  for (std::size_t n = 0; n < max_iter; ++n) {
    const Vector2 next = u_rr * ring + source;
    const double step = (next - ring).norm();
    ring = next;
    if (step <= tol * ring.norm()) return outputs_from_ring(u, ring, bus);
  }
  std::ostringstream os;
  os << "round-trip summation did not converge in " << max_iter << " iterations";
  throw Error(ErrorKind::NoConvergence, os.str());
}

SteadyState roundtrip_sum_oracle(const RingParams& params, Ordering ordering,
                                 double lambda, const BusInput& input, double tol,
                                 std::size_t max_iter) {
  return roundtrip_sum_oracle(compose_total(params, ordering, lambda), input, tol,
                              max_iter);
}

std::vector<SpectrumRow> spectrum_sweep(const RingParams& params, Ordering ordering,
                                        const std::vector<double>& lambda_grid,
                                        const BusInput& input) {
  params.validate();
  if (lambda_grid.empty()) {
    throw Error(ErrorKind::InvalidParam, "wavelength grid is empty");
  }
  for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > lambda_grid[i - 1])) {
      throw Error(ErrorKind::InvalidParam, "wavelength grid must be strictly ascending");
    }
  }

  std::vector<SpectrumRow> rows(lambda_grid.size());
  parallel_for(lambda_grid.size(), [&](std::size_t i) {
    SpectrumRow& row = rows[i];
    row.lambda = lambda_grid[i];
    try {
      const SteadyState s = solve_steady_state(params, ordering, row.lambda, input);
      row.t_fwd = std::norm(s.b2_fwd);
      row.t_bwd = std::norm(s.b2_bwd);
      row.r_fwd_mag = std::abs(s.r_fwd);
      row.r_bwd_mag = std::abs(s.r_bwd);
    } catch (const Error& e) {
      row.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
  });
  return rows;
}

std::vector<double> fsr_grid(const RingParams& params, double lambda_center,
                             std::size_t points) {
  if (points == 0) throw Error(ErrorKind::InvalidParam, "grid needs at least one point");
  const double center = nearest_phase_resonance(lambda_center, params);
  // Cell centres keep the grid symmetric about the resonance and off the
  // anti-resonance, where a lossless loss process has eigenvalue -1.
  const double k = round_trip_phase(center, params) - params.tau;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double frac =
        (static_cast<double>(i) + 0.5) / static_cast<double>(points) - 0.5;
    // Ascending wavelength means descending phase.
    const double phase = k - frac * kTwoPi;
    grid[i] = (k * center) / phase;
  }
  return grid;
}

void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumRow>& rows) {
  os << "lambda_m,T_fwd,T_bwd,R_fwd_mag,R_bwd_mag\n";
  const double nan = std::nan("");
  for (const auto& row : rows) {
    const bool bad = row.error.has_value();
    os << csv::join({csv::format(row.lambda), csv::format(bad ? nan : row.t_fwd),
                     csv::format(bad ? nan : row.t_bwd),
                     csv::format(bad ? nan : row.r_fwd_mag),
                     csv::format(bad ? nan : row.r_bwd_mag)})
       << '\n';
  }
}

}  // namespace splitring
