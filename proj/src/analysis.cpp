#include "splitring/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "splitring/csv.hpp"
#include "splitring/error.hpp"
#include "splitring/parallel.hpp"
#include "splitring/response.hpp"

namespace splitring {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double forward_transmission(const RingParams& p, Ordering ordering, double lambda) {
  return std::norm(solve_steady_state(p, ordering, lambda).b2_fwd);
}

std::string describe(const Error& e) {
  return std::string(to_string(e.kind())) + ": " + e.what();
}

}  // namespace

// ---------------------------------------------------------------------------
// Resonances

std::pair<double, double> fsr_window(const RingParams& params, double lambda_center) {
  params.validate();
  const double center = nearest_phase_resonance(lambda_center, params);
  const double k = 4.0 * kPi * kPi * params.n_e * params.r;
  const double theta0 = round_trip_phase(center, params) - params.tau;
  // Half a cycle either side of the resonance phase.
  return {k / (theta0 + kPi), k / (theta0 - kPi)};
}

std::vector<ResonanceInfo> find_resonances(const RingParams& params,
                                           std::pair<double, double> lambda_window,
                                           const ResonanceSearch& search) {
  params.validate();
  const auto [lo, hi] = lambda_window;
  if (!(lo > 0.0 && hi > lo && std::isfinite(hi))) {
    throw Error(ErrorKind::InvalidParam, "wavelength window must satisfy 0 < lo < hi");
  }
  const std::size_t n = std::max<std::size_t>(search.grid_points, 3);
  const double step = (hi - lo) / static_cast<double>(n - 1);

  auto transmission = [&](double lambda) {
    try {
      return forward_transmission(params, search.ordering, lambda);
    } catch (const Error&) {
      return kNaN;
    }
  };

  std::vector<double> lambdas(n);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    lambdas[i] = i + 1 == n ? hi : lo + step * static_cast<double>(i);
  }
  parallel_for(n, [&](std::size_t i) { values[i] = transmission(lambdas[i]); });

  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -vmin;
  for (double v : values) {
    if (std::isnan(v)) continue;
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (!(vmax - vmin >= 1e-6)) {
    throw Error(ErrorKind::NoResonanceFound,
                "transmission varies by less than 1e-6 over the window");
  }

  struct Minimum {
    double lambda;
    double depth;
  };
  std::vector<std::size_t> candidates;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (std::isnan(values[i]) || std::isnan(values[i - 1]) || std::isnan(values[i + 1])) {
      continue;
    }
    if (values[i] < values[i - 1] && values[i] <= values[i + 1]) candidates.push_back(i);
  }
  std::vector<Minimum> minima(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t k) {
    const std::size_t i = candidates[k];
    const ScalarOptimum opt = golden_section_max(
        [&](double l) {
          const double v = transmission(l);
          return std::isnan(v) ? -std::numeric_limits<double>::infinity() : -v;
        },
        lambdas[i - 1], lambdas[i + 1], search.refine_tol);
    minima[k] = -opt.value <= values[i] ? Minimum{opt.x, -opt.value}
                                        : Minimum{lambdas[i], values[i]};
  });
  std::sort(minima.begin(), minima.end(),
            [](const Minimum& a, const Minimum& b) { return a.lambda < b.lambda; });

  const double radius = 0.25 * free_spectral_range(0.5 * (lo + hi), params);
  std::vector<ResonanceInfo> out;
  std::size_t i = 0;
  while (i < minima.size()) {
    std::size_t j = i + 1;
    while (j < minima.size() && minima[j].lambda - minima[j - 1].lambda < radius) ++j;
    std::vector<Minimum> group(minima.begin() + static_cast<std::ptrdiff_t>(i),
                               minima.begin() + static_cast<std::ptrdiff_t>(j));
    if (group.size() > 2) {
      // Keep the two deepest dips.
      std::stable_sort(group.begin(), group.end(),
                       [](const Minimum& a, const Minimum& b) { return a.depth < b.depth; });
      group.resize(2);
      if (group[1].lambda < group[0].lambda) std::swap(group[0], group[1]);
    }
    ResonanceInfo info;
    for (const auto& m : group) {
      info.minima_lambdas.push_back(m.lambda);
      info.depth_fwd.push_back(m.depth);
    }
    if (group.size() == 2) {
      info.center_lambda = 0.5 * (group[0].lambda + group[1].lambda);
      info.splitting = group[1].lambda - group[0].lambda;
      const double sum = group[0].depth + group[1].depth;
      info.asymmetry = sum > 0.0 ? std::abs(group[0].depth - group[1].depth) / sum : 0.0;
    } else {
      info.center_lambda = group[0].lambda;
    }
    out.push_back(std::move(info));
    i = j;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coupling design

double coupling_objective(const RingParams& params_template, Objective objective, double t,
                          const CouplingSearch& search) {
  RingParams p = params_template;
  p.t = t;
  const OperatingPoint op = resonance_operating_point(
      p, std::nullopt, search.lambda_center, BusInput{}, search.scan_points, objective);
  switch (objective) {
    case Objective::HeraldRate: return op.report.j_herald;
    case Objective::HeraldMode: return op.report.j_hm;
    case Objective::Efficiency: return op.report.eta;
  }
  return kNaN;
}

CouplingOptimum optimize_coupling(const RingParams& params_template, Objective objective,
                                  std::pair<double, double> t_range,
                                  const CouplingSearch& search) {
  const auto [lo, hi] = t_range;
  if (!(lo > 0.0 && lo < hi && hi <= 1.0)) {
    throw Error(ErrorKind::InvalidParam, "t range must satisfy 0 < lo < hi <= 1");
  }
  const std::size_t n = std::max<std::size_t>(search.coarse_points, 3);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  std::vector<double> ts(n);
  std::vector<double> values(n, kNaN);
  std::vector<std::string> errors(n);
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = i + 1 == n ? hi : lo + step * static_cast<double>(i);
  }
  parallel_for(n, [&](std::size_t i) {
    try {
      values[i] = coupling_objective(params_template, objective, ts[i], search);
    } catch (const Error& e) {
      errors[i] = describe(e);
    }
  });

  double vmax = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (!std::isnan(v)) vmax = std::max(vmax, v);
  }
  if (!std::isfinite(vmax)) {
    throw Error(ErrorKind::SingularSystem,
                "objective failed at every coupling on the grid (first: " + errors[0] + ")");
  }
  const double tie = 1e-12 * std::abs(vmax);
  std::size_t best = 0;
  while (std::isnan(values[best]) || values[best] < vmax - tie) ++best;

  auto f = [&](double t) {
    try {
      return coupling_objective(params_template, objective, t, search);
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  const double a = best == 0 ? lo : ts[best - 1];
  const double b = best + 1 == n ? hi : ts[best + 1];
  const ScalarOptimum opt = golden_section_max(f, a, b, search.t_tol);

  CouplingOptimum result{ts[best], values[best], 0.0};
  if (opt.value > values[best] + tie) result = {opt.x, opt.value, 0.0};
  RingParams p = params_template;
  p.t = result.t;
  result.lambda = resonance_operating_point(p, std::nullopt, search.lambda_center,
                                            BusInput{}, search.scan_points, objective)
                      .lambda;
  return result;
}

// ---------------------------------------------------------------------------
// Fitting

void MeasuredSpectrum::validate(std::size_t min_rows) const {
  if (lambda.size() != power.size()) {
    throw Error(ErrorKind::InvalidParam, "spectrum columns differ in length");
  }
  if (lambda.size() < min_rows) {
    std::ostringstream os;
    os << "spectrum has " << lambda.size() << " rows, at least " << min_rows << " needed";
    throw Error(ErrorKind::InvalidParam, os.str());
  }
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!std::isfinite(lambda[i]) || !std::isfinite(power[i]) || !(lambda[i] > 0.0)) {
      std::ostringstream os;
      os << "spectrum row " << i + 1 << " is not a finite positive wavelength/power pair";
      throw Error(ErrorKind::InvalidParam, os.str());
    }
    if (i > 0 && !(lambda[i] > lambda[i - 1])) {
      std::ostringstream os;
      os << "spectrum wavelengths not strictly ascending at row " << i + 1;
      throw Error(ErrorKind::InvalidParam, os.str());
    }
  }
}

MeasuredSpectrum read_spectrum_csv(std::istream& is) {
  MeasuredSpectrum out;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw Error(ErrorKind::Config,
                  "line " + std::to_string(line_no) + ": expected two comma-separated columns");
    }
    const std::string a = trim(line.substr(0, comma));
    const std::string b = trim(line.substr(comma + 1));
    if (!header) {
      if (a != "lambda_m" || b != "power") {
        throw Error(ErrorKind::Config, "line " + std::to_string(line_no) +
                                           ": header must be lambda_m,power");
      }
      header = true;
      continue;
    }
    try {
      std::size_t pa = 0;
      std::size_t pb = 0;
      const double l = std::stod(a, &pa);
      const double p = std::stod(b, &pb);
      if (pa != a.size() || pb != b.size()) throw std::invalid_argument("trailing text");
      out.lambda.push_back(l);
      out.power.push_back(p);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config,
                  "line " + std::to_string(line_no) + ": malformed number");
    }
  }
  if (!header) throw Error(ErrorKind::Config, "missing header lambda_m,power");
  return out;
}

std::string_view to_string(FitParam p) {
  switch (p) {
    case FitParam::T: return "t";
    case FitParam::Alpha: return "alpha";
    case FitParam::Xi: return "xi";
    case FitParam::Zeta: return "zeta";
    case FitParam::NE: return "n_e";
    case FitParam::Tau: return "tau";
  }
  return "?";
}

std::optional<FitParam> fit_param_from_string(std::string_view name) {
  for (FitParam p : {FitParam::T, FitParam::Alpha, FitParam::Xi, FitParam::Zeta,
                     FitParam::NE, FitParam::Tau}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

namespace {

double& field(RingParams& p, FitParam f) {
  switch (f) {
    case FitParam::T: return p.t;
    case FitParam::Alpha: return p.alpha;
    case FitParam::Xi: return p.xi;
    case FitParam::Zeta: return p.zeta;
    case FitParam::NE: return p.n_e;
    case FitParam::Tau: return p.tau;
  }
  return p.t;
}

// Search box around the initial value and multi-start spread per parameter.
// Resonance features are narrow, so the boxes are local.
struct Range {
  double lo, hi, spread;
};

Range range_for(FitParam f, double initial) {
  switch (f) {
    case FitParam::T:
    case FitParam::Alpha:
    case FitParam::Xi:
      return {std::max(0.0, initial - 0.05), std::min(1.0, initial + 0.05), 0.005};
    case FitParam::Zeta: return {initial - kPi, initial + kPi, 0.1};
    case FitParam::NE: return {initial * (1 - 1e-4), initial * (1 + 1e-4), 1e-6 * initial};
    case FitParam::Tau: return {initial - kPi / 4, initial + kPi / 4, 0.05};
  }
  return {0.0, 1.0, 0.0};
}

}  // namespace

FitResult fit_spectrum(const MeasuredSpectrum& data, const RingParams& initial,
                       const std::set<FitParam>& free, const FitOptions& options) {
  data.validate();
  initial.validate();
  if (free.empty()) throw Error(ErrorKind::InvalidParam, "no free fit parameters");

  const double pmax = *std::max_element(data.power.begin(), data.power.end());
  const double pmin = *std::min_element(data.power.begin(), data.power.end());
  if (!(pmax > 0.0) || (pmax - pmin) / pmax < 1e-6) {
    throw Error(ErrorKind::NoResonanceFound, "measured spectrum is flat");
  }
  std::vector<double> target(data.power.size());
  for (std::size_t i = 0; i < target.size(); ++i) target[i] = data.power[i] / pmax;

  const std::vector<FitParam> names(free.begin(), free.end());
  const std::size_t dim = names.size();
  std::vector<double> lower(dim), upper(dim), spread(dim), x0(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    RingParams copy = initial;
    x0[k] = field(copy, names[k]);
    const Range r = range_for(names[k], x0[k]);
    lower[k] = r.lo;
    upper[k] = r.hi;
    spread[k] = r.spread;
  }

  auto to_params = [&](const std::vector<double>& x) {
    RingParams p = initial;
    for (std::size_t k = 0; k < dim; ++k) field(p, names[k]) = x[k];
    return p;
  };
  auto objective = [&](const std::vector<double>& x) {
    const RingParams p = to_params(x);
    std::vector<double> model(target.size());
    try {
      for (std::size_t i = 0; i < target.size(); ++i) {
        model[i] = forward_transmission(p, options.ordering, data.lambda[i]);
      }
    } catch (const Error&) {
      return std::numeric_limits<double>::max();
    }
    // The model is normalised the same way as the data.
    const double peak = *std::max_element(model.begin(), model.end());
    if (!(peak > 0.0)) return std::numeric_limits<double>::max();
    double sum = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
      const double d = model[i] / peak - target[i];
      sum += d * d;
    }
    return sum;
  };

  SimplexOptions simplex = options.simplex;
  simplex.absolute_tol = std::max(simplex.absolute_tol, static_cast<double>(target.size()) *
                                                            options.residual_floor *
                                                            options.residual_floor);
  const std::size_t starts = std::max<std::size_t>(options.starts, 1);
  std::vector<SimplexResult> results(starts);
  parallel_for(starts, [&](std::size_t s) {
    std::vector<double> x = x0;
    if (s > 0) {
      // Fixed sign pattern per start and coordinate, magnitudes 1/3 .. 1.
      for (std::size_t k = 0; k < dim; ++k) {
        const double sign = ((s >> (k % 3)) & 1U) != 0 ? 1.0 : -1.0;
        const double mag = static_cast<double>(1 + (s + k) % 3) / 3.0;
        x[k] = std::clamp(x[k] + sign * mag * spread[k], lower[k], upper[k]);
      }
    }
    results[s] = nelder_mead(objective, x, lower, upper, simplex);
  });

  std::size_t best = 0;
  for (std::size_t s = 1; s < starts; ++s) {
    if (results[s].value < results[best].value) best = s;
  }
  FitResult fit;
  fit.params = to_params(results[best].x);
  fit.residual = std::sqrt(results[best].value / static_cast<double>(target.size()));
  fit.iterations = results[best].iterations;
  fit.converged = results[best].converged;
  fit.best_start = best;
  return fit;
}

void write_fit_result(std::ostream& os, const FitResult& fit) {
  const RingParams& p = fit.params;
  os << "converged = " << (fit.converged ? "true" : "false") << '\n'
     << "residual = " << csv::format(fit.residual) << '\n'
     << "iterations = " << fit.iterations << '\n'
     << "best_start = " << fit.best_start << '\n'
     << "t = " << csv::format(p.t) << '\n'
     << "phi = " << csv::format(p.phi) << '\n'
     << "alpha = " << csv::format(p.alpha) << '\n'
     << "xi = " << csv::format(p.xi) << '\n'
     << "zeta = " << csv::format(p.zeta) << '\n'
     << "tau = " << csv::format(p.tau) << '\n'
     << "n_e = " << csv::format(p.n_e) << '\n'
     << "r = " << csv::format(p.r) << '\n'
     << "placement = " << to_string(p.placement) << '\n';
}

// ---------------------------------------------------------------------------
// Sweeps

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::T: return "t";
    case SweepAxis::Alpha: return "alpha";
    case SweepAxis::Xi: return "xi";
    case SweepAxis::Zeta: return "zeta";
    case SweepAxis::Lambda: return "lambda";
  }
  return "?";
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Transmission: return "transmission";
    case Metric::Eta: return "eta";
    case Metric::JHeraldReduced: return "j_herald_reduced";
    case Metric::JHmReduced: return "j_hm_reduced";
    case Metric::MParam: return "m_param";
    case Metric::Splitting: return "splitting";
  }
  return "?";
}

std::optional<SweepAxis> sweep_axis_from_string(std::string_view name) {
  for (SweepAxis a : {SweepAxis::T, SweepAxis::Alpha, SweepAxis::Xi, SweepAxis::Zeta,
                      SweepAxis::Lambda}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

std::optional<Metric> metric_from_string(std::string_view name) {
  for (Metric m : {Metric::Transmission, Metric::Eta, Metric::JHeraldReduced,
                   Metric::JHmReduced, Metric::MParam, Metric::Splitting}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

namespace {

double splitting_near(const RingParams& p, double lambda_center) {
  const auto window = fsr_window(p, lambda_center);
  const auto found = find_resonances(p, window);
  const ResonanceInfo* nearest = &found.front();
  for (const auto& r : found) {
    if (std::abs(r.center_lambda - lambda_center) <
        std::abs(nearest->center_lambda - lambda_center)) {
      nearest = &r;
    }
  }
  return nearest->splitting;
}

}  // namespace

std::vector<SweepRow> sweep_engine(const RingParams& params_template, SweepAxis axis,
                                   const std::vector<double>& grid,
                                   const std::vector<Metric>& metrics,
                                   const SweepOptions& options) {
  std::vector<SweepRow> rows(grid.size());
  const bool needs_point =
      std::any_of(metrics.begin(), metrics.end(), [](Metric m) { return m != Metric::Splitting; });

  parallel_for(grid.size(), [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.value = grid[i];
    if (metrics.empty()) return;
    try {
      RingParams p = params_template;
      double lambda = options.lambda_center;
      switch (axis) {
        case SweepAxis::T: p.t = grid[i]; break;
        case SweepAxis::Alpha: p.alpha = grid[i]; break;
        case SweepAxis::Xi: p.xi = grid[i]; break;
        case SweepAxis::Zeta: p.zeta = grid[i]; break;
        case SweepAxis::Lambda: lambda = grid[i]; break;
      }
      p.validate();

      HeraldingReport report;
      if (needs_point) {
        if (axis == SweepAxis::Lambda) {
          report = heralding_report(p, std::nullopt, lambda);
        } else {
          const OperatingPoint op = resonance_operating_point(p, std::nullopt, lambda);
          lambda = op.lambda;
          report = op.report;
        }
      }
      const double b2 = report.beta * report.beta;
      for (Metric m : metrics) {
        double v = kNaN;
        switch (m) {
          case Metric::Transmission:
            v = forward_transmission(p, options.ordering, lambda);
            break;
          case Metric::Eta: v = report.eta; break;
          case Metric::JHeraldReduced: v = report.j_herald / b2; break;
          case Metric::JHmReduced: v = report.j_hm / b2; break;
          case Metric::MParam: v = report.m_param; break;
          case Metric::Splitting: v = splitting_near(p, options.lambda_center); break;
        }
        row.metrics.emplace_back(m, v);
      }
    } catch (const Error& e) {
      row.metrics.clear();
      row.error = describe(e);
    }
  });
  return rows;
}

void write_sweep_csv(std::ostream& os, SweepAxis axis, const std::vector<Metric>& metrics,
                     const std::vector<SweepRow>& rows) {
  std::vector<std::string> header{std::string(to_string(axis))};
  for (Metric m : metrics) header.emplace_back(to_string(m));
  os << csv::join(header) << '\n';
  for (const auto& row : rows) {
    std::vector<std::string> cells{csv::format(row.value)};
    for (std::size_t k = 0; k < metrics.size(); ++k) {
      cells.push_back(csv::format(row.error ? kNaN : row.metrics[k].second));
    }
    os << csv::join(cells) << '\n';
  }
}

}  // namespace splitring
