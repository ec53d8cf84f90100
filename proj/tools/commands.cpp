#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "splitring/csv.hpp"
#include "splitring/parallel.hpp"
#include "splitring/error.hpp"
#include "svg_plot.hpp"

namespace splitring::cli {

namespace {

namespace fs = std::filesystem;

std::ofstream open_artifact(const fs::path& path) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
  return os;
}

void maybe_plot(bool plot, const fs::path& csv) {
  if (plot) write_svg_plot(csv, fs::path(csv).replace_extension(".svg"));
}

std::string g(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

int report_row_error(std::ostream& err, const char* what, double where,
                     const std::string& message) {
  err << "error: numerical: " << message << " (at " << what << "=" << csv::format(where)
      << ")\n";
  return kNumerical;
}

std::vector<double> spectrum_grid(const RunConfig& cfg) {
  const SpectrumSection& s = cfg.spectrum;
  if (!s.lambda_min) return fsr_grid(cfg.ring, s.lambda_center, s.points);
  std::vector<double> grid(s.points);
  for (std::size_t i = 0; i < s.points; ++i) {
    grid[i] = s.points == 1 ? *s.lambda_min
              : i + 1 == s.points
                  ? *s.lambda_max
                  : *s.lambda_min + (*s.lambda_max - *s.lambda_min) * static_cast<double>(i) /
                                        static_cast<double>(s.points - 1);
  }
  return grid;
}

int run_spectrum(const RunConfig& cfg, bool plot, std::ostream& out, std::ostream& err) {
  const auto rows = spectrum_sweep(cfg.ring, cfg.ordering, spectrum_grid(cfg), cfg.input);
  const fs::path path = cfg.out_dir / "spectrum.csv";
  {
    auto os = open_artifact(path);
    write_spectrum_csv(os, rows);
  }
  maybe_plot(plot, path);
  for (const auto& row : rows) {
    if (row.error) return report_row_error(err, "lambda", row.lambda, *row.error);
  }
  const auto min = std::min_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.t_fwd < b.t_fwd;
  });
  out << "spectrum: " << rows.size() << " points, min T_fwd " << g(min->t_fwd)
      << " at lambda " << g(min->lambda) << " m -> " << path.string() << '\n';
  return kSuccess;
}

int run_fields(const RunConfig& cfg, bool plot, std::ostream& out, std::ostream& err) {
  const auto grid = spectrum_grid(cfg);
  const fs::path path = cfg.out_dir / "fields.csv";
  std::optional<std::pair<double, std::string>> failure;
  double peak = 0.0;
  {
    auto os = open_artifact(path);
    os << "lambda_m,b2_fwd_re,b2_fwd_im,b2_bwd_re,b2_bwd_im,r_fwd_re,r_fwd_im,r_bwd_re,"
          "r_bwd_im,l_fwd_re,l_fwd_im,l_bwd_re,l_bwd_im,p_fwd,p_bwd\n";
    std::vector<std::optional<SteadyState>> states(grid.size());
    std::vector<std::string> errors(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      try {
        states[i] = solve_steady_state(cfg.ring, cfg.ordering, grid[i], cfg.input);
      } catch (const Error& e) {
        errors[i] = std::string(to_string(e.kind())) + ": " + e.what();
      }
    });
    const double nan = std::nan("");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<std::string> cells{csv::format(grid[i])};
      if (states[i]) {
        const SteadyState& s = *states[i];
        for (Complex c : {s.b2_fwd, s.b2_bwd, s.r_fwd, s.r_bwd, s.l_fwd, s.l_bwd}) {
          cells.push_back(csv::format(c.real()));
          cells.push_back(csv::format(c.imag()));
        }
        cells.push_back(csv::format(s.p_fwd));
        cells.push_back(csv::format(s.p_bwd));
        peak = std::max(peak, s.p_fwd + s.p_bwd);
      } else {
        cells.insert(cells.end(), 14, csv::format(nan));
        if (!failure) failure.emplace(grid[i], errors[i]);
      }
      os << csv::join(cells) << '\n';
    }
  }
  maybe_plot(plot, path);
  if (failure) return report_row_error(err, "lambda", failure->first, failure->second);
  out << "fields: " << grid.size() << " points, peak ring power " << g(peak) << " -> "
      << path.string() << '\n';
  return kSuccess;
}

int run_herald(const RunConfig& cfg, bool plot, std::ostream& out, std::ostream& err) {
  std::vector<double> t_grid = cfg.herald.t_grid;
  if (t_grid.empty()) t_grid.push_back(cfg.ring.t);
  const auto rows = rate_vs_efficiency_curve(cfg.ring, t_grid, cfg.sfwm, cfg.herald.lambda_center);
  const fs::path path = cfg.out_dir / "herald.csv";
  {
    auto os = open_artifact(path);
    write_curve_csv(os, rows);
  }
  maybe_plot(plot, path);
  for (const auto& row : rows) {
    if (row.error) return report_row_error(err, "t", row.t, *row.error);
  }
  const auto best = std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.j_herald_reduced < b.j_herald_reduced;
  });
  out << "herald: peak J_Herald/beta^2 " << g(best->j_herald_reduced) << " at t " << g(best->t)
      << " (eta " << g(best->eta) << ", J_HM/beta^2 " << g(best->j_hm_reduced) << ")";
  if (cfg.sfwm) out << ", beta " << g(beta_coefficient(*cfg.sfwm, cfg.ring.r));
  out << " -> " << path.string() << '\n';
  return kSuccess;
}

int run_sweep(const RunConfig& cfg, bool plot, std::ostream& out, std::ostream& err) {
  if (!cfg.sweep.axis) throw Error(ErrorKind::Config, "sweep.axis: required for sweep");
  if (cfg.sweep.grid.empty()) throw Error(ErrorKind::Config, "sweep.grid: required for sweep");
  SweepOptions options;
  options.lambda_center = cfg.sweep.lambda_center;
  options.ordering = cfg.ordering;
  const auto rows =
      sweep_engine(cfg.ring, *cfg.sweep.axis, cfg.sweep.grid, cfg.sweep.metrics, options);
  const fs::path path = cfg.out_dir / "sweep.csv";
  {
    auto os = open_artifact(path);
    write_sweep_csv(os, *cfg.sweep.axis, cfg.sweep.metrics, rows);
  }
  maybe_plot(plot, path);
  for (const auto& row : rows) {
    if (row.error) {
      return report_row_error(err, std::string(to_string(*cfg.sweep.axis)).c_str(), row.value,
                              *row.error);
    }
  }
  out << "sweep: " << rows.size() << " values of " << to_string(*cfg.sweep.axis) << ", "
      << cfg.sweep.metrics.size() << " metrics -> " << path.string() << '\n';
  return kSuccess;
}

int run_optimize(const RunConfig& cfg, std::ostream& out) {
  const OptimizeSection& o = cfg.optimize;
  const CouplingOptimum best =
      optimize_coupling(cfg.ring, o.objective, {o.t_min, o.t_max}, o.search);
  const fs::path path = cfg.out_dir / "optimize.txt";
  {
    auto os = open_artifact(path);
    os << "objective = " << to_string(o.objective) << '\n'
       << "t = " << csv::format(best.t) << '\n'
       << "value = " << csv::format(best.value) << '\n'
       << "lambda = " << csv::format(best.lambda) << '\n';
  }
  out << "optimize: objective " << to_string(o.objective) << ", t* " << g(best.t) << ", value "
      << g(best.value) << ", lambda " << g(best.lambda) << " m -> " << path.string() << '\n';
  return kSuccess;
}

int run_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.fit.data) throw Error(ErrorKind::Config, "fit.data: required for fit");
  std::ifstream in(*cfg.fit.data);
  if (!in) {
    throw Error(ErrorKind::Config, "cannot open fit data '" + cfg.fit.data->string() + "'");
  }
  const MeasuredSpectrum data = read_spectrum_csv(in);
  try {
    data.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, cfg.fit.data->string() + ": " + e.what());
  }
  const FitResult fit = fit_spectrum(data, cfg.ring, cfg.fit.free, cfg.fit.options);
  const fs::path path = cfg.out_dir / "fit.txt";
  {
    auto os = open_artifact(path);
    write_fit_result(os, fit);
  }
  out << "fit: residual " << g(fit.residual) << ", t " << g(fit.params.t) << ", alpha "
      << g(fit.params.alpha) << ", xi " << g(fit.params.xi) << ", zeta " << g(fit.params.zeta)
      << ", iterations " << fit.iterations << (fit.converged ? "" : " (not converged)")
      << " -> " << path.string() << '\n';
  if (!fit.converged) {
    err << "error: fit-not-converged: simplex stopped after " << fit.iterations
        << " iterations; best-so-far written to " << path.string() << '\n';
    return kFitNotConverged;
  }
  return kSuccess;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParam:
    case ErrorKind::Config: return kConfigError;
    case ErrorKind::NotConverged: return kFitNotConverged;
    default: return kNumerical;
  }
}

int execute(std::string_view command, const RunConfig& cfg, bool plot, std::ostream& out,
            std::ostream& err) {
  if (command == "spectrum") return run_spectrum(cfg, plot, out, err);
  if (command == "fields") return run_fields(cfg, plot, out, err);
  if (command == "herald") return run_herald(cfg, plot, out, err);
  if (command == "sweep") return run_sweep(cfg, plot, out, err);
  if (command == "optimize") return run_optimize(cfg, out);
  if (command == "fit") return run_fit(cfg, out, err);
  err << "error: usage: unknown command '" << command << "'\n";
  return kUsage;
}

}  // namespace splitring::cli
