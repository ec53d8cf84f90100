#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "splitring/analysis.hpp"
#include "splitring/response.hpp"
#include "splitring/ring_model.hpp"
#include "splitring/sfwm.hpp"

namespace splitring::cli {

struct SpectrumSection {
  double lambda_center = 1.55e-6;
  std::size_t points = 2001;
  std::optional<double> lambda_min;  // both or neither; default is one FSR
  std::optional<double> lambda_max;
};

struct HeraldSection {
  double lambda_center = 1.55e-6;
  std::vector<double> t_grid;  // empty: the ring's own t
};

struct SweepSection {
  std::optional<SweepAxis> axis;
  std::vector<double> grid;
  std::vector<Metric> metrics;
  double lambda_center = 1.55e-6;
};

struct OptimizeSection {
  Objective objective = Objective::HeraldRate;
  double t_min = 0.5;
  double t_max = 1.0;
  CouplingSearch search{};
};

struct FitSection {
  std::optional<std::filesystem::path> data;
  std::set<FitParam> free{FitParam::T, FitParam::Alpha, FitParam::Xi, FitParam::Zeta};
  FitOptions options{};
};

struct RunConfig {
  RingParams ring{};
  Ordering ordering = Ordering::MidRing;
  BusInput input{};
  std::optional<SfwmParams> sfwm;
  SpectrumSection spectrum;
  HeraldSection herald;
  SweepSection sweep;
  OptimizeSection optimize;
  FitSection fit;
  std::filesystem::path out_dir = "out";
};

/// Reads and validates a JSON config, applying `key.path=value` overrides
/// first. The fit data path resolves against the config's directory; the
/// output directory against the working directory.
/// Throws Error(Config) with a field or line diagnostic.
RunConfig parse_config(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides = {});

/// Same, from text already in memory; `base_dir` anchors relative paths.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir,
                            const std::vector<std::string>& overrides = {});

}  // namespace splitring::cli
