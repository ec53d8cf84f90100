#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "splitring/error.hpp"

namespace splitring::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& detail) { throw Error(ErrorKind::Config, detail); }

// Rejects keys outside `allowed` under `where`.
void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail(where + "." + key + ": unknown key");
  }
}

double number(const json& obj, const std::string& where, const std::string& key,
              double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where + "." + key + ": not finite");
  return d;
}

double bounded(const json& obj, const std::string& where, const std::string& key,
               double fallback, double lo, double hi) {
  const double v = number(obj, where, key, fallback);
  if (v < lo || v > hi) {
    std::ostringstream os;
    os << where << "." << key << ": " << v << " outside [" << lo << ", " << hi << "]";
    fail(os.str());
  }
  return v;
}

double positive(const json& obj, const std::string& where, const std::string& key,
                double fallback) {
  const double v = number(obj, where, key, fallback);
  if (!(v > 0.0)) fail(where + "." + key + ": must be positive");
  return v;
}

std::size_t count(const json& obj, const std::string& where, const std::string& key,
                  std::size_t fallback, std::size_t min) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min)) {
    fail(where + "." + key + ": expected an integer >= " + std::to_string(min));
  }
  return v.get<std::size_t>();
}

std::string text(const json& obj, const std::string& where, const std::string& key,
                 const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

Complex amplitude(const json& obj, const std::string& where, const std::string& key,
                  Complex fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  fail(where + "." + key + ": expected a number or [re, im]");
}

// A list of numbers or {"start", "stop", "points"}.
std::vector<double> grid(const json& v, const std::string& where) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) fail(where + ": grid entries must be numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  check_keys(v, where, {"start", "stop", "points"});
  for (const char* k : {"start", "stop", "points"}) {
    if (!v.contains(k)) fail(where + "." + k + ": required");
  }
  const double a = number(v, where, "start", 0.0);
  const double b = number(v, where, "stop", 0.0);
  const std::size_t n = count(v, where, "points", 0, 1);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(n == 1 ? a
                  : i + 1 == n
                      ? b
                      : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return out;
}

Ordering ordering_from(const std::string& s, const std::string& where) {
  if (s == "mid-ring") return Ordering::MidRing;
  if (s == "end-of-ring") return Ordering::EndOfRing;
  fail(where + ": expected mid-ring or end-of-ring, got '" + s + "'");
}

void apply_override(json& root, const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0) fail("--set " + item + ": expected key=value");
  const std::string path = item.substr(0, eq);
  const std::string raw = item.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) fail("--set " + item + ": empty key segment");
    if (!node->is_object()) fail("--set " + item + ": '" + key + "' is not inside an object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

std::string position(const std::string& src, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < src.size(); ++i) {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

RunConfig build(const json& root, const std::filesystem::path& base_dir) {
  check_keys(root, "config",
             {"description", "ring", "model", "input", "sfwm", "spectrum", "herald", "sweep",
              "optimize", "fit", "output"});
  RunConfig cfg;
  const json empty = json::object();
  auto section = [&](const char* name) -> const json& {
    return root.contains(name) ? root.at(name) : empty;
  };

  {
    const json& r = section("ring");
    check_keys(r, "ring", {"t", "phi", "alpha", "xi", "zeta", "tau", "n_e", "r", "placement"});
    RingParams& p = cfg.ring;
    p.t = bounded(r, "ring", "t", p.t, 0.0, 1.0);
    p.alpha = bounded(r, "ring", "alpha", p.alpha, 0.0, 1.0);
    p.xi = bounded(r, "ring", "xi", p.xi, 0.0, 1.0);
    p.phi = number(r, "ring", "phi", p.phi);
    p.zeta = number(r, "ring", "zeta", p.zeta);
    p.tau = number(r, "ring", "tau", 0.0);
    p.n_e = positive(r, "ring", "n_e", p.n_e);
    p.r = positive(r, "ring", "r", p.r);
    const std::string placement = text(r, "ring", "placement", "in-coupler");
    if (placement == "in-coupler") {
      p.placement = Placement::InCoupler;
    } else if (placement == "in-ring") {
      p.placement = Placement::InRing;
    } else {
      fail("ring.placement: expected in-ring or in-coupler, got '" + placement + "'");
    }
  }
  {
    const json& m = section("model");
    check_keys(m, "model", {"ordering"});
    cfg.ordering = ordering_from(text(m, "model", "ordering", "mid-ring"), "model.ordering");
  }
  {
    const json& in = section("input");
    check_keys(in, "input", {"fwd", "bwd"});
    cfg.input.fwd = amplitude(in, "input", "fwd", {1.0, 0.0});
    cfg.input.bwd = amplitude(in, "input", "bwd", {0.0, 0.0});
  }
  if (root.contains("sfwm")) {
    const json& s = root.at("sfwm");
    check_keys(s, "sfwm", {"chi3", "a_eff", "n_p", "lambda_p"});
    SfwmParams sp;
    sp.chi3 = number(s, "sfwm", "chi3", sp.chi3);
    if (sp.chi3 < 0.0) fail("sfwm.chi3: must be non-negative");
    sp.a_eff = positive(s, "sfwm", "a_eff", sp.a_eff);
    sp.n_p = positive(s, "sfwm", "n_p", sp.n_p);
    sp.lambda_p = positive(s, "sfwm", "lambda_p", sp.lambda_p);
    cfg.sfwm = sp;
  }
  {
    const json& s = section("spectrum");
    check_keys(s, "spectrum", {"lambda_center", "points", "lambda_min", "lambda_max"});
    cfg.spectrum.lambda_center = positive(s, "spectrum", "lambda_center", 1.55e-6);
    cfg.spectrum.points = count(s, "spectrum", "points", 2001, 1);
    if (s.contains("lambda_min") != s.contains("lambda_max")) {
      fail("spectrum: lambda_min and lambda_max must be given together");
    }
    if (s.contains("lambda_min")) {
      cfg.spectrum.lambda_min = positive(s, "spectrum", "lambda_min", 0.0);
      cfg.spectrum.lambda_max = positive(s, "spectrum", "lambda_max", 0.0);
      if (!(*cfg.spectrum.lambda_max > *cfg.spectrum.lambda_min)) {
        fail("spectrum.lambda_max: must exceed lambda_min");
      }
    }
  }
  {
    const json& h = section("herald");
    check_keys(h, "herald", {"lambda_center", "t_grid"});
    cfg.herald.lambda_center = positive(h, "herald", "lambda_center", 1.55e-6);
    if (h.contains("t_grid")) cfg.herald.t_grid = grid(h.at("t_grid"), "herald.t_grid");
    for (double t : cfg.herald.t_grid) {
      if (!(t > 0.0 && t <= 1.0)) fail("herald.t_grid: values must lie in (0, 1]");
    }
  }
  {
    const json& s = section("sweep");
    check_keys(s, "sweep", {"axis", "grid", "metrics", "lambda_center"});
    if (s.contains("axis")) {
      const std::string a = text(s, "sweep", "axis", "");
      cfg.sweep.axis = sweep_axis_from_string(a);
      if (!cfg.sweep.axis) fail("sweep.axis: unknown axis '" + a + "'");
    }
    if (s.contains("grid")) cfg.sweep.grid = grid(s.at("grid"), "sweep.grid");
    if (s.contains("metrics")) {
      if (!s.at("metrics").is_array()) fail("sweep.metrics: expected a list");
      for (const auto& m : s.at("metrics")) {
        const auto metric = m.is_string() ? metric_from_string(m.get<std::string>())
                                          : std::nullopt;
        if (!metric) fail("sweep.metrics: unknown metric " + m.dump());
        cfg.sweep.metrics.push_back(*metric);
      }
    }
    cfg.sweep.lambda_center = positive(s, "sweep", "lambda_center", 1.55e-6);
  }
  {
    const json& o = section("optimize");
    check_keys(o, "optimize", {"objective", "t_min", "t_max", "coarse_points", "t_tol",
                               "scan_points", "lambda_center"});
    const std::string obj = text(o, "optimize", "objective", "herald-rate");
    if (obj == "herald-rate") {
      cfg.optimize.objective = Objective::HeraldRate;
    } else if (obj == "herald-mode") {
      cfg.optimize.objective = Objective::HeraldMode;
    } else if (obj == "efficiency") {
      cfg.optimize.objective = Objective::Efficiency;
    } else {
      fail("optimize.objective: unknown objective '" + obj + "'");
    }
    cfg.optimize.t_min = bounded(o, "optimize", "t_min", 0.5, 0.0, 1.0);
    cfg.optimize.t_max = bounded(o, "optimize", "t_max", 1.0, 0.0, 1.0);
    if (!(cfg.optimize.t_min > 0.0 && cfg.optimize.t_min < cfg.optimize.t_max)) {
      fail("optimize: need 0 < t_min < t_max <= 1");
    }
    CouplingSearch& cs = cfg.optimize.search;
    cs.coarse_points = count(o, "optimize", "coarse_points", cs.coarse_points, 3);
    cs.t_tol = positive(o, "optimize", "t_tol", cs.t_tol);
    cs.scan_points = count(o, "optimize", "scan_points", cs.scan_points, 3);
    cs.lambda_center = positive(o, "optimize", "lambda_center", cs.lambda_center);
  }
  {
    const json& f = section("fit");
    check_keys(f, "fit", {"data", "free", "starts", "ordering"});
    if (f.contains("data")) {
      std::filesystem::path data = text(f, "fit", "data", "");
      cfg.fit.data = data.is_absolute() ? data : base_dir / data;
    }
    if (f.contains("free")) {
      if (!f.at("free").is_array()) fail("fit.free: expected a list");
      cfg.fit.free.clear();
      for (const auto& v : f.at("free")) {
        const auto name = v.is_string() ? fit_param_from_string(v.get<std::string>())
                                        : std::nullopt;
        if (!name) fail("fit.free: unknown parameter " + v.dump());
        cfg.fit.free.insert(*name);
      }
      if (cfg.fit.free.empty()) fail("fit.free: at least one parameter required");
    }
    cfg.fit.options.starts = count(f, "fit", "starts", 8, 1);
    cfg.fit.options.ordering =
        ordering_from(text(f, "fit", "ordering", "end-of-ring"), "fit.ordering");
  }
  {
    const json& o = section("output");
    check_keys(o, "output", {"dir"});
    cfg.out_dir = text(o, "output", "dir", "out");
  }

  try {
    cfg.ring.validate();
    if (cfg.sfwm) cfg.sfwm->validate();
  } catch (const Error& e) {
    fail(std::string("ring: ") + e.what());
  }
  return cfg;
}

}  // namespace

RunConfig parse_config_text(const std::string& src, const std::filesystem::path& base_dir,
                            const std::vector<std::string>& overrides) {
  json root;
  try {
    root = json::parse(src);
  } catch (const json::parse_error& e) {
    fail("parse error at " + position(src, e.byte) + ": " + e.what());
  }
  for (const auto& item : overrides) apply_override(root, item);
  return build(root, base_dir);
}

RunConfig parse_config(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.parent_path(), overrides);
}

}  // namespace splitring::cli
