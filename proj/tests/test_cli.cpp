#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "run_config.hpp"
#include "splitring/error.hpp"

using namespace splitring;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "splitring_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ErrorKind config_error(const std::string& text, const std::vector<std::string>& sets = {}) {
  try {
    cli::parse_config_text(text, ".", sets);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("config accepted: " << text);
  return ErrorKind::InvalidParam;
}

std::string config_message(const std::string& text) {
  try {
    cli::parse_config_text(text, ".");
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

struct Run {
  int code;
  std::string output;
};

Run run_tool(const std::string& args) {
  const std::string cmd = std::string(SPLITRING_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

}  // namespace

TEST_CASE("config defaults") {
  const cli::RunConfig c = cli::parse_config_text(R"({"ring": {"t": 0.97}})", ".");
  CHECK(c.ring.t == 0.97);
  CHECK(c.ring.tau == 0.0);
  CHECK(c.ring.placement == Placement::InCoupler);
  CHECK(c.ordering == Ordering::MidRing);
  CHECK(c.input.fwd == Complex(1.0));
  CHECK(c.input.bwd == Complex(0.0));
  CHECK_FALSE(c.sfwm.has_value());
  CHECK(c.spectrum.points == 2001);
  CHECK(c.optimize.search.coarse_points == 201);
  CHECK(c.fit.options.starts == 8);
}

TEST_CASE("config validation") {
  CHECK(config_error(R"({"ring": {"alpha": 1.2}})") == ErrorKind::Config);
  const std::string msg = config_message(R"({"ring": {"alpha": 1.2}})");
  CHECK(msg.find("ring.alpha") != std::string::npos);
  CHECK(msg.find("[0, 1]") != std::string::npos);

  CHECK(config_message(R"({"ring": {"radius": 1}})").find("ring.radius: unknown key") !=
        std::string::npos);
  CHECK(config_message(R"({"rings": {}})").find("unknown key") != std::string::npos);
  CHECK(config_message(R"({"ring": {"t": "high"}})").find("expected a number") !=
        std::string::npos);
  CHECK(config_message("{\n  \"ring\": {\"t\": 0.9,}\n}").find("line 2") != std::string::npos);
  CHECK(config_error(R"({"ring": {"placement": "sideways"}})") == ErrorKind::Config);
  CHECK(config_error(R"({"sweep": {"axis": "radius"}})") == ErrorKind::Config);
  CHECK(config_error(R"({"sweep": {"metrics": ["speed"]}})") == ErrorKind::Config);
  CHECK(config_error(R"({"optimize": {"t_min": 0.9, "t_max": 0.8}})") == ErrorKind::Config);
  CHECK(config_error(R"({"fit": {"free": ["radius"]}})") == ErrorKind::Config);
  CHECK(config_error(R"({"spectrum": {"lambda_min": 1.5e-6}})") == ErrorKind::Config);
}

TEST_CASE("missing file is reported differently from a parse failure") {
  std::string missing, broken;
  try {
    cli::parse_config("/nonexistent/dir/config.json");
  } catch (const Error& e) {
    missing = e.what();
  }
  const fs::path dir = scratch("broken");
  std::ofstream(dir / "c.json") << "{ not json";
  try {
    cli::parse_config(dir / "c.json");
  } catch (const Error& e) {
    broken = e.what();
  }
  CHECK(missing.find("cannot open") != std::string::npos);
  CHECK(broken.find("parse error") != std::string::npos);
}

TEST_CASE("overrides") {
  const cli::RunConfig c = cli::parse_config_text(
      R"({"ring": {"t": 0.9}})", ".",
      {"ring.t=0.97", "ring.placement=in-ring", "sweep.grid=[1,2]", "sfwm.chi3=1e-19"});
  CHECK(c.ring.t == 0.97);
  CHECK(c.ring.placement == Placement::InRing);
  CHECK(c.sweep.grid == std::vector<double>{1, 2});
  REQUIRE(c.sfwm.has_value());
  CHECK(c.sfwm->chi3 == 1e-19);
  CHECK(config_error("{}", {"ring.alpha=1.2"}) == ErrorKind::Config);
  CHECK(config_error("{}", {"ring.bogus=1"}) == ErrorKind::Config);
  CHECK(config_error("{}", {"novalue"}) == ErrorKind::Config);
}

TEST_CASE("grids from ranges") {
  const cli::RunConfig c = cli::parse_config_text(
      R"({"herald": {"t_grid": {"start": 0.9, "stop": 0.99, "points": 4}}})", ".");
  REQUIRE(c.herald.t_grid.size() == 4);
  CHECK(c.herald.t_grid.front() == 0.9);
  CHECK(c.herald.t_grid.back() == 0.99);
  CHECK(config_error(R"({"herald": {"t_grid": [0.5, 1.5]}})") == ErrorKind::Config);
}

TEST_CASE("spectrum command writes the library sweep") {
  cli::RunConfig c = cli::parse_config_text(
      R"({"ring": {"xi": 0.99, "zeta": 0.3}, "spectrum": {"points": 101}})", ".");
  c.out_dir = scratch("spectrum");
  std::ostringstream out, err;
  CHECK(cli::execute("spectrum", c, true, out, err) == cli::kSuccess);
  CHECK(out.str().rfind("spectrum: 101 points", 0) == 0);
  CHECK(fs::exists(c.out_dir / "spectrum.svg"));

  std::ostringstream expected;
  write_spectrum_csv(expected,
                     spectrum_sweep(c.ring, c.ordering, fsr_grid(c.ring, 1.55e-6, 101)));
  CHECK(slurp(c.out_dir / "spectrum.csv") == expected.str());
}

TEST_CASE("csv output does not depend on the worker count") {
  cli::RunConfig c = cli::parse_config_text(
      R"({"ring": {"xi": 0.99, "zeta": 0.3},
          "herald": {"t_grid": {"start": 0.9, "stop": 0.99, "points": 7}},
          "spectrum": {"points": 301}})",
      ".");
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "3", "8"}) {
    setenv("SPLITRING_THREADS", threads, 1);
    c.out_dir = scratch(std::string("threads") + threads);
    std::ostringstream out, err;
    REQUIRE(cli::execute("spectrum", c, false, out, err) == 0);
    REQUIRE(cli::execute("fields", c, false, out, err) == 0);
    REQUIRE(cli::execute("herald", c, false, out, err) == 0);
    outputs.push_back(slurp(c.out_dir / "spectrum.csv") + slurp(c.out_dir / "fields.csv") +
                      slurp(c.out_dir / "herald.csv"));
  }
  unsetenv("SPLITRING_THREADS");
  CHECK(outputs[0] == outputs[1]);
  CHECK(outputs[0] == outputs[2]);
}

TEST_CASE("optimize command reports an over-coupled optimum") {
  cli::RunConfig c = cli::parse_config_text(
      R"({"ring": {"alpha": 0.98, "xi": 1.0}, "optimize": {"coarse_points": 41}})", ".");
  c.out_dir = scratch("optimize");
  std::ostringstream out, err;
  REQUIRE(cli::execute("optimize", c, false, out, err) == 0);
  const std::string s = out.str();
  const auto pos = s.find("t* ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(s.substr(pos + 3)) < 0.98);
  CHECK(slurp(c.out_dir / "optimize.txt").find("objective = herald-rate") != std::string::npos);
}

TEST_CASE("fit command on the synthetic fixture") {
  cli::RunConfig c = cli::parse_config(fs::path(SPLITRING_CONFIGS) / "fit_synthetic.json");
  c.out_dir = scratch("fit");
  std::ostringstream out, err;
  REQUIRE(cli::execute("fit", c, false, out, err) == cli::kSuccess);
  const std::string s = out.str();
  const auto pos = s.find("residual ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(s.substr(pos + 9)) < 1e-8);

  c.fit.options.simplex.max_iterations = 3;
  std::ostringstream out2, err2;
  CHECK(cli::execute("fit", c, false, out2, err2) == cli::kFitNotConverged);
  CHECK(err2.str().rfind("error: fit-not-converged: ", 0) == 0);
  CHECK(fs::exists(c.out_dir / "fit.txt"));
}

TEST_CASE("numerical failures name the failing point") {
  cli::RunConfig c = cli::parse_config_text(
      R"({"ring": {"t": 1.0, "alpha": 1.0, "xi": 1.0}, "model": {"ordering": "end-of-ring"},
          "spectrum": {"points": 2, "lambda_min": 1.55e-6, "lambda_max": 1.5501e-6}})",
      ".");
  // Exact resonance at the first grid point: lossless and fully reflecting.
  c.ring.tau = 0.0;
  c.ring.tau = -round_trip_phase(1.55e-6, c.ring);
  c.out_dir = scratch("numerical");
  std::ostringstream out, err;
  CHECK(cli::execute("spectrum", c, false, out, err) == cli::kNumerical);
  CHECK(err.str().rfind("error: numerical: singular-system", 0) == 0);
  CHECK(err.str().find("lambda=") != std::string::npos);
}

TEST_CASE("exit codes and error lines from the executable") {
  const fs::path dir = scratch("exe");
  std::ofstream(dir / "bad.json") << R"({"ring": {"alpha": 1.2}})";
  std::ofstream(dir / "flat.json")
      << R"({"ring": {"t": 1.0, "placement": "in-ring"}, "fit": {"data": "flat.csv"}})";
  {
    std::ofstream csv(dir / "flat.csv");
    csv << "lambda_m,power\n";
    csv.precision(17);
    for (int i = 0; i < 60; ++i) csv << 1.55e-6 + 1e-12 * i << ",1\n";
  }
  const std::string out = " --out " + (dir / "out").string();

  Run r = run_tool("spectrum --config " + (dir / "bad.json").string() + out);
  CHECK(r.code == 2);
  CHECK(r.output.rfind("error: config: ring.alpha", 0) == 0);

  r = run_tool("spectrum --config " + (dir / "missing.json").string());
  CHECK(r.code == 2);
  CHECK(r.output.rfind("error: config: cannot open", 0) == 0);

  r = run_tool("spectrum");
  CHECK(r.code == 1);
  CHECK(r.output.rfind("error: usage: ", 0) == 0);

  r = run_tool("frobnicate --config x");
  CHECK(r.code == 1);
  CHECK(r.output.rfind("error: usage: ", 0) == 0);

  r = run_tool("fit --config " + (dir / "flat.json").string() + out);
  CHECK(r.code == 3);
  CHECK(r.output.rfind("error: numerical: no-resonance-found: ", 0) == 0);

  r = run_tool("spectrum --config " + (dir / "bad.json").string() + " --set ring.alpha=0.9" +
               out);
  CHECK(r.code == 0);
  CHECK(r.output.rfind("spectrum: ", 0) == 0);
}

TEST_CASE("error categories map to exit codes") {
  CHECK(cli::exit_code_for(ErrorKind::Config) == 2);
  CHECK(cli::exit_code_for(ErrorKind::InvalidParam) == 2);
  CHECK(cli::exit_code_for(ErrorKind::SingularSystem) == 3);
  CHECK(cli::exit_code_for(ErrorKind::NoResonanceFound) == 3);
  CHECK(cli::exit_code_for(ErrorKind::NotConverged) == 4);
}
