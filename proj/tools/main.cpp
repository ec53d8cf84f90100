#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "run_config.hpp"
#include "splitring/error.hpp"

namespace {

const char* category(splitring::ErrorKind kind) {
  using splitring::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidParam:
    case ErrorKind::Config: return "config";
    case ErrorKind::NotConverged: return "fit-not-converged";
    default: return "numerical";
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace splitring;
  CLI::App app{"Backscatter-aware micro-ring resonator simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool plot = false;

  const char* commands[][2] = {
      {"spectrum", "Transmission and ring-field magnitudes over a wavelength grid"},
      {"fields", "Complex bus, ring and loss fields over a wavelength grid"},
      {"herald", "Heralding rate and efficiency against coupling"},
      {"sweep", "Metrics against one parameter"},
      {"optimize", "Coupling that maximises a heralding objective"},
      {"fit", "Least-squares fit of a measured transmission spectrum"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_flag("--plot", plot, "Also write an SVG plot of each CSV");
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--set", overrides, "Override a config value, e.g. ring.t=0.97")
        ->take_all();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return cli::kUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    cli::RunConfig cfg = cli::parse_config(config_path, overrides);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    return cli::execute(command, cfg, plot, std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << category(e.kind()) << ": ";
    if (e.kind() != ErrorKind::Config) std::cerr << to_string(e.kind()) << ": ";
    std::cerr << e.what() << '\n';
    return cli::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return cli::kNumerical;
  }
}
