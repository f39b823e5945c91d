// willmore-lab <verify|solve|asymptotics|flux> --config <path> [--out <dir>] [--band-limit L] [--seed S]
#include <CLI11.hpp>

#include "willmore/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Area-constrained Willmore experiments"};
  app.set_version_flag("--version", willmore::version_string);
  app.require_subcommand(1);
  std::string config, out, seed;
  int band_limit = 0;
  for (const char* name : {"verify", "solve", "asymptotics", "flux"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "TOML or JSON config")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--band-limit", band_limit, "chart band limit")->check(CLI::Range(8, 1024));
    sub->add_option("--seed", seed, "corpus seed, decimal or 0x-prefixed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : willmore::lab::exit_config_error;
  }
  willmore::lab::Overrides ov;
  if (!out.empty()) ov.out = out;
  if (band_limit > 0) ov.band_limit = band_limit;
  if (!seed.empty()) {
    try {
      ov.seed = willmore::lab::detail::parse_seed(seed);
    } catch (const willmore::Error& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return willmore::lab::exit_config_error;
    }
  }
  return willmore::lab::run_command(app.get_subcommands().front()->get_name(), config, ov);
}
