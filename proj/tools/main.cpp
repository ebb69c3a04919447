#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "lmgf/errors.hpp"

using namespace lmgf::app;

int main(int argc, char** argv) {
  CLI::App app{"Layered-media dyadic Green's functions in the matrix basis"};
  app.require_subcommand(1);
  CliOptions opt;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) sub->add_option("--config", opt.config_path, "JSON run configuration")->required();
    sub->add_option("--out", opt.out_path, "output file (overrides output.path)");
    sub->add_flag("--strict", opt.strict, "non-zero exit when any row is flagged");
    sub->add_flag("--verbose", opt.verbose, "extra diagnostics");
    sub->add_option("--seed", opt.seed, "seed for randomized checks");
    sub->add_option("--threads", opt.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  };
  CLI::App* spectral = app.add_subcommand("spectral", "basis coefficients and tensors over a k_rho sweep");
  CLI::App* spatial = app.add_subcommand("spatial", "spatial Green's tensors at target points");
  CLI::App* validate = app.add_subcommand("validate", "residual, symmetry and oracle checks");
  CLI::App* selfcheck = app.add_subcommand("selfcheck", "embedded basis algebra checks");
  add_common(spectral, true);
  add_common(spatial, true);
  add_common(validate, true);
  add_common(selfcheck, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (selfcheck->parsed()) return cmd_selfcheck(opt, std::cout);
    const RunConfig config = load_config(opt.config_path);
    if (spectral->parsed()) return cmd_spectral(config, opt, std::cerr);
    if (spatial->parsed()) return cmd_spatial(config, opt, std::cerr);
    return cmd_validate(config, opt, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const lmgf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == lmgf::ErrorKind::NonConvergent ? kQuadratureFailed : kSolverSingular;
  }
}
