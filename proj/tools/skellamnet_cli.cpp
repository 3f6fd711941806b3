// skellamnet figure1|stein|comb|chains --config <path> [--out <dir>] [--seed <u64>] [--threads <n>]
//
// Exit codes: 0 success, 2 config error, 3 infeasible parameters (partial
// output written), 4 numerical failure.

#include <omp.h>

#include <CLI11.hpp>
#include <iostream>

#include "skellamnet/errors.hpp"
#include "skellamnet/experiments.hpp"

namespace sn = skellamnet;

int main(int argc, char** argv) {
  CLI::App app{"Skellam approximations for noisy network subgraph counts"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;

  for (const char* name : {"figure1", "stein", "comb", "chains"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--out", out_dir, "output directory (overrides global.output_dir)");
    sub->add_option("--seed", seed, "base seed (overrides global.seed)");
    sub->add_option("--threads", threads, "OpenMP thread count")->check(CLI::PositiveNumber);
  }
  app.get_subcommand("figure1")->description("exact KS distances of the edge discrepancy (CSV + SVG)");
  app.get_subcommand("stein")->description("sup of the Stein solution's first difference against 156/(2 lambda)");
  app.get_subcommand("comb")->description("COMB calibration and negative-association checks");
  app.get_subcommand("chains")->description("two-chain discrepancy: census, lambdas, Monte Carlo, bound terms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sn::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const CLI::App* sub = app.get_subcommands().front();
  sn::RunOptions opts;
  if (sub->count("--out")) opts.out_dir = out_dir;
  if (sub->count("--seed")) opts.seed = seed;
  if (threads > 0) omp_set_num_threads(threads);

  try {
    const auto config = sn::load_config(config_path);
    const sn::CommandResult r = sn::run_command(command, config, opts);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& f : r.files) std::cout << f << '\n';
    return r.exit_code;
  } catch (const sn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return sn::kExitConfig;
  } catch (const sn::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return sn::kExitInfeasible;
  } catch (const sn::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return sn::kExitConfig;
  } catch (const sn::UnsupportedParameters& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return sn::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return sn::kExitNumerical;
  }
}
