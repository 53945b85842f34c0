// amppere: generate, block, link, bench and eval for private record linkage runs.

#include "amppere/cli/commands.hpp"
#include "amppere/machine/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace amppere;

  RunConfig config;
  CLI::App app{"Privacy-preserving entity resolution over an abstract private machine"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value file; command-line flags override it");

  app.add_option("--dir", config.dir, "working directory for inputs and outputs")->capture_default_str();
  app.add_option("--backend", config.backend, "machine backend")
      ->check(CLI::IsMember({"clear", "sim", "oblivious-sim", "mpc"}))
      ->capture_default_str();
  app.add_option("--profile", config.profile, "capability profile of the oblivious simulator")
      ->check(CLI::IsMember({"generic", "simd", "simd-like", "sharemind", "sharemind-like"}))
      ->capture_default_str();
  app.add_option("--isect", config.isect, "set-intersection strategy")
      ->check(CLI::IsMember({"pj", "vr", "ve", "so", "mj", "auto"}))
      ->capture_default_str();
  app.add_option("--t-jaccard", config.tJaccard, "Jaccard match threshold, P/Q or decimal")->capture_default_str();
  app.add_option("--t-block", config.tBlock, "blocking threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--num-perm", config.numPerm, "MinHash permutations")->check(CLI::Range(1, 4096))->capture_default_str();
  app.add_option("--fp-weight", config.fpWeight, "false-positive weight of the band search")->capture_default_str();
  app.add_option("--fn-weight", config.fnWeight, "false-negative weight of the band search")->capture_default_str();
  app.add_option("--rho", config.rho, "candidate obfuscation noise rate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--pack", config.pack, "tokens per 64-bit container")
      ->check(CLI::IsMember({1, 4}))
      ->capture_default_str();
  app.add_option("--seed", config.seed, "seed for data, MinHash, shares and noise")->capture_default_str();
  app.add_option("--jobs", config.jobs, "parallel filter jobs")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--latency-us", config.latencyUs, "mpc per-message latency")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--jitter-us", config.jitterUs, "mpc seeded latency jitter")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--size", config.size, "generated records in total")->check(CLI::Range(2, 1000000))->capture_default_str();
  app.add_option("--split", config.split, "share of records in the first dataset")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--thresholds", config.thresholds, "bench: thresholds, used for blocking and Jaccard alike")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--strategies", config.strategies, "bench: strategies or 'all'")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--backends", config.backends, "bench: backends as kind[:profile]")
      ->delimiter(',')->capture_default_str();

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const RunConfig&, std::ostream&);
  };
  const Command commands[] = {
      {"generate", "write a synthetic corpus and its gold standard", cmdGenerate},
      {"block", "tokenize, sign and block both datasets into transport directories", cmdBlock},
      {"link", "run private entity resolution on the transported data", cmdLink},
      {"bench", "cost table over thresholds, backends and strategies", cmdBench},
      {"eval", "metrics for the current matches and the oracle sweep", cmdEval},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help)->fallthrough();

  CLI11_PARSE(app, argc, argv);

  for (const auto& c : commands) {
    if (!app.got_subcommand(c.name)) continue;
    try {
      c.run(config, std::cout);
    } catch (const StageError& e) {
      std::cerr << c.name << " failed in stage " << e.stage() << ": " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << c.name << " failed: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}
