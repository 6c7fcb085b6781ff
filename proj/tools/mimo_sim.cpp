// mimo_sim: closed-loop SVD / QRS beamforming BER simulator.

#include <CLI11.hpp>

#include <iostream>

#include "mimo/cli.hpp"

namespace {

struct Flags {
  mimo::cli::Options opts;
  std::string manifest;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--set", f.opts.set, "Modulation set name or ALL");
  cmd->add_option("--snr", f.opts.snr, "SNR grid start:stop:step in dB");
  cmd->add_option("--seed", f.opts.seed, "64-bit seed");
  cmd->add_option("--workers", f.opts.workers, "OpenMP workers per cell");
  cmd->add_option("--budget", f.opts.budget, "fast (50 errors / 1e5 uses) or paper (200 / 2e6)");
  cmd->add_option("--out", f.opts.out, "Output directory");
  cmd->add_option("--manifest", f.manifest, "Re-run with the settings recorded in a manifest");
}

// Manifest values first, then any flag given explicitly on the command line.
mimo::cli::Options resolve(const CLI::App* cmd, const Flags& f) {
  if (f.manifest.empty()) return f.opts;
  const auto m = mimo::cli::RunManifest::parse(mimo::cli::read_text_file(f.manifest));
  mimo::cli::Options o = mimo::cli::options_from_manifest(m);
  o.out = f.opts.out;
  if (cmd->count("--scheme")) o.scheme = f.opts.scheme;
  if (cmd->count("--set")) o.set = f.opts.set;
  if (cmd->count("--snr")) o.snr = f.opts.snr;
  if (cmd->count("--seed")) o.seed = f.opts.seed;
  if (cmd->count("--workers")) o.workers = f.opts.workers;
  if (cmd->count("--budget")) o.budget = f.opts.budget;
  if (cmd->get_option_no_throw("--selection") && cmd->count("--selection")) o.selection = f.opts.selection;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop MIMO beamforming BER simulator (SVD vs equal-diagonal QR)"};
  app.require_subcommand(1);

  Flags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "BER curves for one scheme, one CSV per modulation set");
  sweep->add_option("--scheme", sweep_flags.opts.scheme, "svd or qrs");
  add_common(sweep, sweep_flags);

  Flags compare_flags;
  auto* compare = app.add_subcommand("compare", "Both schemes, best fixed sets, selection envelopes and gaps");
  add_common(compare, compare_flags);
  compare->add_option("--selection", compare_flags.opts.selection,
                      "Per-realization selector: oracle (fewest actual errors) or expected");

  Flags self_flags;
  auto* selftest = app.add_subcommand("selftest", "Fast invariant suites");
  selftest->add_option("--seed", self_flags.opts.seed, "64-bit seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) return mimo::cli::cmd_sweep(resolve(sweep, sweep_flags), std::cout);
    if (*compare) return mimo::cli::cmd_compare(resolve(compare, compare_flags), std::cout);
    if (*selftest) return mimo::cli::cmd_selftest(self_flags.opts, std::cout);
  } catch (const mimo::cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const mimo::cli::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
