// Command-line front end: online runs, verification suites, transcript
// optimization, and horizon sweeps.
#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "locpred/errors.hpp"
#include "locpred/harness.hpp"
#include "locpred/oracles.hpp"
#include "locpred/rng.hpp"
#include "locpred/sampling.hpp"
#include "locpred/textio.hpp"
#include "locpred/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSizeCap = 3;

struct RunFlags {
  int n = 0;
  int k = 2;
  long horizon = 0;
  double eta = 0.0;
  std::uint64_t seed = 0;
  double noise = 0.0;
  std::string adversary = "random";
  std::string problem = "maxcut";
  std::vector<int> planted;
  std::string script;
  int replicates = 1;
  std::string out;
  int cadence = 1;
  long checkpoint_every = 0;
  std::string checkpoint;
  std::string resume;
  int jobs = 0;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--n", f.n, "number of items");
  cmd->add_option("--k", f.k, "labels per item");
  cmd->add_option("--T", f.horizon,
                  "horizon (scripted runs default to the script length)");
  cmd->add_option("--eta", f.eta, "learning rate; 0 = sqrt(n/(kT))");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--noise", f.noise, "planted outcome flip probability");
  cmd->add_option("--adversary", f.adversary, "random | planted | scripted");
  cmd->add_option("--problem", f.problem, "maxcut | gambling");
  cmd->add_option("--planted", f.planted,
                  "planted labeling (default: drawn from seed)")
      ->delimiter(',');
  cmd->add_option("--script", f.script, "transcript file for scripted runs");
  cmd->add_option("--resolve-cadence", f.cadence, "rounds between re-solves");
  cmd->add_option("--jobs", f.jobs, "parallel workers; 0 = hardware");
  cmd->set_config("--config", "", "key=value config file (flags override)");
}

locpred::ExperimentConfig build_config(const RunFlags& f) {
  locpred::ExperimentConfig config;
  config.adversary.problem = locpred::parse_problem(f.problem);
  config.adversary.n = f.n;
  config.adversary.k = f.k;
  config.adversary.noise = f.noise;
  config.adversary.seed = f.seed;

  if (f.adversary == "random") {
    config.adversary.kind = locpred::AdversaryKind::kRandomEdge;
  } else if (f.adversary == "planted") {
    config.adversary.kind = locpred::AdversaryKind::kPlanted;
    if (f.planted.empty()) {
      std::mt19937_64 rng = locpred::stream_rng(f.seed, 0x91a7ced3u);
      config.adversary.planted = locpred::random_labeling(f.n, f.k, rng);
    } else {
      config.adversary.planted = f.planted;
    }
  } else if (f.adversary == "scripted") {
    config.adversary.kind = locpred::AdversaryKind::kScripted;
    if (f.script.empty())
      throw std::invalid_argument("scripted adversary needs --script");
    config.adversary.script = locpred::read_transcript_file(f.script);
    config.adversary.n = config.adversary.script.n;
    config.adversary.k = config.adversary.script.k;
    config.adversary.problem = config.adversary.script.problem;
  } else {
    throw std::invalid_argument("unknown adversary '" + f.adversary +
                                "' (expected random|planted|scripted)");
  }

  config.engine.n = config.adversary.n;
  config.engine.k = config.adversary.k;
  config.engine.horizon =
      (f.horizon == 0 && f.adversary == "scripted")
          ? static_cast<long>(config.adversary.script.rounds.size())
          : f.horizon;
  config.engine.eta = f.eta;
  config.engine.resolve_cadence = f.cadence;
  config.engine.seed = f.seed;
  return config;
}

int cmd_run(const RunFlags& f) {
  locpred::ExperimentConfig config = build_config(f);
  config.replicates = f.replicates;
  config.out_path = f.out;
  config.checkpoint_every = f.checkpoint_every;
  config.checkpoint_path = f.checkpoint;
  config.resume_path = f.resume;
  const std::vector<locpred::RunSummary> summaries =
      locpred::run_replicates(config, f.jobs);
  for (size_t r = 0; r < summaries.size(); ++r) {
    if (summaries.size() > 1) std::cout << "replicate=" << r << '\n';
    std::cout << locpred::summary_text(summaries[r]);
  }
  return kExitOk;
}

int cmd_sweep(const RunFlags& f, const std::vector<long>& horizons,
              const std::vector<std::uint64_t>& seeds,
              const std::string& out) {
  RunFlags adjusted = f;
  if (adjusted.horizon == 0) adjusted.horizon = 1;  // cells override T anyway
  locpred::ExperimentConfig base = build_config(adjusted);
  const std::vector<locpred::SweepCell> cells =
      locpred::run_sweep(base, horizons, seeds, f.jobs);
  const std::string csv = locpred::sweep_csv(cells);
  if (out.empty())
    std::cout << csv;
  else
    locpred::write_file_atomic(out, csv);
  long failures = 0;
  for (const locpred::SweepCell& cell : cells)
    if (!cell.ok) ++failures;
  std::cout << "cells=" << cells.size() << " failures=" << failures << '\n';
  return kExitOk;
}

int cmd_verify(const std::string& suite, long trials, std::uint64_t seed,
               double c) {
  const std::vector<locpred::SuiteReport> reports =
      locpred::run_suite(suite, trials, seed, c);
  locpred::print_reports(std::cout, reports);
  const long violations = locpred::total_violations(reports);
  if (violations > 0) {
    std::cout << "FAIL violations=" << violations << '\n';
    return kExitViolation;
  }
  std::cout << "PASS\n";
  return kExitOk;
}

int cmd_opt(const std::string& path) {
  const locpred::Transcript transcript = locpred::read_transcript_file(path);
  const locpred::BruteForceResult best = locpred::brute_force_opt(transcript);
  std::cout << "opt_value=" << locpred::format_double(best.value) << '\n';
  std::cout << "labeling=";
  for (size_t i = 0; i < best.labeling.size(); ++i) {
    if (i) std::cout << ',';
    std::cout << best.labeling[i];
  }
  std::cout << '\n';
  if (transcript.n * transcript.k <= 8)
    std::cout << "sdp_value="
              << locpred::format_double(locpred::pseudodist_opt_desk(transcript))
              << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online local prediction over pseudodistributions"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "one online learning run");
  add_run_flags(run, run_flags);
  run->add_option("--replicates", run_flags.replicates, "independent runs");
  run->add_option("--out", run_flags.out, "per-round CSV path");
  run->add_option("--checkpoint-every", run_flags.checkpoint_every,
                  "rounds between checkpoints; 0 = off");
  run->add_option("--checkpoint", run_flags.checkpoint, "checkpoint path");
  run->add_option("--resume", run_flags.resume, "checkpoint to resume from");

  RunFlags sweep_flags;
  std::vector<long> sweep_horizons;
  std::vector<std::uint64_t> sweep_seeds;
  std::string sweep_out;
  CLI::App* sweep = app.add_subcommand("sweep", "grid of runs over T x seed");
  add_run_flags(sweep, sweep_flags);
  sweep->add_option("--T-list", sweep_horizons, "horizons")
      ->delimiter(',')
      ->required();
  sweep->add_option("--seed-list", sweep_seeds, "seeds")
      ->delimiter(',')
      ->required();
  sweep->add_option("--out", sweep_out, "aggregate CSV path");

  std::string suite = "all";
  long trials = 10000;
  std::uint64_t verify_seed = 1;
  double coeff = -1.0;
  CLI::App* verify = app.add_subcommand("verify", "randomized inequality suites");
  verify->add_option("--suite", suite,
                     "all|entropy|tv|logdet|regularizer|projection");
  verify->add_option("--trials", trials, "trials per suite");
  verify->add_option("--seed", verify_seed, "suite seed");
  verify->add_option("--c", coeff, "coefficient override (negative control)");
  verify->set_config("--config", "", "key=value config file");

  std::string transcript_path;
  CLI::App* opt = app.add_subcommand("opt", "exhaustive transcript optimum");
  opt->add_option("transcript", transcript_path, "transcript file")
      ->required();

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(run_flags);
    if (sweep->parsed())
      return cmd_sweep(sweep_flags, sweep_horizons, sweep_seeds, sweep_out);
    if (verify->parsed()) return cmd_verify(suite, trials, verify_seed, coeff);
    if (opt->parsed()) return cmd_opt(transcript_path);
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const locpred::ParseError& e) {
    std::cerr << "error: " << e.what() << " (line " << e.line << ")\n";
    return kExitConfig;
  } catch (const locpred::SizeCapError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSizeCap;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
