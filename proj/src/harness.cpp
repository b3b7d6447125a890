#include "locpred/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "locpred/errors.hpp"
#include "locpred/textio.hpp"

namespace locpred {

namespace {

// Strided work queue over [0, count); exceptions from tasks propagate.
template <typename Fn>
void parallel_slots(long count, int jobs, Fn&& fn) {
  long workers = jobs > 0
                     ? jobs
                     : static_cast<long>(std::thread::hardware_concurrency());
  workers = std::clamp<long>(workers, 1, std::max<long>(count, 1));
  if (workers <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (long w = 0; w < workers; ++w)
    futures.push_back(std::async(std::launch::async, [&] {
      for (long i = next++; i < count; i = next++) fn(i);
    }));
  for (auto& f : futures) f.get();
}

std::string with_rep_suffix(const std::string& path, int replicate) {
  const size_t slash = path.find_last_of('/');
  const size_t dot = path.find_last_of('.');
  const std::string suffix = "_rep" + std::to_string(replicate);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

void save_checkpoint_atomic(const Engine& engine, const std::string& path) {
  std::ostringstream out;
  engine.save_checkpoint(out);
  write_file_atomic(path, out.str());
}

std::string sanitize_cell(std::string text) {
  for (char& c : text)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return text;
}

}  // namespace

void validate_experiment_config(const ExperimentConfig& config) {
  if (config.adversary.n != config.engine.n ||
      config.adversary.k != config.engine.k)
    throw std::invalid_argument(
        "experiment config: engine and adversary disagree on n or k");
  validate_engine_config(config.engine);
  if (config.engine.horizon < 1)
    throw std::invalid_argument("experiment config: T must be >= 1");
  if (config.replicates < 1)
    throw std::invalid_argument("experiment config: replicates must be >= 1");
  if (config.checkpoint_every < 0)
    throw std::invalid_argument(
        "experiment config: checkpoint_every must be >= 0");
  if (config.checkpoint_every > 0 && config.checkpoint_path.empty())
    throw std::invalid_argument(
        "experiment config: checkpoint_every needs a checkpoint path");
  if (config.adversary.kind == AdversaryKind::kScripted &&
      static_cast<long>(config.adversary.script.rounds.size()) <
          config.engine.horizon)
    throw std::invalid_argument(
        "experiment config: script shorter than horizon");
  // Constructing the adversary validates the remaining fields.
  Adversary probe(config.adversary);
}

RunSummary run_experiment(const ExperimentConfig& base, int replicate) {
  if (replicate < 0)
    throw std::invalid_argument("run_experiment: negative replicate");
  ExperimentConfig config = base;
  config.adversary.seed += static_cast<std::uint64_t>(replicate);
  config.engine.seed = config.adversary.seed;
  validate_experiment_config(config);

  const Adversary adversary(config.adversary);
  const long horizon = config.engine.horizon;

  Engine engine = [&] {
    if (config.resume_path.empty()) return Engine(config.engine);
    std::ifstream in(config.resume_path);
    if (!in)
      throw std::runtime_error("cannot open checkpoint: " +
                               config.resume_path);
    return Engine::load_checkpoint(in, config.engine);
  }();
  if (engine.round() > horizon)
    throw std::invalid_argument("run_experiment: checkpoint beyond horizon");

  std::optional<LabelingTracker> tracker;
  try {
    tracker.emplace(config.engine.n, config.engine.k);
  } catch (const SizeCapError&) {
    // Comparator columns are skipped above the enumeration cap.
  }

  // Rounds absorbed before a resume still count for the comparator; the
  // opponent is oblivious, so they can be replayed without the engine.
  const long start = engine.round();
  if (tracker)
    for (long t = 0; t < start; ++t) {
      const TranscriptRound r = adversary.round(t);
      tracker->add_round(r.query, r.payoff);
    }

  RunSummary summary;
  summary.n = config.engine.n;
  summary.k = config.engine.k;
  summary.horizon = horizon;
  summary.seed = config.adversary.seed;
  summary.has_comparator = tracker.has_value();
  summary.rows.reserve(horizon - start);

  const bool checkpointing =
      config.checkpoint_every > 0 && !config.checkpoint_path.empty();

  for (long t = start; t < horizon; ++t) {
    const RoundQuery query = adversary.query(t);
    const Eigen::MatrixXd dist = engine.predict(query);
    const auto [sample_a, sample_b] = engine.sample(dist);
    const PayoffMatrix payoff = adversary.payoff(t);
    const double realized = payoff_value(dist, payoff);
    engine.observe(query, payoff);

    RoundRow row;
    row.round = t + 1;
    row.i = query.i;
    row.j = query.j;
    row.payoff = realized;
    row.cumulative = engine.cumulative_payoff();
    const bool resolved =
        engine.round() % config.engine.resolve_cadence == 0;
    row.inexact_flag = (resolved && !engine.last_solve_exact()) ? 1 : 0;
    row.sample_a = sample_a;
    row.sample_b = sample_b;
    if (tracker) {
      tracker->add_round(query, payoff);
      row.opt_cumulative = tracker->best();
      row.regret = row.opt_cumulative - row.cumulative;
    }
    summary.rows.push_back(row);

    if (checkpointing && ((t + 1) % config.checkpoint_every == 0 ||
                          t + 1 == horizon))
      save_checkpoint_atomic(engine, config.checkpoint_path);
  }

  summary.cumulative_payoff = engine.cumulative_payoff();
  summary.inexact_solves = engine.inexact_solves();
  if (tracker) {
    summary.opt_value = tracker->best();
    summary.final_regret = summary.opt_value - summary.cumulative_payoff;
    const double t = static_cast<double>(horizon);
    const double n = summary.n;
    const double k = summary.k;
    summary.ratio_nk3 = summary.final_regret / std::sqrt(n * k * k * k * t);
    summary.ratio_nk = summary.final_regret / std::sqrt(n * k * t);
  }
  if (!config.out_path.empty())
    write_file_atomic(config.out_path, run_csv(summary));
  return summary;
}

std::vector<RunSummary> run_replicates(const ExperimentConfig& config,
                                       int jobs) {
  validate_experiment_config(config);
  if (config.replicates > 1 && !config.resume_path.empty())
    throw std::invalid_argument(
        "run_replicates: resume is single-replicate only");
  std::vector<RunSummary> out(config.replicates);
  parallel_slots(config.replicates, jobs, [&](long r) {
    ExperimentConfig cfg = config;
    if (config.replicates > 1) {
      if (!cfg.out_path.empty())
        cfg.out_path = with_rep_suffix(cfg.out_path, static_cast<int>(r));
      if (!cfg.checkpoint_path.empty())
        cfg.checkpoint_path =
            with_rep_suffix(cfg.checkpoint_path, static_cast<int>(r));
    }
    out[r] = run_experiment(cfg, static_cast<int>(r));
  });
  return out;
}

std::string run_csv(const RunSummary& summary) {
  std::ostringstream out;
  out << "round,i,j,payoff,cumulative,inexact_flag,sample_a,sample_b";
  if (summary.has_comparator) out << ",opt_cumulative,regret";
  out << '\n';
  for (const RoundRow& row : summary.rows) {
    out << row.round << ',' << row.i << ',' << row.j << ','
        << format_double(row.payoff) << ',' << format_double(row.cumulative)
        << ',' << row.inexact_flag << ',' << row.sample_a << ','
        << row.sample_b;
    if (summary.has_comparator)
      out << ',' << format_double(row.opt_cumulative) << ','
          << format_double(row.regret);
    out << '\n';
  }
  return out.str();
}

std::string summary_text(const RunSummary& summary) {
  std::ostringstream out;
  out << "n=" << summary.n << " k=" << summary.k << " T=" << summary.horizon
      << " seed=" << summary.seed << '\n';
  out << "cumulative_payoff=" << format_double(summary.cumulative_payoff)
      << '\n';
  if (summary.has_comparator) {
    out << "opt_value=" << format_double(summary.opt_value) << '\n';
    out << "regret=" << format_double(summary.final_regret)
        << " ratio_nk3T=" << format_double(summary.ratio_nk3)
        << " ratio_nkT=" << format_double(summary.ratio_nk) << '\n';
  } else {
    out << "opt_value=skipped (k^n beyond enumeration cap)" << '\n';
  }
  out << "inexact_solves=" << summary.inexact_solves << '\n';
  return out.str();
}

std::vector<SweepCell> run_sweep(const ExperimentConfig& base,
                                 const std::vector<long>& horizons,
                                 const std::vector<std::uint64_t>& seeds,
                                 int jobs) {
  if (horizons.empty() || seeds.empty())
    throw std::invalid_argument("run_sweep: empty horizon or seed list");
  for (long t : horizons)
    if (t < 1) throw std::invalid_argument("run_sweep: horizons must be >= 1");

  std::vector<long> ts = horizons;
  std::vector<std::uint64_t> ss = seeds;
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::sort(ss.begin(), ss.end());
  ss.erase(std::unique(ss.begin(), ss.end()), ss.end());

  std::vector<SweepCell> cells(ts.size() * ss.size());
  parallel_slots(static_cast<long>(cells.size()), jobs, [&](long idx) {
    SweepCell& cell = cells[idx];
    cell.horizon = ts[idx / ss.size()];
    cell.seed = ss[idx % ss.size()];
    ExperimentConfig cfg = base;
    cfg.engine.horizon = cell.horizon;
    cfg.adversary.seed = cell.seed;
    cfg.replicates = 1;
    cfg.out_path.clear();
    cfg.checkpoint_every = 0;
    cfg.checkpoint_path.clear();
    cfg.resume_path.clear();
    try {
      cell.summary = run_experiment(cfg, 0);
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  });
  return cells;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream out;
  out << "T,seed,regret,ratio_nk3T,ratio_nkT,cumulative,opt_value,"
         "inexact_solves,error\n";
  for (const SweepCell& cell : cells) {
    out << cell.horizon << ',' << cell.seed << ',';
    if (cell.ok && cell.summary.has_comparator)
      out << format_double(cell.summary.final_regret) << ','
          << format_double(cell.summary.ratio_nk3) << ','
          << format_double(cell.summary.ratio_nk) << ',';
    else
      out << ",,,";
    if (cell.ok)
      out << format_double(cell.summary.cumulative_payoff) << ','
          << (cell.summary.has_comparator
                  ? format_double(cell.summary.opt_value)
                  : std::string())
          << ',' << cell.summary.inexact_solves << ',';
    else
      out << ",,,";
    out << sanitize_cell(cell.error) << '\n';
  }
  return out.str();
}

}  // namespace locpred
