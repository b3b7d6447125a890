#include "locpred/environments.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "locpred/errors.hpp"
#include "locpred/rng.hpp"
#include "locpred/textio.hpp"

namespace locpred {

std::string problem_name(Problem p) {
  return p == Problem::kMaxcut ? "maxcut" : "gambling";
}

Problem parse_problem(const std::string& name) {
  if (name == "maxcut") return Problem::kMaxcut;
  if (name == "gambling") return Problem::kGambling;
  throw std::invalid_argument("unknown problem: " + name);
}

PayoffMatrix maxcut_payoff(CutOutcome outcome, int k) {
  if (k != 2) throw std::invalid_argument("maxcut_payoff: k must be 2");
  PayoffMatrix c(2, 2);
  if (outcome == CutOutcome::kCut)
    c << -1, 1, 1, -1;
  else
    c << 1, -1, -1, 1;
  return c;
}

PayoffMatrix gambling_payoff(Winner winner, int k) {
  if (k < 2) throw std::invalid_argument("gambling_payoff: k must be >= 2");
  PayoffMatrix c = PayoffMatrix::Zero(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      if (a == b) continue;
      const bool row_wins = a > b;
      const bool rewarded = (winner == Winner::kFirst) ? row_wins : !row_wins;
      c(a, b) = rewarded ? 1.0 : -1.0;
    }
  return c;
}

double payoff_value(const Eigen::MatrixXd& dist, const PayoffMatrix& payoff) {
  if (dist.rows() != payoff.rows() || dist.cols() != payoff.cols())
    throw std::invalid_argument("payoff_value: shape mismatch");
  if (dist.minCoeff() < -1e-12 || std::abs(dist.sum() - 1.0) > 1e-9)
    throw std::invalid_argument(
        "payoff_value: dist is not a probability distribution");
  return dist.cwiseProduct(payoff).sum();
}

namespace {

std::string outcome_token(const Transcript& tr, const PayoffMatrix& c) {
  auto matches = [&](const PayoffMatrix& want) {
    return c.rows() == want.rows() && c.cols() == want.cols() &&
           (c - want).cwiseAbs().maxCoeff() == 0.0;
  };
  if (tr.problem == Problem::kMaxcut) {
    if (matches(maxcut_payoff(CutOutcome::kCut))) return "cut";
    if (matches(maxcut_payoff(CutOutcome::kNotCut))) return "notcut";
  } else {
    if (matches(gambling_payoff(Winner::kFirst, tr.k))) return "first";
    if (matches(gambling_payoff(Winner::kSecond, tr.k))) return "second";
  }
  throw std::invalid_argument(
      "write_transcript: payoff table is not a named outcome");
}

PayoffMatrix outcome_payoff(Problem problem, int k, const std::string& token,
                            int line) {
  if (problem == Problem::kMaxcut) {
    if (token == "cut") return maxcut_payoff(CutOutcome::kCut);
    if (token == "notcut") return maxcut_payoff(CutOutcome::kNotCut);
  } else {
    if (token == "first") return gambling_payoff(Winner::kFirst, k);
    if (token == "second") return gambling_payoff(Winner::kSecond, k);
  }
  throw ParseError("unknown outcome token '" + token + "'", line);
}

}  // namespace

Transcript read_transcript(std::istream& in) {
  std::string text;
  if (!std::getline(in, text)) throw ParseError("empty transcript", 1);
  std::istringstream header(text);
  Transcript tr;
  long t_count = 0;
  std::string problem;
  if (!(header >> tr.n >> tr.k >> t_count >> problem))
    throw ParseError("header must be 'n k T problem'", 1);
  if (tr.n < 1 || tr.k < 2 || t_count < 0)
    throw ParseError("header out of range (need n >= 1, k >= 2, T >= 0)", 1);
  try {
    tr.problem = parse_problem(problem);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 1);
  }
  if (tr.problem == Problem::kMaxcut && tr.k != 2)
    throw ParseError("maxcut requires k = 2", 1);

  tr.rounds.reserve(t_count);
  for (long t = 0; t < t_count; ++t) {
    const int line = static_cast<int>(t) + 2;
    if (!std::getline(in, text))
      throw ParseError("expected " + std::to_string(t_count) +
                           " rounds, got " + std::to_string(t),
                       line);
    std::istringstream row(text);
    TranscriptRound round;
    std::string token;
    if (!(row >> round.query.i >> round.query.j >> token))
      throw ParseError("round line must be 'i j outcome'", line);
    std::string extra;
    if (row >> extra)
      throw ParseError("trailing content '" + extra + "'", line);
    if (round.query.i < 0 || round.query.i >= tr.n || round.query.j < 0 ||
        round.query.j >= tr.n)
      throw ParseError("query outside [0, n)", line);
    round.payoff = outcome_payoff(tr.problem, tr.k, token, line);
    tr.rounds.push_back(std::move(round));
  }
  return tr;
}

Transcript read_transcript_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open transcript: " + path);
  return read_transcript(in);
}

void write_transcript(std::ostream& out, const Transcript& tr) {
  out << tr.n << ' ' << tr.k << ' ' << tr.rounds.size() << ' '
      << problem_name(tr.problem) << '\n';
  for (const TranscriptRound& round : tr.rounds)
    out << round.query.i << ' ' << round.query.j << ' '
        << outcome_token(tr, round.payoff) << '\n';
}

Adversary::Adversary(AdversarySpec spec) : spec_(std::move(spec)) {
  if (spec_.n < 1) throw std::invalid_argument("adversary: n must be >= 1");
  if (spec_.k < 2) throw std::invalid_argument("adversary: k must be >= 2");
  if (spec_.problem == Problem::kMaxcut && spec_.k != 2)
    throw std::invalid_argument("adversary: maxcut requires k = 2");
  if (spec_.kind == AdversaryKind::kRandomEdge ||
      spec_.kind == AdversaryKind::kPlanted) {
    if (spec_.n < 2)
      throw std::invalid_argument("adversary: need n >= 2 to query pairs");
  }
  if (!(spec_.noise >= 0.0 && spec_.noise <= 1.0))
    throw std::invalid_argument("adversary: noise outside [0, 1]");
  if (spec_.kind == AdversaryKind::kPlanted) {
    if (static_cast<int>(spec_.planted.size()) != spec_.n)
      throw std::invalid_argument("adversary: planted labeling must have n entries");
    for (int label : spec_.planted)
      if (label < 0 || label >= spec_.k)
        throw std::invalid_argument("adversary: planted label outside [0, k)");
  }
  if (spec_.kind == AdversaryKind::kScripted) {
    if (spec_.script.n != spec_.n || spec_.script.k != spec_.k)
      throw std::invalid_argument("adversary: script header mismatch");
    for (const TranscriptRound& r : spec_.script.rounds)
      if (r.query.i < 0 || r.query.i >= spec_.n || r.query.j < 0 ||
          r.query.j >= spec_.n)
        throw std::invalid_argument("adversary: script query outside [0, n)");
  }
}

// All randomness for round t comes from one stream in a fixed draw order,
// so query(t) and payoff(t) agree and every round is addressable directly.
struct Adversary::Draw {
  RoundQuery query;
  int coin = 0;      // outcome for random-edge; tie-break for planted
  double noise_u = 0.0;
};

Adversary::Draw Adversary::draw(long t) const {
  Draw d;
  std::mt19937_64 rng = stream_rng(spec_.seed, static_cast<std::uint64_t>(t));
  d.query.i = uniform_index(rng, spec_.n);
  d.query.j = uniform_index(rng, spec_.n - 1);
  if (d.query.j >= d.query.i) ++d.query.j;
  d.coin = uniform_index(rng, 2);
  d.noise_u = uniform01(rng);
  return d;
}

RoundQuery Adversary::query(long t) const {
  if (t < 0) throw std::invalid_argument("adversary: negative round");
  if (spec_.kind == AdversaryKind::kScripted) {
    if (t >= static_cast<long>(spec_.script.rounds.size()))
      throw std::invalid_argument("adversary: script exhausted at round " +
                                  std::to_string(t));
    return spec_.script.rounds[t].query;
  }
  return draw(t).query;
}

PayoffMatrix Adversary::payoff(long t) const {
  if (t < 0) throw std::invalid_argument("adversary: negative round");
  if (spec_.kind == AdversaryKind::kScripted) {
    if (t >= static_cast<long>(spec_.script.rounds.size()))
      throw std::invalid_argument("adversary: script exhausted at round " +
                                  std::to_string(t));
    return spec_.script.rounds[t].payoff;
  }

  const Draw d = draw(t);
  int outcome;  // 0 = cut/first, 1 = notcut/second
  if (spec_.kind == AdversaryKind::kRandomEdge) {
    outcome = d.coin;
  } else {
    const int li = spec_.planted[d.query.i];
    const int lj = spec_.planted[d.query.j];
    if (spec_.problem == Problem::kMaxcut) {
      outcome = (li != lj) ? 0 : 1;
    } else {
      outcome = (li > lj) ? 0 : (li < lj) ? 1 : d.coin;
    }
    if (d.noise_u < spec_.noise) outcome = 1 - outcome;
  }
  if (spec_.problem == Problem::kMaxcut)
    return maxcut_payoff(outcome == 0 ? CutOutcome::kCut : CutOutcome::kNotCut);
  return gambling_payoff(outcome == 0 ? Winner::kFirst : Winner::kSecond,
                         spec_.k);
}

TranscriptRound Adversary::round(long t) const {
  return TranscriptRound{query(t), payoff(t)};
}

PairReduction::PairReduction(int r, int n, int k)
    : r_(r), n_(n), k_(k) {
  if (r != 3 && r != 4)
    throw std::invalid_argument("pair reduction: only r in {3, 4} supported");
  if (n < r) throw std::invalid_argument("pair reduction: need n >= r");
  if (k < 2) throw std::invalid_argument("pair reduction: k must be >= 2");
  super_n_ = (n + 1) / 2;  // odd n leaves a padded single-item super
  super_k_ = k * k;
}

int PairReduction::super_of(int item) const {
  if (item < 0 || item >= n_)
    throw std::out_of_range("pair reduction: item outside [0, n)");
  return item / 2;
}

int PairReduction::slot_of(int item) const {
  if (item < 0 || item >= n_)
    throw std::out_of_range("pair reduction: item outside [0, n)");
  return item % 2;
}

int PairReduction::decode(int composite, int slot) const {
  if (composite < 0 || composite >= super_k_)
    throw std::out_of_range("pair reduction: composite label out of range");
  return slot == 0 ? composite / k_ : composite % k_;
}

TranscriptRound PairReduction::reduce(const LocalRound& round) const {
  if (static_cast<int>(round.items.size()) != r_)
    throw std::invalid_argument("pair reduction: tuple arity mismatch");
  long want = 1;
  for (int m = 0; m < r_; ++m) want *= k_;
  if (static_cast<long>(round.payoff.size()) != want)
    throw std::invalid_argument("pair reduction: payoff table must have k^r entries");
  for (double v : round.payoff)
    if (!(v >= -1.0 && v <= 1.0))
      throw std::invalid_argument("pair reduction: payoff outside [-1, 1]");

  int s1 = -1, s2 = -1;
  for (int item : round.items) {
    const int s = super_of(item);
    if (s1 < 0 || s == s1) {
      s1 = (s1 < 0) ? s : s1;
    } else if (s2 < 0 || s == s2) {
      s2 = (s2 < 0) ? s : s2;
    } else {
      throw std::invalid_argument(
          "pair reduction: tuple spans more than two item pairs");
    }
  }
  if (s2 < 0) s2 = s1;  // tuple inside one super-item: diagonal query
  if (s1 > s2) std::swap(s1, s2);

  TranscriptRound out;
  out.query = RoundQuery{s1, s2};
  out.payoff = PayoffMatrix::Zero(super_k_, super_k_);
  for (int alpha = 0; alpha < super_k_; ++alpha) {
    for (int beta = 0; beta < super_k_; ++beta) {
      // Row side carries s1's two item labels, column side s2's; read off
      // each tuple member from whichever side owns it.
      long idx = 0;
      for (int m = 0; m < r_; ++m) {
        const int item = round.items[m];
        const int comp = (super_of(item) == s1) ? alpha : beta;
        idx = idx * k_ + decode(comp, slot_of(item));
      }
      out.payoff(alpha, beta) = round.payoff[idx];
    }
  }
  if (s1 == s2) out.payoff = 0.5 * (out.payoff + out.payoff.transpose());
  return out;
}

Transcript PairReduction::reduce_all(const std::vector<LocalRound>& rounds) const {
  Transcript tr;
  tr.n = super_n_;
  tr.k = super_k_;
  tr.problem = Problem::kGambling;  // placeholder tag; payoffs are explicit
  tr.rounds.reserve(rounds.size());
  for (const LocalRound& round : rounds) tr.rounds.push_back(reduce(round));
  return tr;
}

}  // namespace locpred
