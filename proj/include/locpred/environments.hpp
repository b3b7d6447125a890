#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "locpred/indexing.hpp"

namespace locpred {

struct RoundQuery {
  int i = 0;
  int j = 0;

  bool operator==(const RoundQuery&) const = default;
};

// k x k payoff table for one query; entry (a, b) is the payoff for
// labeling the queried pair (a, b).  Entries live in [-1, 1].
using PayoffMatrix = Eigen::MatrixXd;

enum class Problem { kMaxcut, kGambling };

std::string problem_name(Problem p);
Problem parse_problem(const std::string& name);

enum class CutOutcome { kCut, kNotCut };
enum class Winner { kFirst, kSecond };

// Max-cut payoffs (k = 2): "cut" rewards disagreement, "not cut" agreement.
PayoffMatrix maxcut_payoff(CutOutcome outcome, int k = 2);

// Gambling payoffs: +-1 by whether the row-side label beats the column's;
// ties pay 0.  `winner` selects which side the round rewarded.
PayoffMatrix gambling_payoff(Winner winner, int k);

// Expected payoff <dist, payoff> of serving `dist` against `payoff`.
double payoff_value(const Eigen::MatrixXd& dist, const PayoffMatrix& payoff);

// Round-by-round record of an opponent's queries and revealed payoffs.
struct TranscriptRound {
  RoundQuery query;
  PayoffMatrix payoff;
};

struct Transcript {
  int n = 0;
  int k = 2;
  Problem problem = Problem::kMaxcut;
  std::vector<TranscriptRound> rounds;
};

// Text form: header "n k T problem", then one "i j outcome" line per round
// (outcomes: cut/notcut or first/second).  Parse failures report the
// 1-based line number.
Transcript read_transcript(std::istream& in);
Transcript read_transcript_file(const std::string& path);
void write_transcript(std::ostream& out, const Transcript& transcript);

enum class AdversaryKind { kRandomEdge, kPlanted, kScripted };

struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::kRandomEdge;
  Problem problem = Problem::kMaxcut;
  int n = 0;
  int k = 2;
  double noise = 0.0;          // planted only: flip probability per round
  std::uint64_t seed = 0;
  std::vector<int> planted;    // planted only: the hidden labeling
  Transcript script;           // scripted only
};

// Oblivious opponent: the query and payoff for round t depend only on
// (spec, t), never on the learner's play, so rounds can be generated in
// any order.
class Adversary {
 public:
  explicit Adversary(AdversarySpec spec);

  const AdversarySpec& spec() const { return spec_; }
  RoundQuery query(long t) const;
  PayoffMatrix payoff(long t) const;
  TranscriptRound round(long t) const;

 private:
  struct Draw;
  Draw draw(long t) const;

  AdversarySpec spec_;
};

// One round of an r-local problem: `items` lists the queried tuple and
// `payoff` holds k^r values indexed row-major by the label tuple.
struct LocalRound {
  std::vector<int> items;
  std::vector<double> payoff;
};

// Reduction from r-local to pairwise (r in {3, 4}): items are paired into
// super-items with k^ceil(r/2) composite labels, and each tuple touching
// at most two super-items becomes one pairwise query over them.
class PairReduction {
 public:
  PairReduction(int r, int n, int k);

  int r() const { return r_; }
  int super_n() const { return super_n_; }
  int super_k() const { return super_k_; }

  int super_of(int item) const;
  int slot_of(int item) const;
  // Labels of the two items inside super-item `s` under composite label a.
  int decode(int composite, int slot) const;

  TranscriptRound reduce(const LocalRound& round) const;
  Transcript reduce_all(const std::vector<LocalRound>& rounds) const;

 private:
  int r_ = 0;
  int n_ = 0;
  int k_ = 0;
  int super_n_ = 0;
  int super_k_ = 0;
};

}  // namespace locpred
