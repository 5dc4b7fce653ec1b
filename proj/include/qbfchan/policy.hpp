#ifndef QBFCHAN_POLICY_HPP
#define QBFCHAN_POLICY_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qbfchan/qbf.hpp"
#include "qbfchan/reduction.hpp"

namespace qbfchan {

// Labels observed since the pass began; position 0 is always S0, position
// 2j-1 a column-j entry label, position 2j a column-j branch label.
using HistoryView = std::vector<ObsLabel>;

// Throws std::invalid_argument when the sequence cannot arise in a pass.
void check_history(const HistoryView& hist, int n);

// Reads the assigned values x_1..x_k off the branch labels of a history
// (T-family means true). k is the number of completed columns.
std::vector<bool> assigned_values(const HistoryView& hist);

// Deterministic within-pass policy with perfect recall. The rule must be
// total on structurally valid histories; it is only ever queried when the
// last label is a column-entry label of an existential column.
struct DecisionPolicy {
  std::string name;
  std::function<Decision(const HistoryView&)> rule;
};

// Policy backed by an explicit table; histories without an entry map to
// Decision::D1 so the rule stays total.
DecisionPolicy table_policy(std::string name, std::map<HistoryView, Decision> table);

// Plays a winning strategy: reconstructs x_1..x_{j-1} from the history and
// selects the strategy's value for x_j (D1 = true). Histories unreachable
// under the strategy's own play fall back to D1.
DecisionPolicy strategy_policy(const ExistentialStrategy& strategy);

// One hidden configuration of a pass: the clause row drawn at S0 and the
// universal coin values (bit k = value of the k-th universal variable in
// index order).
struct Scenario {
  int row = 1;
  uint32_t coins = 0;
};

struct ScenarioOutcome {
  Scenario scenario;
  StateId final_state;
};

struct PassAnalysis {
  Rational beta;  // probability the pass ends in Bad
  std::vector<ScenarioOutcome> table;
  std::string policy_name;
};

inline constexpr uint64_t kScenarioGuard = uint64_t{1} << 22;   // m * 2^u
inline constexpr uint64_t kHistoryGuard = uint64_t{1} << 14;    // reachable histories
inline constexpr uint64_t kPolicyGuard = uint64_t{1} << 22;     // enumerated policies

// Exact bad-absorption probability of one policy: every (row, coins)
// scenario has probability 1/(m * 2^u); the trajectory under the policy is
// deterministic given the scenario. Rejects specs with a leak and
// instances beyond kScenarioGuard. Pure computation on immutable specs;
// safe to call concurrently.
PassAnalysis pass_bad_probability(const ChannelSpec& spec, const DecisionPolicy& pol);

struct OptimalPolicyResult {
  Rational beta_min;
  DecisionPolicy policy;                      // attains beta_min
  std::map<HistoryView, Decision> decisions;  // the policy's table
};

// Backward induction on the observation-history tree: minimizing decision
// at existential information sets, conditional expectation elsewhere.
// Ties break toward D1.
OptimalPolicyResult optimal_bad_probability(const ChannelSpec& spec);

// Number of histories reachable under some policy (the DP tree size).
uint64_t count_reachable_histories(const ChannelSpec& spec);

// Every deterministic policy restricted to its reachable histories,
// without repetition. Guarded by kHistoryGuard / kPolicyGuard.
void for_each_policy(const ChannelSpec& spec,
                     const std::function<void(const std::map<HistoryView, Decision>&)>& fn);
std::vector<DecisionPolicy> enumerate_policies(const ChannelSpec& spec);

// CSV export: header comment with policy name and exact beta, then one
// row per (clause row, universal assignment, final state).
void write_pass_analysis_csv(std::ostream& out, const ChannelSpec& spec,
                             const PassAnalysis& analysis);

}  // namespace qbfchan

#endif
