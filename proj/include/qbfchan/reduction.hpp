#ifndef QBFCHAN_REDUCTION_HPP
#define QBFCHAN_REDUCTION_HPP

#include <compare>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qbfchan/qbf.hpp"
#include "qbfchan/rational.hpp"

namespace qbfchan {

// Channel input symbol selecting the branch out of a column-entry state.
// Convention throughout: D1 selects the T (variable := true) branch,
// D2 the F (variable := false) branch.
enum class Decision : uint8_t { D1, D2 };

std::string to_string(Decision d);

// Gadget state families. Rows (clause index i) walk columns (variable
// index j); a row is primed while its clause is still unsatisfied by the
// assigned variables. Good and Bad are the lumped end-of-pass states.
enum class StateFamily : uint8_t { S0, A, Ap, T, Tp, F, Fp, Good, Bad };

bool is_absorbing(StateFamily f);
bool is_column_entry(StateFamily f);  // A or Ap
bool is_primed(StateFamily f);        // Ap, Tp, Fp, Bad

struct StateId {
  StateFamily family = StateFamily::S0;
  int row = 0;  // 1..m (0 for S0/Good/Bad)
  int col = 0;  // 1..n (0 for S0/Good/Bad)

  friend auto operator<=>(const StateId&, const StateId&) = default;
};

std::string to_string(const StateId& s);

// Partial state information: the family and column, never the row.
struct ObsLabel {
  StateFamily family = StateFamily::S0;
  int col = 0;

  friend auto operator<=>(const ObsLabel&, const ObsLabel&) = default;
};

std::string to_string(const ObsLabel& label);

// Which polarity of variable x_j appears in clause C_i.
enum class Occurrence : uint8_t { None, Positive, Negative, Both };

struct ChannelParams {
  unsigned a_exp = 20;                    // good-state reset p = 2^-a_exp
  unsigned b_exp = 40;                    // bad-state reset q = 2^-b_exp
  std::optional<unsigned> leak_exp = {};  // good->bad leak 2^-leak_exp; simulation only

  void validate() const;  // throws std::invalid_argument
  Rational p() const { return pow2_inv(a_exp); }
  Rational q() const { return pow2_inv(b_exp); }
};

// The compiled gadget: state space, exact transition law and observation
// map derived from one formula. Immutable after construction; all
// operations are pure and safe to share across threads.
class ChannelSpec {
 public:
  ChannelSpec(const QbfFormula& f, ChannelParams params);

  int n() const { return n_; }
  int m() const { return m_; }
  const std::vector<Quantifier>& quants() const { return quants_; }
  const ChannelParams& params() const { return params_; }

  int state_count() const { return 6 * m_ * n_ + 3; }
  int pass_length() const { return 2 * n_ + 1; }
  int num_universals() const;
  bool existential(int col) const;
  Occurrence occurrence(int row, int col) const;

  // Exact transition distribution; entries ordered by state index and
  // summing to exactly 1.
  std::vector<std::pair<StateId, Rational>> transition(const StateId& s, Decision d) const;

  ObsLabel observe(const StateId& s) const;

  // Dense index in [0, 6mn+3): S0 first, then columns outer / rows inner /
  // families A,Ap,T,Tp,F,Fp, then Good, Bad.
  int state_index(const StateId& s) const;
  StateId state_at(int index) const;
  std::vector<StateId> all_states() const;

  void check_state(const StateId& s) const;  // throws on invalid ids

  nlohmann::json to_json() const;           // schema channel-spec-v1
  nlohmann::json transitions_json() const;  // schema channel-transitions-v1

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<Quantifier> quants_;
  std::vector<Occurrence> occurrence_;  // row-major, m x n
  ChannelParams params_;
};

ChannelSpec build_channel(const QbfFormula& f, ChannelParams params);

// Deterministic walk of one pass for a fixed clause row and a full
// variable assignment (decisions at existential columns are read off
// the assignment). States listed after each of the 2n+1 steps.
std::vector<StateId> trace_assignment(const ChannelSpec& spec, int row,
                                      const std::vector<bool>& assignment);

}  // namespace qbfchan

#endif
