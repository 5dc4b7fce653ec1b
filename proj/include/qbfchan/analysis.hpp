#ifndef QBFCHAN_ANALYSIS_HPP
#define QBFCHAN_ANALYSIS_HPP

#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "qbfchan/policy.hpp"

namespace qbfchan {

// Exact renewal-reward accounting of one S0-to-S0 cycle: a pass of 2n+1
// steps, then a geometric dwell of mean 1/p in Good (probability 1-beta)
// or 1/q in Bad (probability beta).
struct CycleStats {
  int n = 0;
  int m = 0;
  Rational beta;
  Rational p;
  Rational q;
  Rational e_cycle;     // (2n+1) + (1-beta)/p + beta/q
  Rational good_dwell;  // (1-beta)/p
};

// Throws std::invalid_argument on beta outside [0,1], invalid params, or a
// leak (the cycle accounting excludes it).
CycleStats cycle_stats(int n, int m, const Rational& beta, const ChannelParams& params);

struct RateBounds {
  Rational lower;       // good_dwell / e_cycle; achieved by the bit relay
  Rational upper;       // (good_dwell + transit_ub) / e_cycle
  Rational transit_ub;  // rational upper bound on log2(6mn+3), rounded up
  double transit_bits;  // log2(6mn+3) for display
  CycleStats stats;
};

Rational rate_lower_bound(const CycleStats& stats);
Rational rate_upper_bound(const CycleStats& stats);  // uses the directed-rounded transit term
RateBounds rate_bounds(const CycleStats& stats);

struct GapThresholds {
  Rational low{1, 5};
  Rational high{4, 5};
};

enum class Verdict { HighCapacity, LowCapacity };

std::string to_string(Verdict v);

struct GapDecision {
  Verdict verdict;
  RateBounds bounds;
  Rational beta_min;
  std::map<HistoryView, Decision> witness_decisions;
  DecisionPolicy witness;
};

// Raised when neither threshold is certified; carries the exponent pair
// that would separate the bounds at this instance size.
class IndeterminateError : public std::runtime_error {
 public:
  IndeterminateError(std::string message, unsigned a_exp, unsigned b_exp)
      : std::runtime_error(std::move(message)), a_exp_(a_exp), b_exp_(b_exp) {}
  unsigned recommended_a_exp() const { return a_exp_; }
  unsigned recommended_b_exp() const { return b_exp_; }

 private:
  unsigned a_exp_;
  unsigned b_exp_;
};

// Computes beta_min, both bounds, and the verdict. All comparisons against
// the thresholds are exact rational comparisons.
GapDecision decide_gap(const ChannelSpec& spec, const GapThresholds& thresholds = {});

// The sizing rule: 2^a >= 20*(2n+1) + 100 and 2^(b-a) >= 20*m*2^n + 100.
bool exponents_meet_rule(int n, int m, unsigned a_exp, unsigned b_exp);

// Direct evaluation: lower(beta=0) clears the high threshold and
// upper(beta=2^-n/m) clears the low one.
bool exponents_verified(int n, int m, unsigned a_exp, unsigned b_exp,
                        const GapThresholds& thresholds = {});

// Smallest round (multiple-of-5) exponents meeting the rule, re-verified
// by direct evaluation before they are returned.
std::pair<unsigned, unsigned> recommended_exponents(int n, int m);

nlohmann::json gap_decision_json(const ChannelSpec& spec, const GapDecision& decision,
                                 const GapThresholds& thresholds = {});

}  // namespace qbfchan

#endif
