#ifndef QBFCHAN_CHANNEL_HPP
#define QBFCHAN_CHANNEL_HPP

#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "qbfchan/policy.hpp"
#include "qbfchan/reduction.hpp"
#include "qbfchan/rng.hpp"

namespace qbfchan {

struct ChannelInput {
  Decision decision = Decision::D1;
  int bit = 0;
};

struct ChannelOutput {
  ObsLabel label;
  int bit = 0;
};

struct TraceRow {
  uint64_t step = 0;
  StateId state;  // post-transition state
  Decision decision = Decision::D1;
  int bit_in = 0;
  ObsLabel label;
  int bit_out = 0;
};

// Stepped execution of a ChannelSpec with a seeded counter-based RNG.
// Deterministic given (spec, seed, stream, input sequence). A single
// instance is single-threaded; distinct instances are independent.
//
// Sampling draws integers below the exact common denominator of a
// transition row, so every exponent must be <= kSimExponentGuard.
class ChannelSim {
 public:
  static constexpr unsigned kSimExponentGuard = 62;

  ChannelSim(const ChannelSpec& spec, uint64_t seed, uint64_t stream = 0);

  const ChannelSpec& spec() const { return *spec_; }
  const StateId& state() const { return state_; }
  uint64_t step_count() const { return step_count_; }
  uint64_t seed() const { return rng_.seed(); }

  // Back to S0 with a fresh step count; the RNG stream is untouched.
  void reset();

  // Samples the successor, relays the input bit iff the successor is Good,
  // advances the step count.
  ChannelOutput step(ChannelInput input);

  // Replay/test hook.
  void set_state(const StateId& s);

  // When set, every step() appends a TraceRow. Caller owns the sink.
  void set_trace(std::vector<TraceRow>* sink) { trace_ = sink; }

 private:
  struct Row {
    uint64_t denom = 0;
    std::vector<uint64_t> cumulative;
    std::vector<StateId> next;
  };
  const Row& row_for(const StateId& s, Decision d);

  const ChannelSpec* spec_;
  StateId state_{StateFamily::S0, 0, 0};
  uint64_t step_count_ = 0;
  CounterRng rng_;
  std::vector<TraceRow>* trace_ = nullptr;
  std::unordered_map<uint64_t, Row> rows_;
};

struct PassStep {
  Decision decision = Decision::D1;
  StateId state;  // post-transition
  ObsLabel label;
};

struct PassRecord {
  std::vector<PassStep> steps;  // length exactly 2n+1
  StateId final_state;
};

// Runs one pass from S0 under the policy (input bits fixed to 0), feeding
// every output back into the policy's history. Throws std::logic_error
// when the simulator is not at S0.
PassRecord run_pass(ChannelSim& sim, const DecisionPolicy& policy);

// Tab-separated trajectory dump: step, state, decision, bit_in, label,
// bit_out — one line per step.
void write_trajectory(std::ostream& out, const std::vector<TraceRow>& rows);

}  // namespace qbfchan

#endif
