#include "qbfchan/channel.hpp"

#include <numeric>
#include <ostream>
#include <stdexcept>

namespace qbfchan {

ChannelSim::ChannelSim(const ChannelSpec& spec, uint64_t seed, uint64_t stream)
    : spec_(&spec), rng_(seed, stream) {
  const auto& params = spec.params();
  unsigned max_exp = std::max(params.a_exp, params.b_exp);
  if (params.leak_exp) max_exp = std::max(max_exp, *params.leak_exp);
  if (max_exp > kSimExponentGuard)
    throw std::invalid_argument("simulation requires exponents <= " +
                                std::to_string(kSimExponentGuard));
}

void ChannelSim::reset() {
  state_ = {StateFamily::S0, 0, 0};
  step_count_ = 0;
}

void ChannelSim::set_state(const StateId& s) {
  spec_->check_state(s);
  state_ = s;
}

const ChannelSim::Row& ChannelSim::row_for(const StateId& s, Decision d) {
  const uint64_t key = (static_cast<uint64_t>(spec_->state_index(s)) << 1) |
                       (d == Decision::D2 ? 1u : 0u);
  auto it = rows_.find(key);
  if (it != rows_.end()) return it->second;

  Row row;
  const auto dist = spec_->transition(s, d);
  BigInt denom = 1;
  for (const auto& [next, prob] : dist) denom = lcm(denom, denominator(prob));
  if (denom > BigInt(uint64_t{1} << 63))
    throw std::invalid_argument("transition row denominator too large to sample");
  row.denom = denom.convert_to<uint64_t>();
  uint64_t acc = 0;
  for (const auto& [next, prob] : dist) {
    BigInt weight = numerator(prob) * (denom / denominator(prob));
    acc += weight.convert_to<uint64_t>();
    row.cumulative.push_back(acc);
    row.next.push_back(next);
  }
  if (acc != row.denom) throw std::logic_error("transition row does not sum to 1");
  return rows_.emplace(key, std::move(row)).first->second;
}

ChannelOutput ChannelSim::step(ChannelInput input) {
  const Row& row = row_for(state_, input.decision);
  const uint64_t draw = rng_.below(row.denom);
  size_t pick = 0;
  while (draw >= row.cumulative[pick]) ++pick;
  state_ = row.next[pick];
  ++step_count_;

  ChannelOutput out;
  out.label = spec_->observe(state_);
  out.bit = (state_.family == StateFamily::Good) ? input.bit : 0;
  if (trace_)
    trace_->push_back({step_count_, state_, input.decision, input.bit, out.label, out.bit});
  return out;
}

PassRecord run_pass(ChannelSim& sim, const DecisionPolicy& policy) {
  if (sim.state().family != StateFamily::S0)
    throw std::logic_error("run_pass requires the channel to be at S0");

  const ChannelSpec& spec = sim.spec();
  HistoryView hist{{StateFamily::S0, 0}};
  PassRecord record;
  record.steps.reserve(spec.pass_length());
  for (;;) {
    Decision d = Decision::D1;
    const StateId& s = sim.state();
    if (is_column_entry(s.family) && spec.existential(s.col)) d = policy.rule(hist);
    ChannelOutput out = sim.step({d, 0});
    record.steps.push_back({d, sim.state(), out.label});
    hist.push_back(out.label);
    if (is_absorbing(sim.state().family)) break;
  }
  record.final_state = sim.state();
  return record;
}

void write_trajectory(std::ostream& out, const std::vector<TraceRow>& rows) {
  for (const TraceRow& r : rows) {
    out << r.step << "\t" << to_string(r.state) << "\t" << to_string(r.decision) << "\t"
        << r.bit_in << "\t" << to_string(r.label) << "\t" << r.bit_out << "\n";
  }
}

}  // namespace qbfchan
