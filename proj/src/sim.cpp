#include "qbfchan/sim.hpp"

#include <cmath>
#include <iostream>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace qbfchan {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // 99% two-sided normal quantile

// Shared stepping loop: chooses the decision from the policy at
// existential column entries, maintains the per-pass history, and invokes
// on_step(post_state) after every transition.
template <typename OnStep>
void drive(ChannelSim& sim, const DecisionPolicy& policy, uint64_t steps, int (*bit_source)(void*),
           void* bit_ctx, OnStep&& on_step) {
  const ChannelSpec& spec = sim.spec();
  HistoryView hist{{StateFamily::S0, 0}};
  for (uint64_t t = 0; t < steps; ++t) {
    Decision d = Decision::D1;
    const StateId& s = sim.state();
    if (is_column_entry(s.family) && spec.existential(s.col)) d = policy.rule(hist);
    const int bit = bit_source ? bit_source(bit_ctx) : 0;
    ChannelOutput out = sim.step({d, bit});
    const StateId& post = sim.state();
    on_step(post, out);
    if (post.family == StateFamily::S0) {
      hist.assign(1, {StateFamily::S0, 0});
    } else if (!is_absorbing(post.family)) {
      hist.push_back(out.label);
    }
  }
}

}  // namespace

MonteCarloReport monte_carlo(const ChannelSpec& spec, const DecisionPolicy& policy,
                             uint64_t steps, uint64_t seed,
                             std::vector<CycleRow>* cycles_out) {
  return monte_carlo_stream(spec, policy, steps, seed, 0, cycles_out);
}

MonteCarloReport monte_carlo_stream(const ChannelSpec& spec, const DecisionPolicy& policy,
                                    uint64_t steps, uint64_t seed, uint64_t stream,
                                    std::vector<CycleRow>* cycles_out) {
  if (steps < 1) throw std::invalid_argument("monte_carlo: steps must be >= 1");
  const double min_cycle =
      static_cast<double>(spec.pass_length()) + std::ldexp(1.0, static_cast<int>(spec.params().a_exp));
  if (static_cast<double>(steps) < 10.0 * min_cycle)
    std::cerr << "warning: " << steps << " steps cover fewer than ten expected cycles ("
              << min_cycle << " steps each at minimum)\n";

  ChannelSim sim(spec, seed, stream);
  MonteCarloReport report;
  report.steps = steps;
  report.seed = seed;

  StateFamily prev = StateFamily::S0;
  uint64_t cycle_len = 0, cycle_good = 0;
  bool cycle_bad_pass = false;
  // Per-cycle sums for the regenerative confidence interval.
  double sum_len = 0, sum_good = 0, sum_len2 = 0, sum_good2 = 0, sum_cross = 0;

  drive(sim, policy, steps, nullptr, nullptr, [&](const StateId& post, const ChannelOutput&) {
    ++cycle_len;
    if (post.family == StateFamily::Good) {
      ++report.good_steps;
      ++cycle_good;
    } else if (post.family == StateFamily::Bad) {
      ++report.bad_steps;
    }
    if (is_absorbing(post.family) && !is_absorbing(prev)) {
      ++report.passes;
      if (post.family == StateFamily::Bad) {
        ++report.bad_passes;
        cycle_bad_pass = true;
      }
    }
    if (post.family == StateFamily::S0) {
      ++report.completed_cycles;
      if (cycles_out)
        cycles_out->push_back({report.completed_cycles, cycle_len, cycle_good, cycle_bad_pass});
      const double len = static_cast<double>(cycle_len);
      const double good = static_cast<double>(cycle_good);
      sum_len += len;
      sum_good += good;
      sum_len2 += len * len;
      sum_good2 += good * good;
      sum_cross += len * good;
      cycle_len = 0;
      cycle_good = 0;
      cycle_bad_pass = false;
    }
    prev = post.family;
  });

  report.good_frequency = static_cast<double>(report.good_steps) / static_cast<double>(steps);
  report.bad_frequency = static_cast<double>(report.bad_steps) / static_cast<double>(steps);
  report.bad_pass_fraction =
      report.passes ? static_cast<double>(report.bad_passes) / static_cast<double>(report.passes)
                    : 0.0;

  const double k = static_cast<double>(report.completed_cycles);
  if (report.completed_cycles >= 2) {
    const double ratio = sum_good / sum_len;
    const double mean_len = sum_len / k;
    // Var of Y - ratio * L over cycles, delta-method CI for the ratio.
    const double ss = sum_good2 - 2 * ratio * sum_cross + ratio * ratio * sum_len2;
    const double var = std::max(0.0, ss / (k - 1));
    report.confidence_halfwidth = kZ99 * std::sqrt(var / k) / mean_len;
  }
  return report;
}

MonteCarloReport monte_carlo_parallel(const ChannelSpec& spec, const DecisionPolicy& policy,
                                      uint64_t steps, uint64_t seed, unsigned replicas) {
  if (replicas < 1) throw std::invalid_argument("monte_carlo_parallel: replicas must be >= 1");
  if (replicas == 1) return monte_carlo(spec, policy, steps, seed);

  std::vector<MonteCarloReport> reports(replicas);
  std::vector<std::thread> workers;
  workers.reserve(replicas);
  const uint64_t base = steps / replicas;
  const uint64_t extra = steps % replicas;
  for (unsigned r = 0; r < replicas; ++r) {
    const uint64_t share = base + (r < extra ? 1 : 0);
    workers.emplace_back([&, r, share] {
      reports[r] = monte_carlo_stream(spec, policy, share, seed, r + 1, nullptr);
    });
  }
  for (auto& w : workers) w.join();
  return merge_reports(reports);
}

MonteCarloReport merge_reports(const std::vector<MonteCarloReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("merge_reports: no reports");
  MonteCarloReport merged;
  merged.seed = reports.front().seed;
  double weighted_h2 = 0.0;
  for (const auto& r : reports) {
    merged.steps += r.steps;
    merged.good_steps += r.good_steps;
    merged.bad_steps += r.bad_steps;
    merged.passes += r.passes;
    merged.bad_passes += r.bad_passes;
    merged.completed_cycles += r.completed_cycles;
    const double w = static_cast<double>(r.steps);
    weighted_h2 += w * w * r.confidence_halfwidth * r.confidence_halfwidth;
  }
  merged.good_frequency =
      static_cast<double>(merged.good_steps) / static_cast<double>(merged.steps);
  merged.bad_frequency = static_cast<double>(merged.bad_steps) / static_cast<double>(merged.steps);
  merged.bad_pass_fraction =
      merged.passes ? static_cast<double>(merged.bad_passes) / static_cast<double>(merged.passes)
                    : 0.0;
  merged.confidence_halfwidth = std::sqrt(weighted_h2) / static_cast<double>(merged.steps);
  return merged;
}

RelayReport relay_bits(const ChannelSpec& spec, const DecisionPolicy& policy,
                       const std::vector<int>& bitstream, uint64_t steps, uint64_t seed) {
  if (bitstream.empty()) throw std::invalid_argument("relay_bits: bitstream must be non-empty");
  if (steps < 1) throw std::invalid_argument("relay_bits: steps must be >= 1");

  ChannelSim sim(spec, seed);
  RelayReport report;
  report.steps = steps;
  report.seed = seed;

  struct Encoder {
    const std::vector<int>* stream;
    size_t fetch_pos = 0;
    bool pending = false;
    int pending_bit = 0;
    uint64_t offered = 0;
  } enc{&bitstream};

  auto fetch = +[](void* ctx) {
    Encoder& e = *static_cast<Encoder*>(ctx);
    if (!e.pending) {
      e.pending_bit = (*e.stream)[e.fetch_pos % e.stream->size()];
      ++e.fetch_pos;
      ++e.offered;
      e.pending = true;
    }
    return e.pending_bit;
  };

  drive(sim, policy, steps, fetch, &enc, [&](const StateId& post, const ChannelOutput& out) {
    if (post.family == StateFamily::Good) {
      // Decoder: the Good label marks a live slot; read the bit in order.
      const int expected = bitstream[report.bits_delivered % bitstream.size()];
      if (out.bit != expected) ++report.bit_errors;
      ++report.bits_delivered;
      enc.pending = false;
    }
  });

  report.bits_offered = enc.offered;
  report.empirical_rate =
      static_cast<double>(report.bits_delivered) / static_cast<double>(steps);
  return report;
}

void write_cycles_csv(std::ostream& out, const std::vector<CycleRow>& cycles) {
  out << "cycle,length,good_dwell,pass_outcome\n";
  for (const CycleRow& c : cycles)
    out << c.index << "," << c.length << "," << c.good_dwell << ","
        << (c.pass_bad ? "Bad" : "Good") << "\n";
}

nlohmann::json report_json(const MonteCarloReport& r) {
  nlohmann::json j;
  j["schema"] = "mc-report-v1";
  j["steps"] = r.steps;
  j["good_frequency"] = r.good_frequency;
  j["bad_frequency"] = r.bad_frequency;
  j["passes"] = r.passes;
  j["bad_passes"] = r.bad_passes;
  j["bad_pass_fraction"] = r.bad_pass_fraction;
  j["good_steps"] = r.good_steps;
  j["bad_steps"] = r.bad_steps;
  j["completed_cycles"] = r.completed_cycles;
  j["confidence_halfwidth_99"] = r.confidence_halfwidth;
  j["seed"] = r.seed;
  return j;
}

nlohmann::json report_json(const RelayReport& r) {
  nlohmann::json j;
  j["schema"] = "relay-report-v1";
  j["steps"] = r.steps;
  j["bits_offered"] = r.bits_offered;
  j["bits_delivered"] = r.bits_delivered;
  j["bit_errors"] = r.bit_errors;
  j["empirical_rate"] = r.empirical_rate;
  j["seed"] = r.seed;
  return j;
}

}  // namespace qbfchan
