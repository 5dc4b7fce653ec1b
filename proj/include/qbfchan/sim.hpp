#ifndef QBFCHAN_SIM_HPP
#define QBFCHAN_SIM_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "qbfchan/channel.hpp"

namespace qbfchan {

struct MonteCarloReport {
  uint64_t steps = 0;
  double good_frequency = 0.0;  // fraction of steps resident in Good
  double bad_frequency = 0.0;   // fraction of steps resident in Bad
  uint64_t passes = 0;
  double bad_pass_fraction = 0.0;
  uint64_t seed = 0;
  // 99% normal-approximation halfwidth for good_frequency, computed per
  // completed S0-to-S0 cycle (step occupancy is heavily autocorrelated).
  // 1.0 when fewer than two cycles completed.
  double confidence_halfwidth = 1.0;

  uint64_t good_steps = 0;
  uint64_t bad_steps = 0;
  uint64_t bad_passes = 0;
  uint64_t completed_cycles = 0;
};

// One completed S0-to-S0 cycle for the time-series export.
struct CycleRow {
  uint64_t index = 0;
  uint64_t length = 0;
  uint64_t good_dwell = 0;
  bool pass_bad = false;  // outcome of the cycle's pass
};

// Runs the channel under the policy for `steps` steps, restarting the
// pass history at every S0 visit. Specs with a leak are allowed. Warns on
// stderr when steps cover fewer than ten minimal expected cycles.
MonteCarloReport monte_carlo(const ChannelSpec& spec, const DecisionPolicy& policy,
                             uint64_t steps, uint64_t seed,
                             std::vector<CycleRow>* cycles_out = nullptr);

// Same, on an explicit RNG stream (replica id).
MonteCarloReport monte_carlo_stream(const ChannelSpec& spec, const DecisionPolicy& policy,
                                    uint64_t steps, uint64_t seed, uint64_t stream,
                                    std::vector<CycleRow>* cycles_out = nullptr);

// Independent replicas on derived RNG streams, merged by weighted average.
// replicas == 1 is exactly monte_carlo.
MonteCarloReport monte_carlo_parallel(const ChannelSpec& spec, const DecisionPolicy& policy,
                                      uint64_t steps, uint64_t seed, unsigned replicas);

MonteCarloReport merge_reports(const std::vector<MonteCarloReport>& reports);

struct RelayReport {
  uint64_t steps = 0;
  uint64_t bits_offered = 0;    // bits fetched from the stream by the encoder
  uint64_t bits_delivered = 0;  // equals the number of Good-resident steps
  uint64_t bit_errors = 0;      // always 0: the relay is noiseless
  double empirical_rate = 0.0;  // bits_delivered / steps
  uint64_t seed = 0;
};

// Sequential bit relay: each step the encoder feeds the front unconsumed
// bit (the stream is cyclic); a bit is delivered when the post-transition
// state is Good, and the decoder reads delivered bits in order.
RelayReport relay_bits(const ChannelSpec& spec, const DecisionPolicy& policy,
                       const std::vector<int>& bitstream, uint64_t steps, uint64_t seed);

void write_cycles_csv(std::ostream& out, const std::vector<CycleRow>& cycles);

nlohmann::json report_json(const MonteCarloReport& report);
nlohmann::json report_json(const RelayReport& report);

}  // namespace qbfchan

#endif
