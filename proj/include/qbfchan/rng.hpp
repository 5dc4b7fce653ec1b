#ifndef QBFCHAN_RNG_HPP
#define QBFCHAN_RNG_HPP

#include <cstdint>

namespace qbfchan {

// Counter-based generator: the k-th output is a strong 64-bit mix of
// (seed, stream, k). Identical (seed, stream) sequences are reproducible
// on every platform, and distinct streams derived from one seed can run
// in parallel without coordination.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed, uint64_t stream = 0);

  uint64_t next_u64();

  // Unbiased uniform draw from [0, bound). bound must be nonzero.
  uint64_t below(uint64_t bound);

  // A statistically independent generator for a parallel replica.
  CounterRng split(uint64_t substream) const;

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }

 private:
  uint64_t seed_ = 0;
  uint64_t stream_ = 0;
  uint64_t key_ = 0;
  uint64_t counter_ = 0;
};

}  // namespace qbfchan

#endif
