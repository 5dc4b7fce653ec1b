#include "qbfchan/rng.hpp"

#include <stdexcept>

namespace qbfchan {

namespace {

// splitmix64 finalizer (Steele, Lea, Flood; public-domain constants).
uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(uint64_t seed, uint64_t stream)
    : seed_(seed), stream_(stream) {
  key_ = mix64(seed + 0x9e3779b97f4a7c15ull * (stream + 1));
}

uint64_t CounterRng::next_u64() {
  return mix64(key_ + 0x9e3779b97f4a7c15ull * ++counter_);
}

uint64_t CounterRng::below(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("CounterRng::below: bound must be nonzero");
  const uint64_t limit = (~0ull / bound) * bound;
  for (;;) {
    uint64_t r = next_u64();
    if (r < limit) return r % bound;
  }
}

CounterRng CounterRng::split(uint64_t substream) const {
  return CounterRng(seed_, stream_ * 0x100000001ull + substream + 1);
}

}  // namespace qbfchan
