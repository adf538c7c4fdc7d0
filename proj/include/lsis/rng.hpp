#pragma once

#include <array>
#include <cstdint>

namespace lsis {

namespace philox {

// One Philox4x32-10 block: 128 output bits for a given (seed, stream, counter)
// triple. The seed forms the key, the stream index occupies the high counter
// words, the block counter the low ones.
std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t counter);

}  // namespace philox

// A reproducible uniform random stream. Streams are identified by
// (seed, stream_index): the same pair always replays the same sequence, and
// distinct stream indices give statistically independent sequences. Draws are
// a pure function of (seed, stream_index, position), so per-path streams can
// be regenerated anywhere regardless of how work is partitioned.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_index)
      : seed_(seed), stream_(stream_index) {}

  // Uniform draw strictly inside (0,1); safe to feed to the inverse normal CDF.
  double next_uniform();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_; }

  // Stream for a related task, e.g. the stream of path p relative to a base.
  RngStream substream(std::uint64_t offset) const {
    return RngStream(seed_, stream_ + offset);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  double pending_ = 0.0;
  bool has_pending_ = false;
};

}  // namespace lsis
