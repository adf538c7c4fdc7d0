#include "lsis/rng.hpp"

namespace lsis {

namespace philox {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kBump0 = 0x9E3779B9u;
constexpr std::uint32_t kBump1 = 0xBB67AE85u;

inline void round(std::array<std::uint32_t, 4>& c, std::uint32_t k0,
                  std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t counter) {
  std::array<std::uint32_t, 4> c = {
      static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t k0 = static_cast<std::uint32_t>(seed);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
  for (int r = 0; r < 10; ++r) {
    round(c, k0, k1);
    k0 += kBump0;
    k1 += kBump1;
  }
  return c;
}

}  // namespace philox

double RngStream::next_uniform() {
  if (has_pending_) {
    has_pending_ = false;
    return pending_;
  }
  const auto words = philox::block(seed_, stream_, counter_++);
  const std::uint64_t a =
      (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  const std::uint64_t b =
      (static_cast<std::uint64_t>(words[2]) << 32) | words[3];
  // 53 significant bits, offset by 2^-54: values lie in (0,1) exclusive.
  const double u0 = static_cast<double>(a >> 11) * 0x1.0p-53 + 0x1.0p-54;
  const double u1 = static_cast<double>(b >> 11) * 0x1.0p-53 + 0x1.0p-54;
  pending_ = u1;
  has_pending_ = true;
  return u0;
}

}  // namespace lsis
