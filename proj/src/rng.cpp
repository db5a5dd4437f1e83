#include "dspde/rng.hpp"

#include <cmath>

namespace dspde {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53-bit uniform in the open interval (0, 1)
inline double to_open_unit(std::uint32_t a, std::uint32_t b) {
  std::uint64_t v = (static_cast<std::uint64_t>(a) << 32) | b;
  return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key) {
  std::array<std::uint32_t, 4> x = counter;
  std::array<std::uint32_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, x[0], hi0, lo0);
    mulhilo(kMul1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return x;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

NormalStream::NormalStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_(master_seed), stream_(stream_id) {
  std::uint64_t derived = splitmix64(master_seed ^ splitmix64(stream_id + 0x7F4A7C15ull));
  key_ = {static_cast<std::uint32_t>(derived), static_cast<std::uint32_t>(derived >> 32)};
}

void NormalStream::fill_normals(std::uint64_t step, std::size_t n, double* out) const {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::size_t produced = 0;
  std::uint32_t block = 0;
  while (produced < n) {
    std::array<std::uint32_t, 4> ctr = {block, static_cast<std::uint32_t>(step),
                                        static_cast<std::uint32_t>(step >> 32), 0x5EEDF00Du};
    std::array<std::uint32_t, 4> r = philox4x32(ctr, key_);
    double u1 = to_open_unit(r[0], r[1]);
    double u2 = to_open_unit(r[2], r[3]);
    double mag = std::sqrt(-2.0 * std::log(u1));
    out[produced++] = mag * std::cos(kTwoPi * u2);
    if (produced < n) out[produced++] = mag * std::sin(kTwoPi * u2);
    ++block;
  }
}

}  // namespace dspde
