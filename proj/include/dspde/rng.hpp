#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace dspde {

// Philox 4x32-10 block cipher (Salmon et al. counter-based generator).
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

std::uint64_t splitmix64(std::uint64_t x);

// Standard normals addressed by (master seed, stream id, step index).
// The draw for a given step never depends on what was drawn before it, so
// ensembles produce identical noise no matter how trajectories are scheduled
// across threads, and a resumed run continues the same sequence.
class NormalStream {
public:
  NormalStream(std::uint64_t master_seed, std::uint64_t stream_id);

  // Writes the n normals that belong to (step) into out.
  void fill_normals(std::uint64_t step, std::size_t n, double* out) const;

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t stream_id() const { return stream_; }

private:
  std::uint64_t master_;
  std::uint64_t stream_;
  std::array<std::uint32_t, 2> key_;
};

}  // namespace dspde
