#pragma once

#include <cstdint>

namespace curvemix {

// Counter-based generator: output i is a bijective hash of seed + i*phi, so a
// stream is fully determined by its 64-bit seed and the number of draws made.
// Substreams (one per chain run) come from split(), which hashes the parent
// seed with the substream index; documented so runs are reproducible across
// platforms.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed) {}

  [[nodiscard]] static std::uint64_t mix(std::uint64_t z);

  std::uint64_t next();

  // Exactly uniform on [0, bound) by rejection; no modulo bias.
  std::uint64_t uniform_below(std::uint64_t bound);

  // True with probability num/den exactly (requires num <= den, den > 0).
  bool bernoulli_ratio(std::uint64_t num, std::uint64_t den);

  [[nodiscard]] RngStream split(std::uint64_t index) const;

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace curvemix
