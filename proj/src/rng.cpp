#include "curvemix/rng.hpp"

#include "curvemix/core.hpp"

namespace curvemix {

namespace {
constexpr std::uint64_t kPhi = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t RngStream::mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t RngStream::next() {
  ++counter_;
  return mix(seed_ + counter_ * kPhi);
}

std::uint64_t RngStream::uniform_below(std::uint64_t bound) {
  if (bound == 0) fail(ErrorCode::IndexOutOfRange, "uniform_below(0)");
  std::uint64_t rem = (0 - bound) % bound;  // 2^64 mod bound
  std::uint64_t r = next();
  while (rem != 0 && r > ~std::uint64_t{0} - rem) r = next();
  return r % bound;
}

bool RngStream::bernoulli_ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0 || num > den)
    fail(ErrorCode::BadGamma, "probability ratio outside [0,1]");
  if (num == den) return true;
  return uniform_below(den) < num;
}

RngStream RngStream::split(std::uint64_t index) const {
  return RngStream(mix(seed_ ^ mix(index + kPhi)));
}

}  // namespace curvemix
