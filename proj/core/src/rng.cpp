#include "abe/rng.hpp"

#include <openssl/rand.h>

#include <algorithm>
#include <stdexcept>

#include "abe/digest.hpp"

namespace abe {

std::uint64_t Rng::next_u64() {
  std::array<std::uint8_t, 8> b{};
  fill(b);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

void DeterministicRng::fill(std::span<std::uint8_t> out) {
  std::size_t pos = 0;
  while (pos < out.size()) {
    if (used_ == block_.size()) {
      std::array<std::uint8_t, 16> in{};
      for (int i = 0; i < 8; ++i) {
        in[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(seed_ >> (8 * i));
        in[static_cast<std::size_t>(8 + i)] = static_cast<std::uint8_t>(counter_ >> (8 * i));
      }
      ++counter_;
      block_ = sha256(in);
      used_ = 0;
    }
    std::size_t n = std::min(out.size() - pos, block_.size() - used_);
    std::copy_n(block_.begin() + static_cast<std::ptrdiff_t>(used_), n,
                out.begin() + static_cast<std::ptrdiff_t>(pos));
    used_ += n;
    pos += n;
  }
}

void SystemRng::fill(std::span<std::uint8_t> out) {
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
}

}  // namespace abe
