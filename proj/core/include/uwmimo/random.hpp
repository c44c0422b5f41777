#pragma once

#include <cstdint>
#include <random>

namespace uwmimo {

using Rng = std::mt19937_64;

/// Independent generator for (seed, stream...) so that Monte-Carlo trials can
/// run in any order and still reproduce bit-identical results.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(substream),
                    static_cast<std::uint32_t>(substream >> 32)};
  return Rng(seq);
}

}  // namespace uwmimo
