#pragma once

#include <cstdint>
#include <random>

namespace qumode {

using Rng = std::mt19937_64;

/// Independent stream for (base_seed, index, tag). Streams for distinct
/// arguments are decorrelated through std::seed_seq mixing, so a trial's
/// randomness never depends on which other trials ran or in what order.
inline Rng child_stream(std::uint64_t base_seed, std::uint64_t index, std::uint32_t tag = 0)
{
    std::seed_seq seq{static_cast<std::uint32_t>(base_seed & 0xffffffffu),
                      static_cast<std::uint32_t>(base_seed >> 32),
                      static_cast<std::uint32_t>(index & 0xffffffffu),
                      static_cast<std::uint32_t>(index >> 32),
                      tag,
                      0x9e3779b9u};
    return Rng(seq);
}

} // namespace qumode
