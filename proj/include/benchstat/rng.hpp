#pragma once

#include <cstdint>
#include <random>

namespace benchstat
{

using Rng = std::mt19937_64;

/// Independent stream `stream` derived from a single user seed. Chains,
/// replicate generators and data generators each take their own stream id.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  return Rng(seq);
}

/// Seed drawn from the OS entropy source, for runs without --seed.
inline std::uint64_t entropy_seed()
{
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace benchstat
