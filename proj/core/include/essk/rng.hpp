#pragma once

#include <cstdint>
#include <random>

namespace essk {

// Every random draw in the library comes from an explicitly passed Stream.
using Stream = std::mt19937_64;

// Salts keep substreams of different consumers disjoint for the same
// (seed, index) pair.
enum class StreamPurpose : std::uint64_t {
  kSimulation = 0x51a7ull,
  kMcmc = 0x3c3cull,
  kTest = 0x7e57ull,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Counter-based substream: the stream for item `index` depends only on
// (seed, index, purpose), so work can be split across threads in any order.
Stream substream(std::uint64_t seed, std::uint64_t index,
                 StreamPurpose purpose = StreamPurpose::kSimulation);

}  // namespace essk
