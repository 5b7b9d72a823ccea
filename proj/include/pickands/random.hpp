#pragma once

#include <cstdint>
#include <random>

namespace pickands {

using RandomStream = std::mt19937_64;

/// Stream tags keep the randomness of independent uses of one master seed
/// apart (main replicates, pilot runs, second halves of paired checks).
enum class StreamTag : std::uint64_t {
  replicate = 0,
  pilot = 1,
  paired = 2,
  mixing = 3,
  capacity = 4,
};

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, StreamTag tag = StreamTag::replicate);

/// Independent stream for replicate `index`: depends only on
/// (master, index, tag), never on scheduling.
RandomStream replicate_stream(std::uint64_t master, std::uint64_t index, StreamTag tag = StreamTag::replicate);

}  // namespace pickands
