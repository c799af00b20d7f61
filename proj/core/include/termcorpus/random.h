#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace termcorpus {

// mt19937_64's output sequence is fixed by the standard; the helpers below
// avoid std distributions, whose algorithms vary between standard libraries.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Seed for the stream identified by (global seed, label, index). Streams for
// distinct sentences are independent of processing order.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view label,
                          std::uint64_t index);

inline Rng make_stream(std::uint64_t seed, std::string_view label,
                       std::uint64_t index) {
  return Rng(stream_seed(seed, label, index));
}

// Uniform in [0, 1) with 53 bits of precision.
double uniform_unit(Rng& rng);

// Uniform in [0, bound). `bound` must be positive.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

// Fisher-Yates.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    using std::swap;
    swap(items[i - 1], items[uniform_below(rng, i)]);
  }
}

}  // namespace termcorpus
