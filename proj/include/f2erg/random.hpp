#pragma once

#include <cstdint>
#include <limits>

namespace f2erg {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a stream key from a parent key and a tag; used to give every
// (experiment, point, walk) triple its own independent stream.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t tag) noexcept {
  return mix64(parent ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

// Counter-based pseudorandom function: value at (key, counter).
constexpr std::uint64_t keyed_draw(std::uint64_t key, std::uint64_t counter) noexcept {
  return mix64(mix64(key) ^ (counter * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

// Maps a 64-bit draw to {0, ..., n-1} by multiply-high.
constexpr std::uint32_t scale_below(std::uint64_t draw, std::uint32_t n) noexcept {
  return static_cast<std::uint32_t>((static_cast<unsigned __int128>(draw) * n) >> 64);
}

// Sequential view of a keyed stream. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr CounterRng() noexcept = default;
  constexpr explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept { return keyed_draw(key_, counter_++); }

  constexpr std::uint32_t below(std::uint32_t n) noexcept { return scale_below((*this)(), n); }

  // Uniform on [0, 1) with 53 bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  constexpr CounterRng fork(std::uint64_t tag) const noexcept {
    return CounterRng(derive_key(key_, tag));
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace f2erg
